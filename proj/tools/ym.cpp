// ym: Young measures of piecewise functions from the command line.
//
//   ym validate   --input SPEC
//   ym density    --input SPEC [--grid G] [--plot]
//   ym atoms      --input SPEC [--level L]
//   ym prob       --input SPEC --interval a b [--interval a b ...]
//   ym sample     --input SPEC [--samples n] [--seed S] [--plot]
//   ym functional --input SPEC [--beta E] [--weight E] [--psi E] [--samples n]
//   ym approx     --input SPEC [--min-level a] [--max-level b] [--suite K]
//   ym example harmonic [--n N] [--output spec.json]
//
// SPEC is a JSON file or a builtin name (harmonic, identity, square,
// constant). Exit codes: 1 bad input or failed validation, 2 numerical
// failure, 3 I/O.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ym/analytic.hpp"
#include "ym/approximation.hpp"
#include "ym/error.hpp"
#include "ym/measure.hpp"
#include "ym/monte_carlo.hpp"
#include "ym/philox.hpp"
#include "ym/plot.hpp"
#include "ym/spec_io.hpp"

namespace {

using nlohmann::json;
using namespace ym;

constexpr const char* kToolVersion = "ym 1.0.0";
constexpr std::size_t kHistogramBins = 128;

struct Options {
  std::string command;
  std::string input = "harmonic";
  std::string output;
  std::size_t grid = 4096;
  std::size_t samples = 1000000;
  std::optional<std::size_t> n;
  std::string seed_text;
  int truncate = 64;
  std::string beta = "s";
  std::string weight;
  std::string psi;
  std::vector<std::pair<double, double>> intervals;
  bool plot = false;
  std::string suite = "default";
  std::optional<int> level;
  int min_level = 0;
  int max_level = 12;
  std::size_t subdivisions = 4096;
  std::string example = "harmonic";

  std::uint64_t seed() const {
    if (seed_text.empty()) return kDefaultSeed;
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(seed_text, &used, 0);
      if (used == seed_text.size()) return v;
    } catch (const std::exception&) {
    }
    throw InputError("--seed must be an unsigned 64-bit integer, got '" +
                     seed_text + "'");
  }
};

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llX", static_cast<unsigned long long>(v));
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Ordered key/value metadata shared by CSV headers and JSON documents.
class Metadata {
 public:
  Metadata(const Options& o) {
    add("tool", kToolVersion);
    add("command", o.command);
    add("input", o.input);
  }

  void add(std::string key, std::string value) {
    entries_.emplace_back(std::move(key), std::move(value));
  }
  void add(std::string key, double value) { add(std::move(key), num(value)); }

  void add_generator(std::uint64_t seed) {
    add("seed", hex64(seed));
    add("generator", std::string(CounterStream::kName) + "/" + CounterStream::kVersion);
  }

  std::vector<std::string> lines() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_) out.push_back(k + "=" + v);
    return out;
  }
  void write_comments(std::ostream& out) const {
    for (const auto& line : lines()) out << "# " << line << '\n';
  }
  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : entries_) j[k] = v;
    return j;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// The whole document is built in memory first, so a failed run leaves no
// partial file behind.
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string sibling_path(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  const bool has_ext = dot != std::string::npos &&
                       (slash == std::string::npos || dot > slash);
  return (has_ext ? path.substr(0, dot) : path) + suffix;
}

std::string plot_path(const Options& o) {
  if (o.output.empty() || o.output == "-") {
    throw InputError("--plot needs --output to name the SVG next to it");
  }
  return sibling_path(o.output, ".svg");
}

PiecewiseFunction load(const Options& o) {
  if (is_builtin(o.input)) return builtin_function(o.input, o.truncate);
  return load_function_spec(o.input);
}

void add_input_meta(Metadata& meta, const Options& o, const PiecewiseFunction& f) {
  if (o.input == "harmonic") meta.add("truncate", std::to_string(o.truncate));
  meta.add("dimension", std::to_string(f.dimension()));
  meta.add("pieces", std::to_string(f.pieces().size()));
  meta.add("domain_measure", f.domain().measure());
  meta.add("tail_mass", f.tail_mass());
}

const Interval& scalar_codomain(const PiecewiseFunction& f, const char* what) {
  if (f.codomain_dimension() != 1) {
    throw InputError(std::string(what) + " needs a function with 1D values");
  }
  return f.codomain().front();
}

// Pieces the 1D engines can invert: constants anywhere, otherwise 1D with
// an inverse or a monotone flag.
bool invertible_1d(const PiecewiseFunction& f) {
  if (f.codomain_dimension() != 1) return false;
  for (const auto& p : f.pieces()) {
    if (p.is_constant()) continue;
    if (f.dimension() != 1 || !p.invertible()) return false;
  }
  return true;
}

int cmd_validate(const Options& o) {
  const PiecewiseFunction f = load(o);
  const ValidationReport r = validate_partition(f);
  Metadata meta(o);
  add_input_meta(meta, o, f);
  meta.add("coverage_tolerance", ValidationReport::kCoverageTolerance);
  meta.add("inverse_tolerance", ValidationReport::kInverseTolerance);
  json doc;
  doc["meta"] = meta.to_json();
  doc["report"] = report_to_json(r);
  emit(o.output, dump(doc));
  if (!r.ok()) {
    std::cerr << "ym: validation failed\n";
    return 1;
  }
  return 0;
}

DensityTable density_table(const PiecewiseFunction& f, std::size_t size) {
  const Interval& k = scalar_codomain(f, "density");
  const auto grid = make_density_grid(k, size, density_breakpoints(f));
  return pushforward_density(f, grid);
}

int cmd_density(const Options& o) {
  const PiecewiseFunction f = load(o);
  require_valid(f);
  const DensityTable t = density_table(f, o.grid);
  Metadata meta(o);
  add_input_meta(meta, o, f);
  meta.add("grid", std::to_string(o.grid));
  meta.add("breakpoint_offset", "1e-9*range");
  meta.add("jacobian_fd_step", "1e-6*piece_width");
  meta.add("derivative_floor", 1e-10);
  meta.add("trapezoid_mass", t.trapezoid_integral());
  meta.add("quadrature_tolerance", t.quadrature_tolerance());
  meta.add("convention", "g(y)=(1/M)*sum over pieces with y in closed image of |J_inv(y)|");
  std::ostringstream out;
  meta.write_comments(out);
  write_density_csv(out, t);
  if (o.plot) {
    std::ostringstream svg;
    plot_density_svg(svg, t, density_breakpoints(f));
    emit(plot_path(o), svg.str());
  }
  emit(o.output, out.str());
  return 0;
}

int cmd_atoms(const Options& o) {
  const PiecewiseFunction f = load(o);
  require_valid(f);
  Metadata meta(o);
  add_input_meta(meta, o, f);
  YoungMeasure m = o.level ? YoungMeasure(level_measure(f, *o.level))
                           : YoungMeasure(simple_young_measure(f));
  if (o.level) meta.add("level", std::to_string(*o.level));
  meta.add("convention", "weights m_i/M");
  json doc;
  doc["meta"] = meta.to_json();
  doc["measure"] = measure_to_json(m);
  doc["total_mass"] = total_mass(m);
  emit(o.output, dump(doc));
  return 0;
}

int cmd_prob(const Options& o) {
  if (o.intervals.empty()) throw InputError("prob needs at least one --interval a b");
  const PiecewiseFunction f = load(o);
  require_valid(f);
  std::vector<Interval> set;
  json ivs = json::array();
  for (const auto& [a, b] : o.intervals) {
    if (!(a <= b)) throw InputError("--interval needs a <= b");
    set.push_back({a, b});
    ivs.push_back({a, b});
  }
  const ProbabilityEstimate p = pushforward_probability(f, set);
  Metadata meta(o);
  add_input_meta(meta, o, f);
  meta.add("convention", "P(C)=(1/M)*|f^-1(C)|; the tail may add up to tail_bound");
  json doc;
  doc["meta"] = meta.to_json();
  doc["intervals"] = ivs;
  doc["value"] = p.value;
  doc["tail_bound"] = p.tail_bound;
  emit(o.output, dump(doc));
  return 0;
}

int cmd_sample(const Options& o) {
  const PiecewiseFunction f = load(o);
  require_valid(f);
  scalar_codomain(f, "sample");
  const std::size_t n = o.n.value_or(o.samples);
  const std::uint64_t seed = o.seed();
  const EmpiricalMeasure e = empirical_measure(f, n, seed);

  Metadata meta(o);
  add_input_meta(meta, o, f);
  meta.add("samples", std::to_string(n));
  meta.add_generator(seed);
  meta.add("accepted", std::to_string(e.size()));
  meta.add("rejected", std::to_string(e.rejected));

  const double covered = 1.0 - f.tail_mass() / f.domain().measure();
  const bool has_reference = invertible_1d(f);
  std::function<double(double)> ref_density;
  if (has_reference) {
    // Reference CDF of f(U) given that U landed in a piece.
    const PushforwardCdf cdf_f(f);
    const auto ref_cdf = [&](double y) { return cdf_f(y) / covered; };
    const double d = ks_statistic(e, ref_cdf);
    const double critical = 1.63 / std::sqrt(static_cast<double>(e.size()));
    meta.add("ks_reference", "exact CDF of the pieces, renormalized to the covered mass");
    meta.add("ks_statistic", d);
    meta.add("ks_critical_1pct", critical);
    meta.add("ks_pass", d < critical ? "true" : "false");
    ref_density = [&](double y) {
      try {
        const std::vector<double> g{y};
        return pushforward_density(f, g).values[0] / covered;
      } catch (const NumericalError&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
  } else {
    meta.add("ks_reference", "none");
  }

  std::string body;
  body.reserve(e.size() * 24 + 64);
  {
    std::ostringstream head;
    meta.write_comments(head);
    head << "y\n";
    body += head.str();
  }
  char buf[32];
  for (double y : e.samples) {
    const int len = std::snprintf(buf, sizeof buf, "%.17g\n", y);
    body.append(buf, static_cast<std::size_t>(len));
  }
  if (o.plot) {
    std::ostringstream svg;
    plot_histogram_svg(svg, e, kHistogramBins, ref_density);
    emit(plot_path(o), svg.str());
  }
  emit(o.output, body);
  return 0;
}

int cmd_functional(const Options& o) {
  const PiecewiseFunction f = load(o);
  require_valid(f);
  const TestFunction t = make_functional_probe(o.beta, o.weight, o.psi,
                                               f.dimension(), f.codomain_dimension());
  if (!t.psi && f.codomain_dimension() == 1) t.check_continuous_on(f.codomain().front());
  const std::size_t n = o.n.value_or(o.samples);
  const std::uint64_t seed = o.seed();

  Metadata meta(o);
  add_input_meta(meta, o, f);
  meta.add("beta", o.beta);
  if (!o.weight.empty()) meta.add("weight", o.weight);
  if (!o.psi.empty()) meta.add("psi", o.psi);
  meta.add("samples", std::to_string(n));
  meta.add_generator(seed);
  meta.add("subdivisions", std::to_string(o.subdivisions));
  meta.add("convention", "M-scaled: integral over the domain of psi(x,f(x))*w(x), not divided by M");

  json doc;
  doc["meta"] = meta.to_json();
  const FunctionalEstimate mc = young_functional_mc(f, t, n, seed);
  doc["monte_carlo"] = estimate_to_json(mc);
  if (f.dimension() == 1) {
    const FunctionalEstimate q = young_functional_quadrature(f, t, o.subdivisions);
    doc["quadrature"] = estimate_to_json(q);
    doc["difference"] = mc.value - q.value;
    doc["difference_in_stderr"] =
        mc.standard_error > 0 ? std::abs(mc.value - q.value) / mc.standard_error : 0.0;
  } else {
    doc["quadrature"] = nullptr;
  }
  emit(o.output, dump(doc));
  return 0;
}

int cmd_approx(const Options& o) {
  const PiecewiseFunction f = load(o);
  require_valid(f);
  const Interval k = scalar_codomain(f, "approx");
  if (o.min_level < 0 || o.max_level < o.min_level) {
    throw InputError("need 0 <= --min-level <= --max-level");
  }
  const SuiteKind kind = parse_suite_kind(o.suite);
  const auto suite = probe_suite(kind, k);
  double lipschitz = 0.0;
  for (const auto& p : suite) lipschitz = std::max(lipschitz, p.lipschitz.value_or(0.0));

  Metadata meta(o);
  add_input_meta(meta, o, f);
  meta.add("suite", suite_description(kind));
  meta.add("suite_lipschitz_max", lipschitz);
  YoungMeasure reference = DiracMixture::point_mass(0.0);
  if (f.kind() == FunctionKind::simple) {
    reference = simple_young_measure(f);
    meta.add("reference", "exact atoms");
  } else {
    reference = density_table(f, o.grid);
    meta.add("reference", "density table");
    meta.add("grid", std::to_string(o.grid));
    meta.add("reference_quadrature_tolerance",
             std::get<DensityTable>(reference).quadrature_tolerance());
  }
  meta.add("gap_bound", "suite_lipschitz_max*diam(K)*2^-level");
  meta.add("diam_K", k.width());
  std::vector<int> levels;
  for (int l = o.min_level; l <= o.max_level; ++l) levels.push_back(l);
  const auto rows = convergence_report(f, levels, suite, reference);
  std::ostringstream out;
  write_convergence_csv(out, rows, meta.lines());
  emit(o.output, out.str());
  return 0;
}

int cmd_example(const Options& o) {
  if (!is_builtin(o.example)) {
    throw InputError("unknown example '" + o.example + "'");
  }
  const int truncation = o.n ? static_cast<int>(*o.n) : o.truncate;
  const PiecewiseFunction f = builtin_function(o.example, truncation);
  const std::string spec_path = o.output.empty() ? o.example + ".json" : o.output;
  emit(spec_path, dump(function_to_json(f)));
  if (o.example != "harmonic") return 0;

  // Closed-form reference density on the same grid `density` would use.
  const HarmonicStaircase h = harmonic_staircase(truncation);
  DensityTable t;
  t.grid = make_density_grid({0, 1}, o.grid, density_breakpoints(f));
  for (double y : t.grid) {
    t.values.push_back(h.reference_density(y));
    // Pieces 2..m contribute on [1/m, 1/(m-1)).
    std::size_t count = 0;
    if (y >= 0.0 && y < 1.0) {
      const double m = y > 0.0 ? std::min<double>(std::ceil(1.0 / y), truncation)
                               : truncation;
      count = static_cast<std::size_t>(m) - 1;
    }
    t.contributing_counts.push_back(count);
  }
  t.domain_measure = 1.0;
  t.tail_bound = 1.0 / truncation;
  Options ref = o;
  ref.input = "harmonic";
  ref.truncate = truncation;
  Metadata meta(ref);
  meta.add("truncate", std::to_string(truncation));
  meta.add("grid", std::to_string(o.grid));
  meta.add("reference", "H_m - 1 on [1/m, 1/(m-1)), m = min(ceil(1/y), N)");
  std::ostringstream out;
  meta.write_comments(out);
  write_density_csv(out, t);
  emit(sibling_path(spec_path, "_reference.csv"), out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Young measures of piecewise functions"};
  app.set_version_flag("--version", kToolVersion);
  app.fallthrough();
  app.require_subcommand(1);

  app.add_option("--input,-i", o.input, "function spec JSON or builtin name")
      ->capture_default_str();
  app.add_option("--output,-o", o.output, "output file (stdout when absent)");
  app.add_option("--grid", o.grid, "density grid size")->capture_default_str()
      ->check(CLI::Range(std::size_t{3}, std::size_t{1} << 26));
  app.add_option("--samples", o.samples, "Monte Carlo sample count")
      ->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--n", o.n, "sample count; for `example`, the truncation N")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed_text, "generator seed (default 0x5EED000000000001)");
  app.add_option("--truncate", o.truncate, "harmonic truncation N")
      ->capture_default_str()->check(CLI::Range(2, 1 << 20));
  app.add_option("--beta", o.beta, "test function in s")->capture_default_str();
  app.add_option("--weight", o.weight, "weight w(x) for functionals");
  app.add_option("--psi", o.psi, "integrand psi(x, s) for functionals");
  app.add_option("--interval", o.intervals, "closed interval a b (repeatable)")
      ->allow_extra_args(false);
  app.add_flag("--plot", o.plot, "also write an SVG next to --output");
  app.add_option("--suite", o.suite, "probe suite: default, monomial or trig")
      ->capture_default_str();
  app.add_option("--level", o.level, "quantization level for `atoms`");
  app.add_option("--min-level", o.min_level, "first ladder level")->capture_default_str();
  app.add_option("--max-level", o.max_level, "last ladder level")->capture_default_str();
  app.add_option("--subdivisions", o.subdivisions, "trapezoid intervals per piece")
      ->capture_default_str();

  const std::vector<std::pair<const char*, const char*>> commands{
      {"validate", "check the partition and write a JSON report"},
      {"density", "tabulate the pushforward density as CSV"},
      {"atoms", "Dirac mixture of a simple function as JSON"},
      {"prob", "probability of a union of intervals"},
      {"sample", "empirical measure of f(U) as CSV, with a KS check"},
      {"functional", "Young functional by Monte Carlo and quadrature"},
      {"approx", "weak* gaps of the range-quantization ladder as CSV"},
      {"example", "write a builtin spec (and its reference density)"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    if (std::string(name) == "example") {
      sub->add_option("name", o.example, "builtin name")->capture_default_str();
    }
    sub->callback([&o, name = std::string(name)] { o.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (o.command == "validate") return cmd_validate(o);
    if (o.command == "density") return cmd_density(o);
    if (o.command == "atoms") return cmd_atoms(o);
    if (o.command == "prob") return cmd_prob(o);
    if (o.command == "sample") return cmd_sample(o);
    if (o.command == "functional") return cmd_functional(o);
    if (o.command == "approx") return cmd_approx(o);
    if (o.command == "example") return cmd_example(o);
  } catch (const InputError& e) {
    std::cerr << "ym: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "ym: numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "ym: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "ym: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
