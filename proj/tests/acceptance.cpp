// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and runtime limits are fixed here and must not
// be loosened to make a run pass.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ym/analytic.hpp"
#include "ym/approximation.hpp"
#include "ym/measure.hpp"
#include "ym/monte_carlo.hpp"
#include "ym/spec_io.hpp"

namespace fs = std::filesystem;
using namespace ym;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Density tables built by criteria 1-5, checked together by criterion 6.
std::vector<std::pair<std::string, DensityTable>> tables;

DensityTable density_on_grid(const PiecewiseFunction& f, std::size_t size) {
  const auto grid = make_density_grid(f.codomain().front(), size, density_breakpoints(f));
  return pushforward_density(f, grid);
}

PiecewiseFunction identity() { return builtin_function("identity", 0); }
PiecewiseFunction square() { return builtin_function("square", 0); }
PiecewiseFunction staircase() { return builtin_function("harmonic", 64); }

void harmonic_golden_values() {
  const auto t0 = Clock::now();
  // Same path as `example harmonic --n 64` followed by `density`.
  const PiecewiseFunction f =
      function_from_json(nlohmann::json::parse(function_to_json(staircase()).dump()));
  const DensityTable t = density_on_grid(f, 4096);
  const std::vector<double> spots{0.3, 0.4, 0.7};
  const DensityTable s = pushforward_density(f, spots);
  const double elapsed = seconds_since(t0);

  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double y = t.grid[i];
    if (y >= 1.0) continue;  // outside every [1/m, 1/(m-1))
    const int m = y > 0.0 ? std::min(64, static_cast<int>(std::ceil(1.0 / y))) : 64;
    worst = std::max(worst, std::abs(t.values[i] - (oracle::harmonic(m) - 1.0)));
  }
  const double spot = std::max({std::abs(s.values[0] - 13.0 / 12.0),
                                std::abs(s.values[1] - 5.0 / 6.0),
                                std::abs(s.values[2] - 0.5)});
  tables.emplace_back("harmonic N=64", t);
  const bool ok = worst <= 1e-12 && spot <= 1e-12 && elapsed < 1.0;
  report(1, "harmonic golden values", ok,
         "max |g - (H_m - 1)| = " + fmt("%.3g", worst) + " over " +
             std::to_string(t.size()) + " grid points, spot error " + fmt("%.3g", spot) +
             " (<= 1e-12), " + fmt("%.3f", elapsed) + " s (< 1 s)");
}

void simple_function_atoms() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(0x51D1E);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_weight = 0.0;
  double worst_sum = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 3;
    // Random product grid over a random box, plus a second disjoint box for
    // half the fixtures. Values come from a small set so atoms merge.
    std::vector<Box> boxes;
    std::vector<Piece> pieces;
    std::map<double, double> want;
    const int box_count = 1 + trial % 2;
    for (int b = 0; b < box_count; ++b) {
      Box box;
      std::vector<std::vector<double>> cuts(d);
      for (int c = 0; c < d; ++c) {
        const double lo = 4.0 * b + u(rng);
        const double hi = lo + 0.5 + 2.0 * u(rng);
        box.push_back({lo, hi});
        cuts[c] = {lo, hi};
        const int k = 1 + static_cast<int>(rng() % (d == 1 ? 30 : 6));
        for (int i = 0; i < k; ++i) cuts[c].push_back(lo + (hi - lo) * u(rng));
        std::sort(cuts[c].begin(), cuts[c].end());
        cuts[c].erase(std::unique(cuts[c].begin(), cuts[c].end()), cuts[c].end());
      }
      boxes.push_back(box);
      std::vector<std::size_t> idx(d, 0);
      while (true) {
        Box cell;
        double vol = 1.0;
        for (int c = 0; c < d; ++c) {
          cell.push_back({cuts[c][idx[c]], cuts[c][idx[c] + 1]});
          vol *= cell.back().width();
        }
        const double v = static_cast<double>(rng() % 5) - 2.0;
        pieces.push_back({cell, std::vector<Expression>(1, Expression::number(v)),
                          std::nullopt, std::nullopt, false});
        want[v] += vol;
        int c = 0;
        while (c < d && ++idx[c] + 1 == cuts[c].size()) idx[c++] = 0;
        if (c == d) break;
      }
    }
    const Domain domain(d, boxes);
    const double M = domain.measure();
    const PiecewiseFunction f(domain, pieces, {{-2.0, 2.0}});
    const DiracMixture m = simple_young_measure(f);
    double sum = 0.0;
    std::size_t i = 0;
    for (const auto& [v, vol] : want) {
      if (i >= m.size() || m.location(i)[0] != v) {
        worst_weight = INFINITY;
        break;
      }
      worst_weight = std::max(worst_weight, std::abs(m.weight(i) - vol / M));
      sum += m.weight(i);
      ++i;
    }
    if (i != m.size()) worst_weight = INFINITY;
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
  }
  const double elapsed = seconds_since(t0);
  const bool ok = worst_weight <= 1e-12 && worst_sum <= 1e-12 && elapsed < 1.0;
  report(2, "simple-function atoms", ok,
         "100 fixtures (d = 1..3), max |w - m_i/M| = " + fmt("%.3g", worst_weight) +
             ", max |sum w - 1| = " + fmt("%.3g", worst_sum) + " (<= 1e-12), " +
             fmt("%.3f", elapsed) + " s (< 1 s)");
}

void ks_against_analytic_cdf() {
  struct Case {
    std::string name;
    PiecewiseFunction f;
    std::function<double(double)> cdf;
    std::uint64_t seed;
  };
  const std::vector<Case> cases{
      {"identity", identity(), [](double y) { return std::clamp(y, 0.0, 1.0); },
       0x5EED000000000001ull},
      {"x^2", square(), [](double y) { return std::sqrt(std::clamp(y, 0.0, 1.0)); },
       0x5EED000000000002ull},
      {"harmonic N=64", staircase(), oracle::staircase_cdf, 0x5EED000000000003ull},
  };
  const std::size_t n = 1000000;
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto t0 = Clock::now();
    const EmpiricalMeasure e = empirical_measure(c.f, n, c.seed);
    const double d = ks_statistic(e, c.cdf);
    const double elapsed = seconds_since(t0);
    const double limit = 1.63 / std::sqrt(static_cast<double>(n)) +
                         c.f.tail_mass() / c.f.domain().measure();
    const bool pass = d < limit && elapsed < 10.0;
    ok = ok && pass;
    detail += (detail.empty() ? "" : "; ") + c.name + " D = " + fmt("%.5f", d) +
              " (< " + fmt("%.5f", limit) + "), " + fmt("%.2f", elapsed) + " s";
  }
  report(3, "KS of f(U) against the analytic CDF, n = 1e6", ok, detail + " (< 10 s each)");
}

void ladder_gaps() {
  const auto t0 = Clock::now();
  const PiecewiseFunction f = identity();
  const Interval k = f.codomain().front();
  const DensityTable ref = density_on_grid(f, 4096);
  tables.emplace_back("identity reference", ref);
  const auto suite = probe_suite(SuiteKind::standard, k);
  double lipschitz = 0.0;
  for (const auto& t : suite) lipschitz = std::max(lipschitz, *t.lipschitz);
  std::vector<int> levels;
  for (int l = 2; l <= 20; ++l) levels.push_back(l);
  const auto rows = convergence_report(f, levels, suite, ref);
  const double elapsed = seconds_since(t0);
  bool ok = elapsed < 30.0;
  double worst_ratio = 0.0;
  for (const auto& r : rows) {
    const double bound = lipschitz * std::ldexp(k.width(), -r.level) + 1e-6;
    ok = ok && r.gap <= bound;
    worst_ratio = std::max(worst_ratio, r.gap / bound);
  }
  const double last = rows.back().gap;
  ok = ok && last < 1e-5;
  report(4, "ladder gaps on the identity", ok,
         "Lambda = " + fmt("%g", lipschitz) + ", max gap/(Lambda 2^-L + 1e-6) = " +
             fmt("%.4f", worst_ratio) + " (<= 1) for L = 2..20, gap(20) = " +
             fmt("%.3g", last) + " (< 1e-5), " + fmt("%.2f", elapsed) + " s (< 30 s)");
}

void cross_engine_agreement() {
  const auto t0 = Clock::now();
  const TestFunction beta = TestFunction::parse("s");
  const std::vector<std::pair<std::string, PiecewiseFunction>> cases{
      {"identity", identity()}, {"x^2", square()}, {"harmonic N=64", staircase()}};
  bool ok = true;
  std::string detail;
  for (const auto& [name, f] : cases) {
    const FunctionalEstimate q = young_functional_quadrature(f, beta, 4096);
    int agree = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const FunctionalEstimate mc = young_functional_mc(f, beta, 100000, 0xC0FFEE00 + seed);
      agree += std::abs(mc.value - q.value) <= 4.0 * mc.standard_error;
    }
    ok = ok && agree >= 19;
    detail += (detail.empty() ? "" : "; ") + name + " " + std::to_string(agree) + "/20";
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < 60.0;
  report(5, "Monte Carlo vs quadrature, beta = s, n = 1e5", ok,
         detail + " seeds within 4 stderr (>= 19), " + fmt("%.2f", elapsed) +
             " s (< 60 s)");
}

void normalization() {
  bool ok = !tables.empty();
  std::string detail;
  for (const auto& [name, t] : tables) {
    const double mass = t.trapezoid_integral();
    const bool pass = mass >= 1.0 - t.tail_bound - 1e-6 && mass <= 1.0 + 1e-6;
    ok = ok && pass;
    detail += (detail.empty() ? "" : "; ") + name + " mass " + fmt("%.12f", mass) +
              " in [" + fmt("%.9f", 1.0 - t.tail_bound - 1e-6) + ", 1.000001]";
  }
  report(6, "density normalization", ok, detail);
}

int run(const std::string& args, const char* threads) {
  const std::string cmd = std::string("YM_THREADS=") + threads + " " + YM_BINARY + " " +
                          args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism() {
  const fs::path dir = fs::temp_directory_path() / ("ym_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  // One CLI run per criterion; each is repeated with a different worker
  // count and every produced file compared byte for byte.
  const std::vector<std::pair<std::string, std::string>> runs{
      {"example harmonic --n 64 -o {}/spec.json", "spec.json spec_reference.csv"},
      {"density --input harmonic --truncate 64 --grid 4096 --plot -o {}/density.csv",
       "density.csv density.svg"},
      {"atoms --input constant -o {}/atoms.json", "atoms.json"},
      {"sample --input identity --samples 1000000 -o {}/s_id.csv", "s_id.csv"},
      {"sample --input square --samples 1000000 --plot -o {}/s_sq.csv", "s_sq.csv s_sq.svg"},
      {"sample --input harmonic --samples 1000000 -o {}/s_h.csv", "s_h.csv"},
      {"approx --input identity --min-level 2 --max-level 20 -o {}/ladder.csv", "ladder.csv"},
      {"functional --input harmonic --beta s --samples 100000 -o {}/func.json", "func.json"},
  };
  bool ok = true;
  std::size_t files = 0;
  std::string bad;
  for (const auto& [pattern, outputs] : runs) {
    std::map<std::string, std::string> first;
    for (const char* threads : {"1", "4"}) {
      const fs::path sub = dir / threads;
      fs::create_directories(sub);
      std::string args = pattern;
      args.replace(args.find("{}"), 2, sub.string());
      if (run(args, threads) != 0) {
        ok = false;
        bad += " [failed: " + args + "]";
        continue;
      }
      std::istringstream names(outputs);
      std::string name;
      while (names >> name) {
        const std::string bytes = slurp(sub / name);
        if (first.count(name) == 0) {
          first[name] = bytes;
          ++files;
        } else if (first[name] != bytes || bytes.empty()) {
          ok = false;
          bad += " [differs: " + name + "]";
        }
      }
    }
  }
  fs::remove_all(dir);
  report(7, "bitwise determinism of CLI outputs", ok,
         std::to_string(files) + " files from " + std::to_string(runs.size()) +
             " runs, each repeated with YM_THREADS=1 and 4" +
             (bad.empty() ? ", all identical" : bad));
}

}  // namespace

// An exception inside a criterion counts as its failure.
void guarded(int id, const char* title, void (*criterion)()) {
  try {
    criterion();
  } catch (const std::exception& e) {
    report(id, title, false, std::string("threw: ") + e.what());
  }
}

int main() {
  guarded(1, "harmonic golden values", harmonic_golden_values);
  guarded(2, "simple-function atoms", simple_function_atoms);
  guarded(3, "KS of f(U) against the analytic CDF", ks_against_analytic_cdf);
  guarded(4, "ladder gaps on the identity", ladder_gaps);
  guarded(5, "Monte Carlo vs quadrature", cross_engine_agreement);
  guarded(6, "density normalization", normalization);
  guarded(7, "bitwise determinism of CLI outputs", determinism);
  std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
