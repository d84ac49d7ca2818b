#include "ym/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "ym/error.hpp"

namespace ym {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const char* variant_name(const YoungMeasure& m) {
  return std::visit(overloaded{
                        [](const DiracMixture&) { return "atoms"; },
                        [](const DensityTable&) { return "density"; },
                        [](const EmpiricalMeasure&) { return "empirical"; },
                    },
                    m);
}

double sample_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return (sum + comp) / static_cast<double>(values.size());
}

// ---------------------------------------------------------------------------
// Test functions

TestFunction TestFunction::parse(const std::string& beta, int codomain_dim,
                                 std::optional<double> lipschitz) {
  TestFunction t;
  t.beta = parse_expression(beta, Symbols::indexed("s", codomain_dim));
  t.lipschitz = lipschitz;
  t.label = beta;
  return t;
}

void TestFunction::check_continuous_on(const Interval& k) const {
  constexpr int kPoints = 10000;
  for (int i = 0; i < kPoints; ++i) {
    const double s = k.lo + k.width() * i / (kPoints - 1);
    try {
      beta.evaluate(s);
    } catch (const EvaluationError& e) {
      throw InputError("test function '" + label + "' fails at s=" +
                       std::to_string(s) + ": " + e.what());
    }
  }
}

TestFunction make_functional_probe(const std::string& beta,
                                   const std::string& weight,
                                   const std::string& psi, int d, int l) {
  TestFunction t = TestFunction::parse(beta.empty() ? "s" : beta, l);
  if (!weight.empty()) t.weight = parse_expression(weight, Symbols::domain(d));
  if (!psi.empty()) {
    t.psi = parse_expression(psi, Symbols::domain_and_codomain(d, l));
    t.label = psi;
  }
  return t;
}

namespace {

std::string literal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<TestFunction> probe_suite(SuiteKind kind, const Interval& k) {
  std::vector<TestFunction> suite;
  const double r = std::max(std::abs(k.lo), std::abs(k.hi));
  if (kind == SuiteKind::standard || kind == SuiteKind::monomial) {
    for (int p = 0; p <= 6; ++p) {
      const double lip = p == 0 ? 0.0 : p * std::pow(r, p - 1);
      suite.push_back(TestFunction::parse("s^" + std::to_string(p), 1, lip));
    }
  }
  if (kind == SuiteKind::standard || kind == SuiteKind::trig) {
    suite.push_back(TestFunction::parse("sin(pi*s)", 1, std::numbers::pi));
    suite.push_back(TestFunction::parse("cos(pi*s)", 1, std::numbers::pi));
  }
  if (kind == SuiteKind::trig) {
    suite.push_back(TestFunction::parse("sin(2*pi*s)", 1, 2 * std::numbers::pi));
    suite.push_back(TestFunction::parse("cos(2*pi*s)", 1, 2 * std::numbers::pi));
  }
  if (kind == SuiteKind::standard) {
    const double mid = k.mid();
    const std::string text =
        mid < 0 ? "abs(s + " + literal(-mid) + ")" : "abs(s - " + literal(mid) + ")";
    suite.push_back(TestFunction::parse(text, 1, 1.0));
  }
  return suite;
}

SuiteKind parse_suite_kind(const std::string& name) {
  if (name == "default") return SuiteKind::standard;
  if (name == "monomial") return SuiteKind::monomial;
  if (name == "trig") return SuiteKind::trig;
  throw InputError("unknown probe suite '" + name + "'");
}

std::string suite_description(SuiteKind kind) {
  switch (kind) {
    case SuiteKind::standard:
      return "default: s^0..s^6, sin(pi*s), cos(pi*s), abs(s - mid(K))";
    case SuiteKind::monomial:
      return "monomial: s^0..s^6";
    case SuiteKind::trig:
      return "trig: sin(pi*s), cos(pi*s), sin(2*pi*s), cos(2*pi*s)";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Integration

namespace {

double integrate_atoms(const DiracMixture& m, const Expression& beta) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    s += m.weight(i) * beta.evaluate(m.location(i));
  }
  return s;
}

double integrate_density(const DensityTable& t, const Expression& beta) {
  double s = 0.0;
  double prev = t.size() ? beta.evaluate(t.grid[0]) * t.values[0] : 0.0;
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    const double next = beta.evaluate(t.grid[j + 1]) * t.values[j + 1];
    s += 0.5 * (prev + next) * (t.grid[j + 1] - t.grid[j]);
    prev = next;
  }
  return s;
}

double integrate_empirical(const EmpiricalMeasure& e, const Expression& beta) {
  std::vector<double> v(e.samples.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = beta.evaluate(e.samples[i]);
  return sample_mean(v);
}

}  // namespace

double integrate_test(const YoungMeasure& m, const TestFunction& t) {
  if (t.x_dependent()) {
    throw InputError("integrate_test takes x-independent probes only; use a "
                     "Young functional for weights or psi");
  }
  return std::visit(
      overloaded{
          [&](const DiracMixture& a) { return integrate_atoms(a, t.beta); },
          [&](const DensityTable& d) { return integrate_density(d, t.beta); },
          [&](const EmpiricalMeasure& e) {
            return integrate_empirical(e, t.beta);
          },
      },
      m);
}

double cdf(const YoungMeasure& m, double y) {
  return std::visit(
      overloaded{
          [&](const DiracMixture& a) {
            if (a.dimension() != 1) {
              throw InputError("cdf needs a 1D codomain");
            }
            double s = 0.0;
            for (std::size_t i = 0; i < a.size() && a.location(i)[0] <= y; ++i) {
              s += a.weight(i);
            }
            return s;
          },
          [&](const DensityTable& d) { return d.integral_up_to(y); },
          [&](const EmpiricalMeasure& e) {
            if (e.samples.empty()) return 0.0;
            const auto it =
                std::upper_bound(e.samples.begin(), e.samples.end(), y);
            return static_cast<double>(it - e.samples.begin()) /
                   static_cast<double>(e.samples.size());
          },
      },
      m);
}

double total_mass(const YoungMeasure& m) {
  return std::visit(
      overloaded{
          [](const DiracMixture& a) { return a.total_mass(); },
          [](const DensityTable& d) { return d.trapezoid_integral(); },
          [](const EmpiricalMeasure& e) { return e.samples.empty() ? 0.0 : 1.0; },
      },
      m);
}

double weakstar_gap(const YoungMeasure& a, const YoungMeasure& b,
                    const std::vector<TestFunction>& suite) {
  if (suite.empty()) throw InputError("probe suite is empty");
  double gap = 0.0;
  for (const auto& t : suite) {
    gap = std::max(gap, std::abs(integrate_test(a, t) - integrate_test(b, t)));
  }
  return gap;
}

}  // namespace ym
