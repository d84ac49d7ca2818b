#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ym/analytic.hpp"
#include "ym/empirical.hpp"
#include "ym/expression.hpp"

namespace ym {

// A probability measure on K in one of three representations.
using YoungMeasure = std::variant<DiracMixture, DensityTable, EmpiricalMeasure>;

const char* variant_name(const YoungMeasure& m);

// Weak* probe. beta is written in the codomain variable s (s1..sl); the
// optional weight in the domain variables x (x1..xd); the optional
// Caratheodory integrand psi in both (x..., s...). When psi is present it
// replaces beta in Young functionals.
struct TestFunction {
  Expression beta;
  std::optional<Expression> weight;
  std::optional<Expression> psi;
  std::optional<double> lipschitz;  // caller-declared bound for beta on K
  std::string label;

  static TestFunction parse(const std::string& beta, int codomain_dim = 1,
                            std::optional<double> lipschitz = std::nullopt);

  bool x_dependent() const { return weight.has_value() || psi.has_value(); }

  // beta must evaluate without error on a 10^4-point grid over K.
  void check_continuous_on(const Interval& k) const;
};

// Parses the optional weight (domain variables) and psi (domain + codomain
// variables) for use with Young functionals.
TestFunction make_functional_probe(const std::string& beta,
                                   const std::string& weight,
                                   const std::string& psi, int d, int l);

enum class SuiteKind { standard, monomial, trig };

// default: s^0..s^6, sin(pi s), cos(pi s), |s - mid(K)|
// monomial: s^0..s^6
// trig: sin(pi s), cos(pi s), sin(2 pi s), cos(2 pi s)
// Each probe carries its Lipschitz constant on K.
std::vector<TestFunction> probe_suite(SuiteKind kind, const Interval& k);
SuiteKind parse_suite_kind(const std::string& name);
std::string suite_description(SuiteKind kind);

double integrate_test(const YoungMeasure& m, const TestFunction& t);

// Mass of (-inf, y]. Codomain must be 1D.
double cdf(const YoungMeasure& m, double y);

double total_mass(const YoungMeasure& m);

// max over the suite of |int t da - int t db|: a lower bound on the weak*
// distance as seen through a finite set of probes.
double weakstar_gap(const YoungMeasure& a, const YoungMeasure& b,
                    const std::vector<TestFunction>& suite);

}  // namespace ym
