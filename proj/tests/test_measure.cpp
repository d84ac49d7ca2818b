#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "ym/error.hpp"
#include "ym/measure.hpp"
#include "ym/monte_carlo.hpp"

using namespace ym;

namespace {

DensityTable identity_density() {
  const auto f = fixtures::identity();
  const auto grid = make_density_grid({0, 1}, 4096, density_breakpoints(f));
  return pushforward_density(f, grid);
}

std::vector<YoungMeasure> sample_measures() {
  return {DiracMixture(1, {0.1, 0.4, 0.9}, {0.2, 0.5, 0.3}),
          identity_density(),
          empirical_measure(fixtures::square(), 5000, 11)};
}

}  // namespace

TEST_CASE("integrals against known values") {
  const YoungMeasure atoms = simple_young_measure(fixtures::two_level());
  CHECK(integrate_test(atoms, TestFunction::parse("s^2")) == 14.5);
  CHECK(std::abs(integrate_test(identity_density(), TestFunction::parse("s^2")) - 1.0 / 3) <= 1e-6);
  const YoungMeasure emp = empirical_measure(fixtures::identity(), 100000, 3);
  CHECK(std::abs(integrate_test(emp, TestFunction::parse("s")) - 0.5) <= 0.01);
  CHECK(variant_name(atoms) == std::string("atoms"));
}

TEST_CASE("cdf is nondecreasing and bounded by total mass") {
  for (const auto& m : sample_measures()) {
    double prev = 0.0;
    for (int i = -10; i <= 110; ++i) {
      const double v = cdf(m, i / 100.0);
      CHECK(v >= prev);
      prev = v;
    }
    CHECK(std::abs(prev - total_mass(m)) <= 1e-9);
  }
}

TEST_CASE("integration is linear") {
  const TestFunction a = TestFunction::parse("sin(pi*s)");
  const TestFunction b = TestFunction::parse("s^3");
  const TestFunction c = TestFunction::parse("2.5*sin(pi*s) - 0.75*s^3");
  for (const auto& m : sample_measures()) {
    const double lhs = integrate_test(m, c);
    const double rhs = 2.5 * integrate_test(m, a) - 0.75 * integrate_test(m, b);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("probe gap is a pseudometric") {
  const auto suite = probe_suite(SuiteKind::standard, {0, 1});
  const auto ms = sample_measures();
  for (const auto& a : ms) {
    CHECK(weakstar_gap(a, a, suite) == 0.0);
    for (const auto& b : ms) {
      CHECK(weakstar_gap(a, b, suite) == weakstar_gap(b, a, suite));
      for (const auto& c : ms) {
        CHECK(weakstar_gap(a, c, suite) <=
              weakstar_gap(a, b, suite) + weakstar_gap(b, c, suite) + 1e-15);
      }
    }
  }
  CHECK_THROWS_AS(weakstar_gap(ms[0], ms[1], {}), InputError);
}

TEST_CASE("probe suites") {
  const auto standard = probe_suite(SuiteKind::standard, {0, 1});
  CHECK(standard.size() == 10);
  double worst = 0.0;
  for (const auto& t : standard) {
    REQUIRE(t.lipschitz);
    worst = std::max(worst, *t.lipschitz);
  }
  CHECK(worst == 6.0);
  CHECK(probe_suite(SuiteKind::monomial, {0, 1}).size() == 7);
  CHECK(probe_suite(SuiteKind::trig, {0, 1}).size() == 4);
  CHECK(parse_suite_kind("trig") == SuiteKind::trig);
  CHECK_THROWS_AS(parse_suite_kind("nope"), InputError);
}

TEST_CASE("test function checks") {
  CHECK_THROWS_AS(TestFunction::parse("log(s)").check_continuous_on({0, 1}), InputError);
  CHECK_NOTHROW(TestFunction::parse("log(s)").check_continuous_on({1, 2}));
  CHECK_THROWS_AS(TestFunction::parse("x*s"), ParseError);
  const TestFunction p = make_functional_probe("s", "x", "", 1, 1);
  CHECK(p.x_dependent());
  CHECK_THROWS_AS(integrate_test(identity_density(), p), InputError);
}

TEST_CASE("compensated mean") {
  std::vector<double> v(1000001, 0.1);
  v[0] = 1e10;
  const double want = (1e10 + 1e6 * 0.1) / 1000001.0;
  CHECK(std::abs(sample_mean(v) - want) / want <= 1e-15);
}

TEST_CASE("point mass and uniform examples") {
  const YoungMeasure d3 = DiracMixture::point_mass(3.0);
  CHECK(integrate_test(d3, TestFunction::parse("s^2")) == 9.0);
  CHECK(cdf(d3, 2.0) == 0.0);
  CHECK(cdf(d3, 3.0) == 1.0);
  const YoungMeasure uniform = identity_density();
  CHECK(std::abs(integrate_test(uniform, TestFunction::parse("s")) - 0.5) <= 1e-12);
  CHECK(std::abs(cdf(uniform, 0.25) - 0.25) <= 1e-12);
  const auto suite = std::vector<TestFunction>{TestFunction::parse("s")};
  CHECK(weakstar_gap(DiracMixture::point_mass(0.0), DiracMixture::point_mass(1.0), suite) == 1.0);
  CHECK(weakstar_gap(d3, d3, probe_suite(SuiteKind::trig, {0, 5})) == 0.0);
}

TEST_CASE("harmonic density mass") {
  const auto f = harmonic_staircase(64).function;
  const DensityTable t =
      pushforward_density(f, make_density_grid({0, 1}, 4096, density_breakpoints(f)));
  // Oracle: piece n carries mass 1/(n-1) - 1/n.
  double mass = 0.0;
  for (int n = 2; n <= 64; ++n) mass += 1.0 / (n - 1) - 1.0 / n;
  const YoungMeasure m = t;
  CHECK(std::abs(integrate_test(m, TestFunction::parse("1")) - mass) <= 1e-6);
  CHECK(std::abs(cdf(m, 1.0) - (1.0 - 1.0 / 64)) <= 1e-6);
  CHECK(std::abs(total_mass(m) - t.trapezoid_integral()) <= 1e-12);
}

TEST_CASE("constant test function returns total mass") {
  for (const auto& m : sample_measures()) {
    CHECK(std::abs(integrate_test(m, TestFunction::parse("1")) - total_mass(m)) <= 1e-12);
  }
  CHECK(total_mass(sample_measures()[0]) == 1.0);
  CHECK(total_mass(sample_measures()[2]) == 1.0);
}

TEST_CASE("empirical integral is the sample mean") {
  const EmpiricalMeasure e = empirical_measure(fixtures::folded(), 20000, 5);
  const TestFunction t = TestFunction::parse("cos(pi*s)");
  std::vector<double> v;
  for (double s : e.samples) v.push_back(t.beta.evaluate(s));
  CHECK(integrate_test(YoungMeasure(e), t) == sample_mean(v));
}

TEST_CASE("measure JSON export") {
  const auto j = measure_to_json(DiracMixture(1, {0.0, 1.0}, {0.25, 0.75}));
  CHECK(j["variant"] == "atoms");
  CHECK(j["atoms"][1]["weight"] == 0.75);
  const auto d = measure_to_json(identity_density());
  CHECK(d["variant"] == "density");
  CHECK(d["grid"].size() == 4096);
  CHECK(d["tail_bound"] == 0.0);
  const auto e = measure_to_json(empirical_measure(fixtures::identity(), 10, 77));
  CHECK(e["variant"] == "empirical");
  CHECK(e["seed"] == 77);
  CHECK(e["samples"].size() == 10);
}
