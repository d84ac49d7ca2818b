#include <cmath>
#include <cstdlib>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "ym/error.hpp"
#include "ym/monte_carlo.hpp"
#include "ym/philox.hpp"

using namespace ym;

namespace {

// Runs fn with YM_THREADS set, restoring the previous value.
template <class Fn>
auto with_threads(const char* n, Fn&& fn) {
  const char* old = std::getenv("YM_THREADS");
  const std::string saved = old ? old : "";
  setenv("YM_THREADS", n, 1);
  auto result = fn();
  if (old) {
    setenv("YM_THREADS", saved.c_str(), 1);
  } else {
    unsetenv("YM_THREADS");
  }
  return result;
}

}  // namespace

TEST_CASE("philox known answers") {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}) ==
        C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                          K{0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                          K{0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter stream lanes") {
  const CounterStream s(42);
  std::vector<double> lanes(7);
  s.uniforms(123456789, lanes);
  for (std::uint32_t k = 0; k < lanes.size(); ++k) {
    CHECK(lanes[k] == s.uniform(123456789, k));
    CHECK(lanes[k] >= 0.0);
    CHECK(lanes[k] < 1.0);
  }
  CHECK(s.uniform(0, 0) != CounterStream(43).uniform(0, 0));
  CHECK(s.uniform(0, 0) != s.uniform(1, 0));
}

TEST_CASE("uniform points fall in the domain, boxes in proportion") {
  const Domain d(2, {{{0, 1}, {0, 1}}, {{2, 5}, {0, 1}}});
  const auto pts = sample_uniform(d, 40000, 5);
  std::size_t second = 0;
  for (std::size_t i = 0; i < 40000; ++i) {
    const double x = pts[2 * i];
    const double y = pts[2 * i + 1];
    const bool in0 = x >= 0 && x < 1;
    const bool in1 = x >= 2 && x < 5;
    CHECK((in0 || in1));
    CHECK((y >= 0 && y < 1));
    second += in1;
  }
  // 3/4 of the volume; 4 sd of a binomial is about 0.009.
  CHECK(std::abs(second / 40000.0 - 0.75) < 0.01);
}

TEST_CASE("results do not depend on the worker count") {
  const auto f = harmonic_staircase(64).function;
  const auto t = TestFunction::parse("s^2");
  const auto one = with_threads("1", [&] { return empirical_measure(f, 50000, 9); });
  const auto many = with_threads("7", [&] { return empirical_measure(f, 50000, 9); });
  CHECK(one.samples == many.samples);
  CHECK(one.rejected == many.rejected);
  const auto e1 = with_threads("1", [&] { return young_functional_mc(f, t, 50000, 9); });
  const auto e7 = with_threads("7", [&] { return young_functional_mc(f, t, 50000, 9); });
  CHECK(e1.value == e7.value);
  CHECK(e1.standard_error == e7.standard_error);
}

TEST_CASE("staircase tail draws are rejected") {
  const auto e = empirical_measure(harmonic_staircase(64).function, 100000, 1);
  CHECK(e.drawn() == 100000);
  // Binomial(1e5, 1/64): sd about 39.
  CHECK(std::abs(static_cast<double>(e.rejected) - 100000.0 / 64) < 200);
  CHECK(std::is_sorted(e.samples.begin(), e.samples.end()));
}

TEST_CASE("KS statistic") {
  const auto e = empirical_measure(fixtures::identity(), 100000, 2);
  const double d = ks_statistic(e, [](double y) { return std::clamp(y, 0.0, 1.0); });
  CHECK(d < 1.63 / std::sqrt(100000.0));
  const double wrong = ks_statistic(e, [](double y) { return std::clamp(y * y, 0.0, 1.0); });
  CHECK(wrong > 0.2);
  EmpiricalMeasure two;
  two.samples = {0.25, 0.75};
  CHECK(ks_statistic(two, [](double y) { return y; }) == 0.25);
}

TEST_CASE("quadrature functional") {
  const auto est = young_functional_quadrature(fixtures::identity(),
                                               TestFunction::parse("s^2"), 1 << 14);
  CHECK(std::abs(est.value - 1.0 / 3) <= 1e-8);
  CHECK(est.tolerance <= 1e-8);
  CHECK(std::abs(est.value - 1.0 / 3) <= 2 * est.tolerance);
  CHECK(est.method == EstimateMethod::quadrature);

  const auto h = young_functional_quadrature(harmonic_staircase(64).function,
                                             TestFunction::parse("s"), 64);
  double want = 0.0;
  for (int n = 2; n <= 64; ++n) want += oracle::staircase_piece_mean(n);
  CHECK(std::abs(h.value - want) <= 1e-12);

  CHECK_THROWS_AS(young_functional_quadrature(fixtures::identity(),
                                              TestFunction::parse("s"), 3),
                  InputError);
}

TEST_CASE("staircase mean through the density grid") {
  const auto f = harmonic_staircase(64).function;
  const auto grid = make_density_grid({0, 1}, 4096, density_breakpoints(f));
  const YoungMeasure g = pushforward_density(f, grid);
  double want = 0.0;
  for (int n = 2; n <= 64; ++n) want += oracle::staircase_piece_mean(n);
  CHECK(std::abs(integrate_test(g, TestFunction::parse("s")) - want) <= 1e-6);
}

TEST_CASE("weights and Caratheodory integrands") {
  const auto f = fixtures::identity();
  const auto w = make_functional_probe("s", "x", "", 1, 1);
  const auto psi = make_functional_probe("s", "", "x*s", 1, 1);
  for (const auto& t : {w, psi}) {
    const auto q = young_functional_quadrature(f, t, 1 << 12);
    CHECK(std::abs(q.value - 1.0 / 3) <= 1e-7);
    const auto mc = young_functional_mc(f, t, 100000, 17);
    CHECK(std::abs(mc.value - q.value) <= 4 * mc.standard_error);
  }
}

TEST_CASE("Monte Carlo agrees with quadrature across pinned seeds") {
  const auto f = fixtures::folded();
  const auto t = TestFunction::parse("cos(pi*s) + s^3");
  const auto q = young_functional_quadrature(f, t, 1 << 14);
  int agree = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto mc = young_functional_mc(f, t, 10000, seed);
    agree += std::abs(mc.value - q.value) <= 4 * mc.standard_error;
  }
  CHECK(agree >= 19);
}

TEST_CASE("domain measure scaling") {
  // Integral over (1, 2) of x^2 is 7/3; Monte Carlo returns it unnormalized.
  const auto f = fixtures::shifted_square();
  const auto t = TestFunction::parse("s");
  CHECK(std::abs(young_functional_quadrature(f, t, 1 << 12).value - 7.0 / 3) <= 1e-6);
  const auto mc = young_functional_mc(f, t, 100000, 4);
  CHECK(std::abs(mc.value - 7.0 / 3) <= 4 * mc.standard_error);
}

TEST_CASE("integrand failures") {
  const auto f = fixtures::identity();
  const auto bad = make_functional_probe("s", "", "log(x - 0.5)", 1, 1);
  CHECK_THROWS_AS(young_functional_mc(f, bad, 10000, 1), NumericalError);
  CHECK_THROWS_AS(young_functional_quadrature(f, bad, 16), EvaluationError);
}

TEST_CASE("uniform sampler moments and box proportions") {
  const std::size_t n = 1000000;
  const auto xs = sample_uniform(Domain::interval(0, 1), n, kDefaultSeed);
  CHECK(std::abs(sample_mean(xs) - 0.5) <= 5.0 / std::sqrt(12.0) / 1000.0);
  const Domain two(1, {{{0, 1}}, {{2, 3}}});
  const auto ys = sample_uniform(two, n, kDefaultSeed);
  std::size_t first = 0;
  for (double y : ys) first += y < 1.5;
  CHECK(std::abs(static_cast<double>(first) - 0.5 * n) <= 5.0 * std::sqrt(0.25 * n));
  CHECK(sample_uniform(two, 1000, 3) == sample_uniform(two, 1000, 3));
}

TEST_CASE("constant function samples and functionals") {
  const auto f = fixtures::from_json(R"js({
    "dimension": 1, "domain": [[[0, 1]]], "codomain": [[0, 5]],
    "pieces": [{"subdomain": [[0, 1]], "forward": ["1.5"]}]
  })js");
  const auto e = empirical_measure(f, 1000, 1);
  CHECK(e.samples.front() == 1.5);
  CHECK(e.samples.back() == 1.5);
  const auto est = young_functional_mc(f, TestFunction::parse("s^2"), 1000, 1);
  CHECK(est.value == 2.25);
  CHECK(est.standard_error == 0.0);
}

TEST_CASE("KS examples") {
  const std::size_t n = 1000000;
  const auto e = empirical_measure(fixtures::identity(), n, kDefaultSeed);
  CHECK(ks_statistic(e, [](double y) { return std::clamp(y, 0.0, 1.0); }) <=
        1.95 / std::sqrt(static_cast<double>(n)));
  EmpiricalMeasure median;
  median.samples = {0.5};
  CHECK(ks_statistic(median, [](double y) { return y; }) == 0.5);
  EmpiricalMeasure quantiles;
  const int m = 1000;
  for (int i = 1; i <= m; ++i) quantiles.samples.push_back(i / (m + 1.0));
  CHECK(ks_statistic(quantiles, [](double y) { return y; }) <= 1.0 / (m + 1) + 1e-15);
}

TEST_CASE("rejection rate stays within the binomial band") {
  const std::size_t n = 1000000;
  const auto e = empirical_measure(harmonic_staircase(64).function, n, kDefaultSeed);
  const double p = 1.0 / 64;
  CHECK(static_cast<double>(e.rejected) / n <= p + 5.0 * std::sqrt(p / n));
  CHECK(std::abs(static_cast<double>(e.rejected) / n - p) <= 5.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("quadrature examples at 4096 subdivisions") {
  const auto s = TestFunction::parse("s");
  CHECK(std::abs(young_functional_quadrature(fixtures::identity(), s, 4096).value - 0.5) <= 1e-8);
  CHECK(std::abs(young_functional_quadrature(fixtures::square(), s, 4096).value - 1.0 / 3) <= 1e-8);
  const auto j = estimate_to_json(young_functional_quadrature(fixtures::identity(), s, 16));
  CHECK(j["method"] == "quadrature");
  CHECK(j["stderr"] == 0.0);
  CHECK(j.contains("generator"));
}
