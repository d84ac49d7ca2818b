#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ym/domain.hpp"
#include "ym/empirical.hpp"
#include "ym/measure.hpp"

namespace ym {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED000000000001ull;

// n points uniform on the domain, flattened (n * d). Draw i uses lanes
// 0..d of CounterStream(seed) at index i: lane 0 picks a box with
// probability proportional to its volume, lanes 1..d place the point inside
// it. Point i therefore depends only on (seed, i).
std::vector<double> sample_uniform(const Domain& domain, std::size_t n,
                                   std::uint64_t seed);

// Sorted samples of f(U) for a function with 1D values. Throws
// NumericalError when no draw lands inside a piece.
EmpiricalMeasure empirical_measure(const PiecewiseFunction& f, std::size_t n,
                                   std::uint64_t seed);

// Two-sided one-sample statistic sup_i max(|i/n - F(y_i)|, |(i-1)/n - F(y_i)|).
// reference_cdf is called concurrently and must be thread-safe.
double ks_statistic(const EmpiricalMeasure& e,
                    const std::function<double(double)>& reference_cdf);

enum class EstimateMethod { monte_carlo, quadrature };

struct FunctionalEstimate {
  double value = 0.0;
  double standard_error = 0.0;  // sample sd / sqrt(n) for Monte Carlo, 0 otherwise
  std::size_t n = 0;
  std::uint64_t seed = 0;
  EstimateMethod method = EstimateMethod::monte_carlo;
  std::size_t rejected = 0;             // draws outside every piece
  std::size_t evaluation_failures = 0;  // draws where psi/w failed
  double tolerance = 0.0;               // quadrature: |T_n - T_{n/2}| / 3
};

// Estimates the Lebesgue integral over the covered part of the domain of
// psi(x, f(x)) * w(x) (psi defaults to beta(s), w to 1) as the mean of
// M * psi * w over n uniform draws; uncovered draws contribute 0. More than
// 0.1% evaluation failures abort with NumericalError.
FunctionalEstimate young_functional_mc(const PiecewiseFunction& f,
                                       const TestFunction& t, std::size_t n,
                                       std::uint64_t seed);

// Same integral by composite trapezoid with `subdivisions` intervals per
// piece. 1D domains only.
FunctionalEstimate young_functional_quadrature(const PiecewiseFunction& f,
                                               const TestFunction& t,
                                               std::size_t subdivisions);

const char* method_name(EstimateMethod m);

}  // namespace ym
