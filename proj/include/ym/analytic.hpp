#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ym/domain.hpp"

namespace ym {

// Finite convex combination of point masses sum_i w_i delta_{p_i} on R^l.
// Locations are stored flat (atom_count * dimension) and sorted
// lexicographically; equal locations are merged.
class DiracMixture {
 public:
  // Sorts, merges duplicates and drops zero weights. Throws InputError on
  // negative or non-finite weights.
  DiracMixture(int dimension, std::vector<double> locations,
               std::vector<double> weights);
  static DiracMixture point_mass(double p) { return DiracMixture(1, {p}, {1.0}); }

  int dimension() const { return dimension_; }
  std::size_t size() const { return weights_.size(); }
  std::span<const double> location(std::size_t i) const {
    return {locations_.data() + i * dimension_,
            static_cast<std::size_t>(dimension_)};
  }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& locations() const { return locations_; }
  double total_mass() const;

 private:
  int dimension_;
  std::vector<double> locations_;
  std::vector<double> weights_;
};

// Point values of a 1D density on an increasing grid.
struct DensityTable {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<std::size_t> contributing_counts;
  double domain_measure = 1.0;
  double tail_bound = 0.0;  // tail_mass / M

  std::size_t size() const { return grid.size(); }
  double trapezoid_integral() const;
  // Trapezoid integral of g over [grid.front(), min(y, grid.back())].
  double integral_up_to(double y) const;
  // Crude trapezoid error estimate: per interval the smaller of
  // h^3/12 * |g''| (second divided differences) and h * |delta g| / 2.
  double quadrature_tolerance() const;
};

// Simple function -> sum (m_i / M) delta_{p_i}. Requires every forward
// expression constant and tail_mass = 0.
DiracMixture simple_young_measure(const PiecewiseFunction& f);

// Preimage of y on a 1D piece, or nullopt when y lies outside the piece's
// closed image. Uses the supplied inverse if any, else bisection on a
// monotone piece.
std::optional<double> invert_piece(const Piece& piece, double y);

// |J_{f_i^{-1}}(y)|: the supplied jacobian_inverse, else 1/|f'(x*)| by
// central difference with step 1e-6 * piece width. Throws
// DerivativeTooSmall when |f'| <= 1e-10.
double jacobian_inverse_magnitude(const Piece& piece, double y);

// Closed image interval of a 1D invertible piece.
Interval piece_image(const Piece& piece);
bool piece_increasing(const Piece& piece);

// g(y) = (1/M) sum over pieces whose image contains y of |J_{f_i^{-1}}(y)|.
DensityTable pushforward_density(const PiecewiseFunction& f,
                                 std::span<const double> grid);

// Image endpoints of all pieces strictly inside the codomain: the places
// where the density may jump.
std::vector<double> density_breakpoints(const PiecewiseFunction& f);

// Uniform grid of `size` points over [lo, hi] in which every breakpoint b is
// replaced by the pair b - eps, b + eps (eps = 1e-9 * (hi - lo)), so the
// grid never lands on a breakpoint and trapezoid quadrature sees each jump
// inside a cell of width 2 eps.
std::vector<double> make_density_grid(Interval range, std::size_t size,
                                      std::span<const double> breakpoints);

struct ProbabilityEstimate {
  double value = 0.0;
  double tail_bound = 0.0;  // the true probability lies within +- this
};

// (1/M) |f^{-1}(C)| for C a union of closed intervals. Constant pieces are
// handled in any dimension; other pieces must be 1D and invertible.
ProbabilityEstimate pushforward_probability(const PiecewiseFunction& f,
                                            std::vector<Interval> set);

// The same computation with piece images cached, for repeated queries. A
// piece whose whole image lies in C contributes its measure without any
// inversion. Safe to call concurrently. Holds pointers into f.
class PushforwardCdf {
 public:
  explicit PushforwardCdf(const PiecewiseFunction& f);

  ProbabilityEstimate probability(std::vector<Interval> set) const;
  // (1/M) |{f <= y}|, excluding the tail.
  double operator()(double y) const;

 private:
  struct Entry {
    const Piece* piece;
    double measure;
    bool constant;
    double value;     // constant pieces
    Interval image;   // others
    bool increasing;
  };

  double covered_measure(const std::vector<Interval>& merged) const;

  std::vector<Entry> entries_;
  double domain_measure_;
  double tail_mass_;
};

// The staircase f(x) = sum_{n>=2} (n x - 1) on (1/n, 1/(n-1)), truncated
// after piece N; the remaining (0, 1/N) is tail.
struct HarmonicStaircase {
  PiecewiseFunction function;
  int truncation;

  // Density of the truncated family: H_m - 1 on [1/m, 1/(m-1)) for m <= N,
  // and H_N - 1 on [0, 1/N). Zero outside [0, 1). Right-continuous, so it
  // can differ from pushforward_density (closed images) at breakpoints.
  double reference_density(double y) const;
};

HarmonicStaircase harmonic_staircase(int truncation);

double harmonic_number(int n);

void write_density_csv(std::ostream& out, const DensityTable& table);

}  // namespace ym
