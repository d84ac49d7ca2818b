#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ym/analytic.hpp"
#include "ym/measure.hpp"

namespace ym {

// Range quantization of a function with 1D values: K = [a, b] is cut into
// 2^L half-open cells of width (b - a) / 2^L (the last one closed) and
// f_L(x) is the lower end of the cell holding f(x). Pieces of f_L are the
// preimages of cells inside each piece of f.
class SimpleFunction {
 public:
  struct Piece {
    std::size_t parent;  // index of the piece of f it was cut from
    double value;
  };

  int level() const { return level_; }
  double cell_width() const { return cell_width_; }
  double tail_mass() const { return tail_mass_; }
  std::size_t size() const { return pieces_.size(); }
  const Piece& piece(std::size_t i) const { return pieces_[i]; }
  std::span<const Interval> subdomain(std::size_t i) const {
    return {boxes_.data() + i * dimension_, static_cast<std::size_t>(dimension_)};
  }
  double measure(std::size_t i) const;

  // Throws PointNotCovered outside every piece.
  double evaluate(std::span<const double> x) const;
  double evaluate(double x) const { return evaluate(std::span(&x, 1)); }

  // sum_i (m_i / M) delta_{value_i}; total mass 1 - tail_mass / M.
  DiracMixture young_measure() const;

 private:
  friend SimpleFunction simple_approximation(const PiecewiseFunction&, int);

  int level_ = 0;
  int dimension_ = 1;
  double cell_width_ = 0.0;
  double domain_measure_ = 1.0;
  double tail_mass_ = 0.0;
  std::vector<Piece> pieces_;
  std::vector<Interval> boxes_;  // dimension_ intervals per piece
  std::vector<std::size_t> order_;  // 1D: pieces sorted by left end
};

// Pieces of f must be constant, or 1D and monotone/invertible.
SimpleFunction simple_approximation(const PiecewiseFunction& f, int level);

// The simple Young measure of f_L without materializing f_L.
DiracMixture level_measure(const PiecewiseFunction& f, int level);

struct ApproximationLadder {
  struct Level {
    int level;
    SimpleFunction function;
    DiracMixture measure;
  };

  PiecewiseFunction base;
  std::vector<Level> levels;

  // Sup-norm bound 2^-L * diam(K) of |f_L - f|.
  double quantization(int level) const;
};

ApproximationLadder build_ladder(const PiecewiseFunction& f,
                                 const std::vector<int>& levels);

struct ConvergenceRow {
  int level;
  double gap;
  std::size_t atom_count;
};

// gap(L) = weakstar_gap(nu_L, reference, suite) for each level, in level
// order.
std::vector<ConvergenceRow> convergence_report(
    const PiecewiseFunction& f, std::vector<int> levels,
    const std::vector<TestFunction>& suite, const YoungMeasure& reference);

void write_convergence_csv(std::ostream& out,
                           const std::vector<ConvergenceRow>& rows,
                           const std::vector<std::string>& metadata);

}  // namespace ym
