#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ym/expression.hpp"

namespace ym {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains_open(double x) const { return lo < x && x < hi; }
  bool contains_closed(double x) const { return lo <= x && x <= hi; }
};

// Axis-aligned box, one interval per coordinate. Treated as open unless a
// function says otherwise.
using Box = std::vector<Interval>;

double volume(const Box& box);
double overlap_volume(const Box& a, const Box& b);
bool contains_open(const Box& box, std::span<const double> x);
bool contains_closed(const Box& box, std::span<const double> x, double slack);
double diameter(const Box& box);  // Euclidean length of the diagonal

// Bounded region of R^d: a union of pairwise disjoint open boxes.
class Domain {
 public:
  // Throws InputError on empty/degenerate/overlapping boxes.
  Domain(int dimension, std::vector<Box> boxes);
  static Domain interval(double lo, double hi) { return Domain(1, {{{lo, hi}}}); }

  int dimension() const { return dimension_; }
  const std::vector<Box>& boxes() const { return boxes_; }
  double measure() const { return measure_; }

 private:
  int dimension_;
  std::vector<Box> boxes_;
  double measure_;
};

// One branch f_i of a piecewise function, living on an open box.
//
// forward is written in the domain variables (x / x1..xd), inverse and
// jacobian_inverse in the codomain variables (y / y1..yl).
struct Piece {
  Box subdomain;
  std::vector<Expression> forward;
  std::optional<std::vector<Expression>> inverse;
  std::optional<Expression> jacobian_inverse;
  bool monotone = false;  // 1D only: forward strictly monotone on the piece

  double measure() const { return volume(subdomain); }
  bool is_constant() const;
  bool invertible() const { return monotone || inverse.has_value(); }
  const Interval& interval() const { return subdomain.front(); }
};

enum class FunctionKind { simple, smooth };

class PiecewiseFunction {
 public:
  // Checks shapes and variable usage; partition quality (overlaps, coverage,
  // image containment) is left to validate_partition.
  PiecewiseFunction(Domain domain, std::vector<Piece> pieces, Box codomain,
                    double tail_mass = 0.0);

  const Domain& domain() const { return domain_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const Box& codomain() const { return codomain_; }
  double tail_mass() const { return tail_mass_; }
  FunctionKind kind() const { return kind_; }
  int dimension() const { return domain_.dimension(); }
  int codomain_dimension() const { return static_cast<int>(codomain_.size()); }
  double covered_measure() const;

  // Index of the piece whose open subdomain contains x.
  std::optional<std::size_t> locate(std::span<const double> x) const;

  // Throws PointNotCovered when x is in the tail or on a boundary.
  std::vector<double> evaluate(std::span<const double> x) const;
  void evaluate_into(std::span<const double> x, std::span<double> out) const;
  double evaluate_scalar(double x) const;

 private:
  Domain domain_;
  std::vector<Piece> pieces_;
  Box codomain_;
  double tail_mass_;
  FunctionKind kind_;
  // 1D lookup: piece indices sorted by left endpoint, valid when the
  // intervals are disjoint.
  std::vector<std::size_t> order_;
  std::vector<double> left_ends_;
  bool sorted_lookup_ = false;
};

struct ValidationReport {
  struct ImageEscape {
    std::size_t piece;
    std::vector<double> x;
    std::vector<double> value;
  };
  struct InverseMismatch {
    std::size_t piece;
    std::vector<double> y;
    double residual;
  };
  struct EvaluationFailure {
    std::size_t piece;
    std::string message;
  };

  std::vector<std::pair<std::size_t, std::size_t>> overlaps;
  std::vector<std::size_t> outside_domain;
  double domain_measure = 0.0;
  double covered_measure = 0.0;
  double tail_mass = 0.0;
  double coverage_defect = 0.0;  // M - sum(m_i) - tail_mass
  std::size_t samples_per_piece = 0;
  std::size_t image_escape_count = 0;
  std::vector<ImageEscape> image_escapes;  // first few per piece
  std::vector<InverseMismatch> inverse_mismatches;
  std::vector<EvaluationFailure> evaluation_failures;

  static constexpr double kCoverageTolerance = 1e-9;
  static constexpr double kInverseTolerance = 1e-9;

  bool coverage_ok() const;
  bool ok() const;
};

ValidationReport validate_partition(const PiecewiseFunction& f,
                                    std::size_t samples_per_piece = 1024);

// Throws InputError describing the first problem when the report is not ok.
void require_valid(const PiecewiseFunction& f);

}  // namespace ym
