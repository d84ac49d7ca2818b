#include "ym/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "ym/error.hpp"
#include "ym/parallel.hpp"

namespace ym {

// ---------------------------------------------------------------------------
// DiracMixture

DiracMixture::DiracMixture(int dimension, std::vector<double> locations,
                           std::vector<double> weights)
    : dimension_(dimension) {
  if (dimension < 1) throw InputError("mixture dimension must be positive");
  const std::size_t n = weights.size();
  if (locations.size() != n * static_cast<std::size_t>(dimension)) {
    throw InputError("mixture locations do not match weights");
  }
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InputError("mixture weights must be finite and non-negative");
    }
  }
  for (double p : locations) {
    if (!std::isfinite(p)) throw InputError("mixture location not finite");
  }

  const auto loc = [&](std::size_t i) {
    return std::span<const double>(locations.data() + i * dimension,
                                   static_cast<std::size_t>(dimension));
  };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto la = loc(a), lb = loc(b);
    return std::lexicographical_compare(la.begin(), la.end(), lb.begin(),
                                        lb.end());
  });

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    if (weights[i] == 0.0) continue;
    const auto li = loc(i);
    if (!weights_.empty() &&
        std::equal(li.begin(), li.end(), locations_.end() - dimension)) {
      weights_.back() += weights[i];
      continue;
    }
    locations_.insert(locations_.end(), li.begin(), li.end());
    weights_.push_back(weights[i]);
  }
}

double DiracMixture::total_mass() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

DiracMixture simple_young_measure(const PiecewiseFunction& f) {
  const auto& pieces = f.pieces();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!pieces[i].is_constant()) {
      throw InputError("function is not simple: piece " + std::to_string(i) +
                       " is not constant");
    }
  }
  if (f.tail_mass() != 0.0) {
    throw InputError("simple Young measure needs tail_mass = 0");
  }
  const int l = f.codomain_dimension();
  const double M = f.domain().measure();
  std::vector<double> locations;
  std::vector<double> weights;
  locations.reserve(pieces.size() * l);
  for (const auto& p : pieces) {
    for (const auto& e : p.forward) locations.push_back(e.evaluate({}));
    weights.push_back(p.measure() / M);
  }
  DiracMixture mix(l, std::move(locations), std::move(weights));
  if (std::abs(mix.total_mass() - 1.0) > ValidationReport::kCoverageTolerance) {
    throw InputError("pieces do not cover the domain (mass " +
                     std::to_string(mix.total_mass()) + ")");
  }
  return mix;
}

// ---------------------------------------------------------------------------
// Piece inversion

namespace {

void require_1d(const Piece& piece) {
  if (piece.subdomain.size() != 1 || piece.forward.size() != 1) {
    throw InputError("operation needs a piece of a 1D function with 1D values");
  }
}

// Forward value at a closed end of the piece. Expressions such as log(x) may
// be undefined exactly at the end, in which case the point is nudged inward.
double forward_at_end(const Piece& piece, double x, double inward) {
  try {
    return piece.forward[0].evaluate(x);
  } catch (const EvaluationError&) {
    return piece.forward[0].evaluate(x + inward);
  }
}

struct Ends {
  double at_lo;
  double at_hi;
};

Ends forward_ends(const Piece& piece) {
  const Interval& iv = piece.interval();
  const double nudge = 1e-12 * iv.width();
  return {forward_at_end(piece, iv.lo, nudge),
          forward_at_end(piece, iv.hi, -nudge)};
}

double image_slack(double y) { return 1e-12 * (1.0 + std::abs(y)); }

}  // namespace

Interval piece_image(const Piece& piece) {
  require_1d(piece);
  if (!piece.invertible() && !piece.is_constant()) {
    throw InputError("piece is neither monotone nor invertible");
  }
  const Ends e = forward_ends(piece);
  return {std::min(e.at_lo, e.at_hi), std::max(e.at_lo, e.at_hi)};
}

bool piece_increasing(const Piece& piece) {
  require_1d(piece);
  const Ends e = forward_ends(piece);
  return e.at_hi >= e.at_lo;
}

std::optional<double> invert_piece(const Piece& piece, double y) {
  require_1d(piece);
  const Interval& iv = piece.interval();

  if (piece.inverse) {
    double x = 0.0;
    try {
      x = piece.inverse->front().evaluate(y);
    } catch (const EvaluationError&) {
      return std::nullopt;
    }
    if (x < iv.lo - image_slack(iv.lo) || x > iv.hi + image_slack(iv.hi)) {
      return std::nullopt;
    }
    return std::clamp(x, iv.lo, iv.hi);
  }

  if (!piece.monotone) {
    throw InputError("piece is not monotone and has no inverse expression");
  }

  const Ends e = forward_ends(piece);
  const double tol = image_slack(y);
  if (y < std::min(e.at_lo, e.at_hi) - tol ||
      y > std::max(e.at_lo, e.at_hi) + tol) {
    return std::nullopt;
  }
  const bool increasing = e.at_hi > e.at_lo;
  double a = iv.lo;
  double b = iv.hi;
  if (std::abs(e.at_lo - y) <= tol) return a;
  if (std::abs(e.at_hi - y) <= tol) return b;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double fm = piece.forward[0].evaluate(m);
    if (std::abs(fm - y) <= tol) return m;
    if ((fm < y) == increasing) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double jacobian_inverse_magnitude(const Piece& piece, double y) {
  constexpr double kMinDerivative = 1e-10;
  if (piece.jacobian_inverse) {
    const double yy[1] = {y};
    return std::abs(piece.jacobian_inverse->evaluate(yy));
  }
  require_1d(piece);
  const auto x = invert_piece(piece, y);
  if (!x) {
    throw InputError("y=" + std::to_string(y) + " is outside the piece image");
  }
  const Interval& iv = piece.interval();
  const double h = 1e-6 * iv.width();
  const auto& f = piece.forward[0];
  double slope = 0.0;
  if (*x - h >= iv.lo && *x + h <= iv.hi) {
    slope = (f.evaluate(*x + h) - f.evaluate(*x - h)) / (2.0 * h);
  } else if (*x - h < iv.lo) {
    // Second-order one-sided difference at the left end.
    slope = (-3.0 * f.evaluate(*x) + 4.0 * f.evaluate(*x + h) -
             f.evaluate(*x + 2.0 * h)) /
            (2.0 * h);
  } else {
    slope = (3.0 * f.evaluate(*x) - 4.0 * f.evaluate(*x - h) +
             f.evaluate(*x - 2.0 * h)) /
            (2.0 * h);
  }
  if (!(std::abs(slope) > kMinDerivative)) {
    throw DerivativeTooSmall(static_cast<std::size_t>(-1), y, std::abs(slope));
  }
  return 1.0 / std::abs(slope);
}

// ---------------------------------------------------------------------------
// Densities

double DensityTable::trapezoid_integral() const {
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    s += 0.5 * (values[j] + values[j + 1]) * (grid[j + 1] - grid[j]);
  }
  return s;
}

double DensityTable::integral_up_to(double y) const {
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    if (grid[j] >= y) break;
    if (grid[j + 1] <= y) {
      s += 0.5 * (values[j] + values[j + 1]) * (grid[j + 1] - grid[j]);
    } else {
      const double t = (y - grid[j]) / (grid[j + 1] - grid[j]);
      const double gy = values[j] + t * (values[j + 1] - values[j]);
      s += 0.5 * (values[j] + gy) * (y - grid[j]);
      break;
    }
  }
  return s;
}

double DensityTable::quadrature_tolerance() const {
  const std::size_t n = grid.size();
  if (n < 3) return 0.0;
  std::vector<double> slope(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    slope[j] = (values[j + 1] - values[j]) / (grid[j + 1] - grid[j]);
  }
  // Second divided difference at interior node k.
  auto second = [&](std::size_t k) {
    return 2.0 * std::abs(slope[k] - slope[k - 1]) / (grid[k + 1] - grid[k - 1]);
  };
  double tol = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double h = grid[j + 1] - grid[j];
    double curvature = 0.0;
    if (j > 0) curvature = std::max(curvature, second(j));
    if (j + 2 < n) curvature = std::max(curvature, second(j + 1));
    const double smooth = h * h * h / 12.0 * curvature;
    const double monotone = 0.5 * h * std::abs(values[j + 1] - values[j]);
    tol += std::min(smooth, monotone);
  }
  return tol;
}

DensityTable pushforward_density(const PiecewiseFunction& f,
                                 std::span<const double> grid) {
  if (f.codomain_dimension() != 1) {
    throw InputError("densities are computed for 1D codomains only");
  }
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (!(grid[j] > grid[j - 1])) {
      throw InputError("density grid must be strictly increasing");
    }
  }
  const auto& pieces = f.pieces();
  const bool one_d = f.dimension() == 1;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Piece& p = pieces[i];
    if (p.is_constant()) {
      throw InputError("piece " + std::to_string(i) +
                       " is constant; its pushforward is an atom, not a density");
    }
    if (one_d ? !p.invertible() : !(p.inverse && p.jacobian_inverse)) {
      throw InputError("piece " + std::to_string(i) +
                       (one_d ? " is neither monotone nor invertible"
                              : " needs inverse and jacobian_inverse"));
    }
  }

  DensityTable t;
  t.grid.assign(grid.begin(), grid.end());
  t.values.assign(grid.size(), 0.0);
  t.contributing_counts.assign(grid.size(), 0);
  t.domain_measure = f.domain().measure();
  t.tail_bound = f.tail_mass() / t.domain_measure;

  const double M = t.domain_measure;
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(f.dimension());
    for (std::size_t j = begin; j < end; ++j) {
      const double y = grid[j];
      double g = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        const Piece& p = pieces[i];
        bool member = false;
        if (one_d) {
          member = invert_piece(p, y).has_value();
        } else {
          try {
            for (std::size_t c = 0; c < x.size(); ++c) {
              x[c] = (*p.inverse)[c].evaluate(y);
            }
            member = contains_closed(p.subdomain, x, 1e-12);
          } catch (const EvaluationError&) {
            member = false;
          }
        }
        if (!member) continue;
        try {
          g += jacobian_inverse_magnitude(p, y);
        } catch (const DerivativeTooSmall& e) {
          throw DerivativeTooSmall(i, y, e.derivative());
        }
        ++count;
      }
      t.values[j] = g / M;
      t.contributing_counts[j] = count;
    }
  }, 256);
  return t;
}

std::vector<double> density_breakpoints(const PiecewiseFunction& f) {
  std::vector<double> out;
  if (f.dimension() != 1 || f.codomain_dimension() != 1) return out;
  const Interval k = f.codomain().front();
  const double margin = 1e-12 * k.width();
  for (const auto& p : f.pieces()) {
    if (p.is_constant() || !p.invertible()) continue;
    const Interval img = piece_image(p);
    for (double b : {img.lo, img.hi}) {
      if (b > k.lo + margin && b < k.hi - margin) out.push_back(b);
    }
  }
  std::sort(out.begin(), out.end());
  std::vector<double> merged;
  for (double b : out) {
    if (merged.empty() || b - merged.back() > 4e-9 * k.width()) {
      merged.push_back(b);
    }
  }
  return merged;
}

std::vector<double> make_density_grid(Interval range, std::size_t size,
                                      std::span<const double> breakpoints) {
  if (!(range.lo < range.hi)) throw InputError("grid range is empty");
  const double span = range.hi - range.lo;
  const double eps = 1e-9 * span;
  std::vector<double> inner;
  for (double b : breakpoints) {
    if (b > range.lo + 3.0 * eps && b < range.hi - 3.0 * eps &&
        (inner.empty() || b - inner.back() > 6.0 * eps)) {
      inner.push_back(b);
    }
  }
  if (size < 2 * inner.size() + 2) {
    throw InputError("grid of " + std::to_string(size) +
                     " points cannot resolve " + std::to_string(inner.size()) +
                     " breakpoints");
  }
  const std::size_t uniform = size - 2 * inner.size();
  std::vector<double> grid;
  grid.reserve(size);
  for (std::size_t j = 0; j < uniform; ++j) {
    double y = j + 1 == uniform
                   ? range.hi
                   : range.lo + span * static_cast<double>(j) /
                                    static_cast<double>(uniform - 1);
    // Keep uniform points clear of the breakpoint pairs.
    auto it = std::lower_bound(inner.begin(), inner.end(), y - 2.0 * eps);
    if (it != inner.end() && std::abs(*it - y) <= 2.0 * eps) {
      y = y >= *it ? *it + 3.0 * eps : *it - 3.0 * eps;
    }
    grid.push_back(y);
  }
  for (double b : inner) {
    grid.push_back(b - eps);
    grid.push_back(b + eps);
  }
  std::sort(grid.begin(), grid.end());
  return grid;
}

// ---------------------------------------------------------------------------
// Probabilities

PushforwardCdf::PushforwardCdf(const PiecewiseFunction& f)
    : domain_measure_(f.domain().measure()), tail_mass_(f.tail_mass()) {
  if (f.codomain_dimension() != 1) {
    throw InputError("probabilities of interval sets need a 1D codomain");
  }
  const auto& pieces = f.pieces();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Piece& p = pieces[i];
    Entry e{&p, p.measure(), true, 0.0, {}, true};
    if (p.is_constant()) {
      e.value = p.forward[0].evaluate({});
    } else {
      if (f.dimension() != 1 || !p.invertible()) {
        throw InputError("piece " + std::to_string(i) +
                         " needs to be 1D and monotone or invertible");
      }
      const Ends ends = forward_ends(p);
      e.constant = false;
      e.increasing = ends.at_hi >= ends.at_lo;
      e.image = {std::min(ends.at_lo, ends.at_hi), std::max(ends.at_lo, ends.at_hi)};
    }
    entries_.push_back(e);
  }
}

double PushforwardCdf::covered_measure(const std::vector<Interval>& merged) const {
  double covered = 0.0;
  for (const Entry& e : entries_) {
    if (e.constant) {
      for (const auto& iv : merged) {
        if (iv.contains_closed(e.value)) {
          covered += e.measure;
          break;
        }
      }
      continue;
    }
    const Interval& dom = e.piece->interval();
    const Interval& img = e.image;
    // Preimage of a value inside the image. Image ends map to domain ends
    // directly; inversion landing a hair outside falls back to the nearer end.
    const auto preimage = [&](double y) {
      const bool low_end = std::abs(y - img.lo) <= std::abs(y - img.hi);
      const double end = (low_end == e.increasing) ? dom.lo : dom.hi;
      if (y == img.lo || y == img.hi) return end;
      if (const auto x = invert_piece(*e.piece, y)) return *x;
      return end;
    };
    for (const auto& iv : merged) {
      const double a = std::max(iv.lo, img.lo);
      const double b = std::min(iv.hi, img.hi);
      if (a > b) continue;
      if (a == img.lo && b == img.hi) {
        covered += e.measure;
      } else {
        covered += std::abs(preimage(b) - preimage(a));
      }
    }
  }
  return covered;
}

ProbabilityEstimate PushforwardCdf::probability(std::vector<Interval> set) const {
  for (const auto& iv : set) {
    if (!(iv.lo <= iv.hi)) throw InputError("interval with lo > hi");
  }
  std::sort(set.begin(), set.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& iv : set) {
    if (!merged.empty() && iv.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  const double p = covered_measure(merged) / domain_measure_;
  return {std::clamp(p, 0.0, 1.0), tail_mass_ / domain_measure_};
}

double PushforwardCdf::operator()(double y) const {
  const std::vector<Interval> below{{-std::numeric_limits<double>::infinity(), y}};
  return std::clamp(covered_measure(below) / domain_measure_, 0.0, 1.0);
}

ProbabilityEstimate pushforward_probability(const PiecewiseFunction& f,
                                            std::vector<Interval> set) {
  return PushforwardCdf(f).probability(std::move(set));
}

// ---------------------------------------------------------------------------
// Harmonic staircase

double harmonic_number(int n) {
  double h = 0.0;
  for (int k = 1; k <= n; ++k) h += 1.0 / k;
  return h;
}

double HarmonicStaircase::reference_density(double y) const {
  if (!(y >= 0.0 && y < 1.0)) return 0.0;
  const double inv = y > 0.0 ? std::ceil(1.0 / y) : truncation;
  const int m = inv > truncation ? truncation : static_cast<int>(inv);
  // Same summation order as the inverse-Jacobian sum over pieces 2..m.
  double g = 0.0;
  for (int k = 2; k <= m; ++k) g += 1.0 / k;
  return g;
}

HarmonicStaircase harmonic_staircase(int truncation) {
  if (truncation < 2) throw InputError("harmonic staircase needs N >= 2");
  const Symbols xs = Symbols::domain(1);
  const Symbols ys = Symbols::indexed("y", 1);
  std::vector<Piece> pieces;
  pieces.reserve(truncation - 1);
  for (int n = 2; n <= truncation; ++n) {
    const std::string ns = std::to_string(n);
    Piece p;
    p.subdomain = {{1.0 / n, 1.0 / (n - 1)}};
    p.forward = {parse_expression(ns + "*x - 1", xs)};
    p.inverse = std::vector{parse_expression("(y + 1)/" + ns, ys)};
    p.jacobian_inverse = parse_expression("1/" + ns, ys);
    p.monotone = true;
    pieces.push_back(std::move(p));
  }
  PiecewiseFunction f(Domain::interval(0.0, 1.0), std::move(pieces),
                      {{0.0, 1.0}}, 1.0 / truncation);
  return {std::move(f), truncation};
}

// ---------------------------------------------------------------------------

void write_density_csv(std::ostream& out, const DensityTable& table) {
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "# domain_measure=%.17g tail_bound=%.17g grid_size=%zu\n",
                table.domain_measure, table.tail_bound, table.size());
  out << buf << "y,g,contributing_pieces\n";
  for (std::size_t j = 0; j < table.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu\n", table.grid[j],
                  table.values[j], table.contributing_counts[j]);
    out << buf;
  }
}

}  // namespace ym
