#include "ym/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ym/error.hpp"
#include "ym/philox.hpp"

namespace ym {

double volume(const Box& box) {
  double v = 1.0;
  for (const auto& iv : box) v *= iv.width();
  return v;
}

double overlap_volume(const Box& a, const Box& b) {
  double v = 1.0;
  for (std::size_t k = 0; k < a.size() && k < b.size(); ++k) {
    const double lo = std::max(a[k].lo, b[k].lo);
    const double hi = std::min(a[k].hi, b[k].hi);
    if (!(lo < hi)) return 0.0;
    v *= hi - lo;
  }
  return v;
}

bool contains_open(const Box& box, std::span<const double> x) {
  for (std::size_t k = 0; k < box.size(); ++k) {
    if (!box[k].contains_open(x[k])) return false;
  }
  return true;
}

bool contains_closed(const Box& box, std::span<const double> x, double slack) {
  for (std::size_t k = 0; k < box.size(); ++k) {
    const double tol_lo = slack * (1.0 + std::abs(box[k].lo));
    const double tol_hi = slack * (1.0 + std::abs(box[k].hi));
    if (x[k] < box[k].lo - tol_lo || x[k] > box[k].hi + tol_hi) return false;
  }
  return true;
}

double diameter(const Box& box) {
  double s = 0.0;
  for (const auto& iv : box) s += iv.width() * iv.width();
  return std::sqrt(s);
}

namespace {

void check_box(const Box& box, int d, const std::string& what) {
  if (static_cast<int>(box.size()) != d) {
    throw InputError(what + " has " + std::to_string(box.size()) +
                     " coordinates, expected " + std::to_string(d));
  }
  for (const auto& iv : box) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
      throw InputError(what + " has an empty or unbounded side");
    }
  }
}

}  // namespace

Domain::Domain(int dimension, std::vector<Box> boxes)
    : dimension_(dimension), boxes_(std::move(boxes)), measure_(0.0) {
  if (dimension_ < 1) throw InputError("domain dimension must be positive");
  if (boxes_.empty()) throw InputError("domain needs at least one box");
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    check_box(boxes_[i], dimension_, "domain box " + std::to_string(i));
    for (std::size_t j = 0; j < i; ++j) {
      if (overlap_volume(boxes_[i], boxes_[j]) > 0.0) {
        throw InputError("domain boxes " + std::to_string(j) + " and " +
                         std::to_string(i) + " overlap");
      }
    }
    measure_ += volume(boxes_[i]);
  }
}

bool Piece::is_constant() const {
  return std::all_of(forward.begin(), forward.end(),
                     [](const Expression& e) { return e.is_constant(); });
}

PiecewiseFunction::PiecewiseFunction(Domain domain, std::vector<Piece> pieces,
                                     Box codomain, double tail_mass)
    : domain_(std::move(domain)),
      pieces_(std::move(pieces)),
      codomain_(std::move(codomain)),
      tail_mass_(tail_mass),
      kind_(FunctionKind::simple) {
  const int d = domain_.dimension();
  const int l = static_cast<int>(codomain_.size());
  if (l < 1) throw InputError("codomain box must have at least one side");
  check_box(codomain_, l, "codomain");
  if (!(tail_mass_ >= 0.0) || !std::isfinite(tail_mass_)) {
    throw InputError("tail_mass must be a finite non-negative number");
  }
  if (pieces_.empty()) throw InputError("function needs at least one piece");

  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Piece& p = pieces_[i];
    const std::string name = "piece " + std::to_string(i);
    check_box(p.subdomain, d, name + " subdomain");
    if (static_cast<int>(p.forward.size()) != l) {
      throw InputError(name + " has " + std::to_string(p.forward.size()) +
                       " forward components, codomain has " +
                       std::to_string(l));
    }
    for (const auto& e : p.forward) {
      if (e.empty() || e.max_slot() >= d) {
        throw InputError(name + " forward expression uses unknown variables");
      }
    }
    if (p.inverse) {
      if (static_cast<int>(p.inverse->size()) != d) {
        throw InputError(name + " inverse must have one component per "
                                "domain coordinate");
      }
      for (const auto& e : *p.inverse) {
        if (e.empty() || e.max_slot() >= l) {
          throw InputError(name + " inverse expression uses unknown variables");
        }
      }
    }
    if (p.jacobian_inverse &&
        (p.jacobian_inverse->empty() || p.jacobian_inverse->max_slot() >= l)) {
      throw InputError(name + " jacobian_inverse uses unknown variables");
    }
    if (p.monotone && d != 1) {
      throw InputError(name + ": monotone hint is only meaningful in 1D");
    }
    if (!p.is_constant()) kind_ = FunctionKind::smooth;
  }

  if (d == 1) {
    order_.resize(pieces_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return pieces_[a].interval().lo < pieces_[b].interval().lo;
    });
    sorted_lookup_ = true;
    for (std::size_t k = 0; k < order_.size(); ++k) {
      left_ends_.push_back(pieces_[order_[k]].interval().lo);
      if (k > 0 && pieces_[order_[k - 1]].interval().hi >
                       pieces_[order_[k]].interval().lo) {
        sorted_lookup_ = false;
      }
    }
  }
}

double PiecewiseFunction::covered_measure() const {
  double s = 0.0;
  for (const auto& p : pieces_) s += p.measure();
  return s;
}

std::optional<std::size_t> PiecewiseFunction::locate(
    std::span<const double> x) const {
  if (sorted_lookup_) {
    auto it = std::lower_bound(left_ends_.begin(), left_ends_.end(), x[0]);
    if (it == left_ends_.begin()) return std::nullopt;
    const std::size_t i = order_[static_cast<std::size_t>(
        std::distance(left_ends_.begin(), it) - 1)];
    if (pieces_[i].interval().contains_open(x[0])) return i;
    return std::nullopt;
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (contains_open(pieces_[i].subdomain, x)) return i;
  }
  return std::nullopt;
}

void PiecewiseFunction::evaluate_into(std::span<const double> x,
                                      std::span<double> out) const {
  const auto i = locate(x);
  if (!i) {
    std::ostringstream msg;
    msg << "point (";
    for (std::size_t k = 0; k < x.size(); ++k) msg << (k ? ", " : "") << x[k];
    msg << ") is not inside any piece";
    throw PointNotCovered(msg.str());
  }
  const auto& fwd = pieces_[*i].forward;
  for (std::size_t k = 0; k < fwd.size(); ++k) out[k] = fwd[k].evaluate(x);
}

std::vector<double> PiecewiseFunction::evaluate(
    std::span<const double> x) const {
  std::vector<double> out(codomain_.size());
  evaluate_into(x, out);
  return out;
}

double PiecewiseFunction::evaluate_scalar(double x) const {
  double out = 0.0;
  evaluate_into(std::span(&x, 1), std::span(&out, 1));
  return out;
}

// ---------------------------------------------------------------------------

bool ValidationReport::coverage_ok() const {
  return std::abs(coverage_defect) <=
         kCoverageTolerance * std::max(1.0, domain_measure);
}

bool ValidationReport::ok() const {
  return overlaps.empty() && outside_domain.empty() && coverage_ok() &&
         image_escape_count == 0 && inverse_mismatches.empty() &&
         evaluation_failures.empty();
}

namespace {

// Fixed stream for validation sampling; validation must not depend on the
// user's seed.
constexpr std::uint64_t kValidationSeed = 0x76616C6964617465ull;
constexpr std::size_t kEscapesKeptPerPiece = 4;

}  // namespace

ValidationReport validate_partition(const PiecewiseFunction& f,
                                    std::size_t samples_per_piece) {
  ValidationReport r;
  const auto& pieces = f.pieces();
  const int d = f.dimension();
  const int l = f.codomain_dimension();

  r.domain_measure = f.domain().measure();
  r.covered_measure = f.covered_measure();
  r.tail_mass = f.tail_mass();
  r.coverage_defect = r.domain_measure - r.covered_measure - r.tail_mass;
  r.samples_per_piece = samples_per_piece;

  // Overlaps. In 1D a sweep over pieces sorted by left end suffices.
  if (d == 1) {
    std::vector<std::size_t> order(pieces.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pieces[a].interval().lo < pieces[b].interval().lo;
    });
    for (std::size_t a = 0; a < order.size(); ++a) {
      for (std::size_t b = a + 1; b < order.size(); ++b) {
        if (!(pieces[order[b]].interval().lo < pieces[order[a]].interval().hi))
          break;
        r.overlaps.emplace_back(std::min(order[a], order[b]),
                                std::max(order[a], order[b]));
      }
    }
    std::sort(r.overlaps.begin(), r.overlaps.end());
  } else {
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      for (std::size_t j = i + 1; j < pieces.size(); ++j) {
        if (overlap_volume(pieces[i].subdomain, pieces[j].subdomain) > 0.0) {
          r.overlaps.emplace_back(i, j);
        }
      }
    }
  }

  // Pieces must sit inside the region (possibly straddling adjacent boxes).
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    double inside = 0.0;
    for (const auto& box : f.domain().boxes()) {
      inside += overlap_volume(pieces[i].subdomain, box);
    }
    if (inside < pieces[i].measure() * (1.0 - 1e-12)) {
      r.outside_domain.push_back(i);
    }
  }

  // Image containment and inverse consistency by sampling.
  const CounterStream stream(kValidationSeed);
  std::vector<double> u(d), x(d), y(l), back(d), y2(l);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Piece& p = pieces[i];
    std::size_t kept = 0;
    bool inverse_reported = false;
    for (std::size_t k = 0; k < samples_per_piece; ++k) {
      stream.uniforms(i * samples_per_piece + k, u);
      for (int c = 0; c < d; ++c) {
        // Midpoint-stratified in the first coordinate so that both ends of
        // the piece are probed.
        const double t = c == 0 ? (static_cast<double>(k) + u[c]) /
                                      static_cast<double>(samples_per_piece)
                                : u[c];
        x[c] = p.subdomain[c].lo + t * p.subdomain[c].width();
      }
      try {
        for (int c = 0; c < l; ++c) y[c] = p.forward[c].evaluate(x);
      } catch (const EvaluationError& e) {
        r.evaluation_failures.push_back({i, e.what()});
        break;
      }
      if (!contains_closed(f.codomain(), y, 1e-12)) {
        ++r.image_escape_count;
        if (kept++ < kEscapesKeptPerPiece) r.image_escapes.push_back({i, x, y});
      }
      if (p.inverse && !inverse_reported) {
        try {
          for (int c = 0; c < d; ++c) back[c] = (*p.inverse)[c].evaluate(y);
          double residual = 0.0;
          for (int c = 0; c < l; ++c) {
            y2[c] = p.forward[c].evaluate(back);
            residual = std::max(residual,
                                std::abs(y2[c] - y[c]) / (1.0 + std::abs(y[c])));
          }
          if (residual > ValidationReport::kInverseTolerance) {
            r.inverse_mismatches.push_back({i, y, residual});
            inverse_reported = true;
          }
        } catch (const EvaluationError& e) {
          r.evaluation_failures.push_back(
              {i, std::string("inverse: ") + e.what()});
          inverse_reported = true;
        }
      }
    }
  }
  return r;
}

void require_valid(const PiecewiseFunction& f) {
  const ValidationReport r = validate_partition(f);
  if (r.ok()) return;
  std::ostringstream msg;
  msg << "function failed validation:";
  if (!r.overlaps.empty()) {
    msg << " pieces " << r.overlaps.front().first << " and "
        << r.overlaps.front().second << " overlap;";
  }
  if (!r.outside_domain.empty()) {
    msg << " piece " << r.outside_domain.front() << " leaves the domain;";
  }
  if (!r.coverage_ok()) msg << " coverage defect " << r.coverage_defect << ";";
  if (r.image_escape_count) {
    msg << " " << r.image_escape_count << " sampled values outside codomain;";
  }
  if (!r.inverse_mismatches.empty()) {
    msg << " inverse of piece " << r.inverse_mismatches.front().piece
        << " disagrees with forward;";
  }
  if (!r.evaluation_failures.empty()) {
    msg << " piece " << r.evaluation_failures.front().piece << ": "
        << r.evaluation_failures.front().message << ";";
  }
  throw InputError(msg.str());
}

}  // namespace ym
