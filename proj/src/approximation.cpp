#include "ym/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "ym/error.hpp"
#include "ym/parallel.hpp"

namespace ym {

namespace {

constexpr int kMaxLevel = 30;

struct Quantizer {
  double lo;
  double width;
  std::int64_t cells;

  std::int64_t cell(double y) const {
    const double k = std::floor((y - lo) / width);
    if (!(k >= 0)) return 0;
    return std::min<std::int64_t>(static_cast<std::int64_t>(k), cells - 1);
  }
  double boundary(std::int64_t k) const { return lo + width * k; }
};

Quantizer make_quantizer(const PiecewiseFunction& f, int level) {
  if (f.codomain_dimension() != 1) {
    throw InputError("simple approximation needs a 1D codomain");
  }
  if (level < 0 || level > kMaxLevel) {
    throw InputError("approximation level must be in [0, 30]");
  }
  const Interval k = f.codomain().front();
  const std::int64_t cells = std::int64_t{1} << level;
  return {k.lo, k.width() / static_cast<double>(cells), cells};
}

// Calls emit(piece_index, subdomain box, value) for every preimage of a cell.
template <class Emit>
void quantize(const PiecewiseFunction& f, const Quantizer& q, Emit&& emit) {
  const auto& pieces = f.pieces();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Piece& p = pieces[i];
    if (p.is_constant()) {
      emit(i, p.subdomain, q.boundary(q.cell(p.forward[0].evaluate({}))));
      continue;
    }
    if (f.dimension() != 1 || !p.invertible()) {
      throw InputError("piece " + std::to_string(i) +
                       " must be constant, or 1D and monotone/invertible");
    }
    const Interval dom = p.interval();
    const Interval img = piece_image(p);
    const bool increasing = piece_increasing(p);
    const std::int64_t first = q.cell(img.lo);
    const std::int64_t last = q.cell(img.hi);
    // Domain points where f crosses the interior cell boundaries, in the
    // order of increasing y.
    std::vector<double> cuts;
    cuts.reserve(static_cast<std::size_t>(last - first));
    for (std::int64_t k = first + 1; k <= last; ++k) {
      const double c = q.boundary(k);
      const auto x = invert_piece(p, c);
      double xc;
      if (x) {
        xc = *x;
      } else {
        const bool below = std::abs(c - img.lo) <= std::abs(c - img.hi);
        xc = (below == increasing) ? dom.lo : dom.hi;
      }
      cuts.push_back(xc);
    }
    for (std::int64_t k = first; k <= last; ++k) {
      const std::size_t idx = static_cast<std::size_t>(k - first);
      double a, b;
      if (increasing) {
        a = idx == 0 ? dom.lo : cuts[idx - 1];
        b = idx == cuts.size() ? dom.hi : cuts[idx];
      } else {
        a = idx == cuts.size() ? dom.lo : cuts[idx];
        b = idx == 0 ? dom.hi : cuts[idx - 1];
      }
      a = std::clamp(a, dom.lo, dom.hi);
      b = std::clamp(b, dom.lo, dom.hi);
      if (!(b > a)) continue;
      emit(i, Box{{a, b}}, q.boundary(k));
    }
  }
}

}  // namespace

double SimpleFunction::measure(std::size_t i) const {
  double v = 1.0;
  for (const auto& iv : subdomain(i)) v *= iv.width();
  return v;
}

double SimpleFunction::evaluate(std::span<const double> x) const {
  if (dimension_ == 1) {
    auto it = std::upper_bound(order_.begin(), order_.end(), x[0],
                               [&](double v, std::size_t i) {
                                 return v < boxes_[i].lo;
                               });
    if (it != order_.begin()) {
      const std::size_t i = *(it - 1);
      if (boxes_[i].contains_open(x[0])) return pieces_[i].value;
    }
  } else {
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const auto box = subdomain(i);
      bool inside = true;
      for (int c = 0; c < dimension_ && inside; ++c) {
        inside = box[c].contains_open(x[c]);
      }
      if (inside) return pieces_[i].value;
    }
  }
  throw PointNotCovered("point is not inside any piece of the simple function");
}

DiracMixture SimpleFunction::young_measure() const {
  std::vector<double> locations(pieces_.size());
  std::vector<double> weights(pieces_.size());
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    locations[i] = pieces_[i].value;
    weights[i] = measure(i) / domain_measure_;
  }
  return DiracMixture(1, std::move(locations), std::move(weights));
}

SimpleFunction simple_approximation(const PiecewiseFunction& f, int level) {
  const Quantizer q = make_quantizer(f, level);
  SimpleFunction s;
  s.level_ = level;
  s.dimension_ = f.dimension();
  s.cell_width_ = q.width;
  s.domain_measure_ = f.domain().measure();
  s.tail_mass_ = f.tail_mass();
  quantize(f, q, [&](std::size_t parent, const Box& box, double value) {
    s.pieces_.push_back({parent, value});
    s.boxes_.insert(s.boxes_.end(), box.begin(), box.end());
  });
  if (s.dimension_ == 1) {
    s.order_.resize(s.pieces_.size());
    std::iota(s.order_.begin(), s.order_.end(), std::size_t{0});
    std::sort(s.order_.begin(), s.order_.end(),
              [&](std::size_t a, std::size_t b) {
                return s.boxes_[a].lo < s.boxes_[b].lo;
              });
  }
  return s;
}

DiracMixture level_measure(const PiecewiseFunction& f, int level) {
  const Quantizer q = make_quantizer(f, level);
  const double M = f.domain().measure();
  std::vector<double> locations;
  std::vector<double> weights;
  quantize(f, q, [&](std::size_t, const Box& box, double value) {
    locations.push_back(value);
    weights.push_back(volume(box) / M);
  });
  return DiracMixture(1, std::move(locations), std::move(weights));
}

double ApproximationLadder::quantization(int level) const {
  return std::ldexp(diameter(base.codomain()), -level);
}

ApproximationLadder build_ladder(const PiecewiseFunction& f,
                                 const std::vector<int>& levels) {
  std::vector<std::optional<ApproximationLadder::Level>> built(levels.size());
  parallel_for(levels.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SimpleFunction fn = simple_approximation(f, levels[i]);
      DiracMixture nu = fn.young_measure();
      built[i].emplace(ApproximationLadder::Level{levels[i], std::move(fn),
                                                  std::move(nu)});
    }
  }, 1);
  ApproximationLadder ladder{f, {}};
  for (auto& b : built) ladder.levels.push_back(std::move(*b));
  std::sort(ladder.levels.begin(), ladder.levels.end(),
            [](const auto& a, const auto& b) { return a.level < b.level; });
  return ladder;
}

std::vector<ConvergenceRow> convergence_report(
    const PiecewiseFunction& f, std::vector<int> levels,
    const std::vector<TestFunction>& suite, const YoungMeasure& reference) {
  std::sort(levels.begin(), levels.end());
  std::vector<ConvergenceRow> rows(levels.size());
  parallel_for(levels.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const YoungMeasure nu = level_measure(f, levels[i]);
      rows[i] = {levels[i], weakstar_gap(nu, reference, suite),
                 std::get<DiracMixture>(nu).size()};
    }
  }, 1);
  return rows;
}

void write_convergence_csv(std::ostream& out,
                           const std::vector<ConvergenceRow>& rows,
                           const std::vector<std::string>& metadata) {
  for (const auto& line : metadata) out << "# " << line << '\n';
  out << "level,gap,atom_count\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%zu\n", r.level, r.gap,
                  r.atom_count);
    out << buf;
  }
}

}  // namespace ym
