#include "ym/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ym/error.hpp"
#include "ym/parallel.hpp"
#include "ym/philox.hpp"

namespace ym {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

// Box choice and in-box placement for draw i; see sample_uniform.
class UniformSampler {
 public:
  UniformSampler(const Domain& domain, std::uint64_t seed)
      : domain_(domain), stream_(seed) {
    double acc = 0.0;
    for (const auto& box : domain.boxes()) {
      acc += volume(box);
      cumulative_.push_back(acc);
    }
  }

  void draw(std::uint64_t i, std::span<double> u, std::span<double> x) const {
    stream_.uniforms(i, u);
    const double target = u[0] * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    if (it == cumulative_.end()) --it;
    const Box& box = domain_.boxes()[static_cast<std::size_t>(it - cumulative_.begin())];
    for (std::size_t c = 0; c < x.size(); ++c) {
      x[c] = box[c].lo + u[c + 1] * box[c].width();
    }
  }

 private:
  const Domain& domain_;
  CounterStream stream_;
  std::vector<double> cumulative_;
};

}  // namespace

std::vector<double> sample_uniform(const Domain& domain, std::size_t n,
                                   std::uint64_t seed) {
  const std::size_t d = static_cast<std::size_t>(domain.dimension());
  std::vector<double> points(n * d);
  const UniformSampler sampler(domain, seed);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> u(d + 1);
    for (std::size_t i = begin; i < end; ++i) {
      sampler.draw(i, u, std::span(points.data() + i * d, d));
    }
  });
  return points;
}

EmpiricalMeasure empirical_measure(const PiecewiseFunction& f, std::size_t n,
                                   std::uint64_t seed) {
  if (f.codomain_dimension() != 1) {
    throw InputError("empirical measures are built for 1D codomains");
  }
  const std::size_t d = static_cast<std::size_t>(f.dimension());
  const UniformSampler sampler(f.domain(), seed);
  std::vector<double> values(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> u(d + 1), x(d);
    for (std::size_t i = begin; i < end; ++i) {
      sampler.draw(i, u, x);
      const auto piece = f.locate(x);
      values[i] = piece ? f.pieces()[*piece].forward[0].evaluate(x) : kMissing;
    }
  });

  EmpiricalMeasure e;
  e.seed = seed;
  e.samples.reserve(n);
  for (double v : values) {
    if (std::isnan(v)) {
      ++e.rejected;
    } else {
      e.samples.push_back(v);
    }
  }
  if (e.samples.empty()) {
    throw NumericalError("no sample landed inside a piece (" +
                         std::to_string(n) + " draws)");
  }
  std::sort(e.samples.begin(), e.samples.end());
  return e;
}

double ks_statistic(const EmpiricalMeasure& e,
                    const std::function<double(double)>& reference_cdf) {
  if (e.samples.empty()) throw InputError("KS statistic of an empty sample");
  const std::size_t count = e.samples.size();
  const double n = static_cast<double>(count);
  std::vector<double> gaps(count);
  parallel_for(count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double F = reference_cdf(e.samples[i]);
      const double above = static_cast<double>(i + 1) / n - F;
      const double below = F - static_cast<double>(i) / n;
      gaps[i] = std::max(std::abs(above), std::abs(below));
    }
  });
  return *std::max_element(gaps.begin(), gaps.end());
}

const char* method_name(EstimateMethod m) {
  return m == EstimateMethod::monte_carlo ? "monte-carlo" : "quadrature";
}

namespace {

// psi(x, f(x)) * w(x) with psi defaulting to beta(s) and w to 1.
class Integrand {
 public:
  Integrand(const PiecewiseFunction& f, const TestFunction& t)
      : t_(t), d_(f.dimension()), l_(f.codomain_dimension()) {}

  // args must hold d + l slots; x in the first d.
  double at(const Piece& piece, std::span<double> args) const {
    std::span<const double> x(args.data(), d_);
    for (int c = 0; c < l_; ++c) args[d_ + c] = piece.forward[c].evaluate(x);
    double v = t_.psi ? t_.psi->evaluate(args)
                      : t_.beta.evaluate(std::span<const double>(args.data() + d_, l_));
    if (t_.weight) v *= t_.weight->evaluate(x);
    return v;
  }

  std::size_t slots() const { return static_cast<std::size_t>(d_ + l_); }

 private:
  const TestFunction& t_;
  int d_;
  int l_;
};

}  // namespace

FunctionalEstimate young_functional_mc(const PiecewiseFunction& f,
                                       const TestFunction& t, std::size_t n,
                                       std::uint64_t seed) {
  if (n == 0) throw InputError("sample count must be positive");
  const std::size_t d = static_cast<std::size_t>(f.dimension());
  const double M = f.domain().measure();
  const UniformSampler sampler(f.domain(), seed);
  const Integrand integrand(f, t);
  std::vector<double> values(n);
  std::vector<unsigned char> covered(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> u(d + 1), args(integrand.slots());
    for (std::size_t i = begin; i < end; ++i) {
      sampler.draw(i, u, std::span(args.data(), d));
      const auto piece = f.locate(std::span<const double>(args.data(), d));
      covered[i] = piece.has_value();
      if (!piece) {
        values[i] = 0.0;
        continue;
      }
      try {
        values[i] = M * integrand.at(f.pieces()[*piece], args);
      } catch (const EvaluationError&) {
        values[i] = kMissing;
      }
    }
  });

  FunctionalEstimate est;
  est.seed = seed;
  est.method = EstimateMethod::monte_carlo;
  std::vector<double> kept;
  kept.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!covered[i]) ++est.rejected;
    if (std::isnan(values[i])) {
      ++est.evaluation_failures;
    } else {
      kept.push_back(values[i]);
    }
  }
  if (static_cast<double>(est.evaluation_failures) > 1e-3 * static_cast<double>(n)) {
    throw NumericalError("integrand failed on " +
                         std::to_string(est.evaluation_failures) + " of " +
                         std::to_string(n) + " draws");
  }
  est.n = kept.size();
  est.value = sample_mean(kept);
  if (kept.size() > 1) {
    std::vector<double> sq(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
      const double r = kept[i] - est.value;
      sq[i] = r * r;
    }
    const double nn = static_cast<double>(kept.size());
    const double var = sample_mean(sq) * nn / (nn - 1.0);
    est.standard_error = std::sqrt(var / nn);
  }
  return est;
}

FunctionalEstimate young_functional_quadrature(const PiecewiseFunction& f,
                                               const TestFunction& t,
                                               std::size_t subdivisions) {
  if (f.dimension() != 1) {
    throw InputError("quadrature functional needs a 1D domain");
  }
  if (subdivisions < 2 || subdivisions % 2 != 0) {
    throw InputError("subdivisions must be an even number >= 2");
  }
  const Integrand integrand(f, t);
  std::vector<double> args(integrand.slots());
  double fine = 0.0;
  double coarse = 0.0;
  for (const Piece& p : f.pieces()) {
    const Interval iv = p.interval();
    const double h = iv.width() / static_cast<double>(subdivisions);
    double piece_fine = 0.0;
    double piece_coarse = 0.0;
    for (std::size_t k = 0; k <= subdivisions; ++k) {
      args[0] = k == subdivisions ? iv.hi : iv.lo + h * static_cast<double>(k);
      double v = 0.0;
      try {
        v = integrand.at(p, args);
      } catch (const EvaluationError& e) {
        throw EvaluationError("quadrature node x=" + std::to_string(args[0]) +
                              ": " + e.what());
      }
      const bool end = k == 0 || k == subdivisions;
      piece_fine += end ? 0.5 * v : v;
      if (k % 2 == 0) piece_coarse += end ? 0.5 * v : v;
    }
    fine += piece_fine * h;
    coarse += piece_coarse * 2.0 * h;
  }
  FunctionalEstimate est;
  est.value = fine;
  est.method = EstimateMethod::quadrature;
  est.n = subdivisions;
  est.tolerance = std::abs(fine - coarse) / 3.0;
  return est;
}

}  // namespace ym
