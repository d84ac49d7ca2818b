#include "ym/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ym/error.hpp"

namespace ym {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 40.0;

struct Frame {
  double x0, x1, y1;

  double px(double x) const {
    return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin);
  }
  double py(double y) const {
    return kHeight - kMargin - y / y1 * (kHeight - 2 * kMargin);
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void header(std::ostream& out, const Frame& fr) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << fmt(fr.py(0)) << "\" x2=\""
      << kWidth - kMargin << "\" y2=\"" << fmt(fr.py(0))
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\""
      << kMargin << "\" y2=\"" << fmt(fr.py(0)) << "\" stroke=\"black\"/>\n";
  const double base = kHeight - kMargin + 16;
  out << "<text x=\"" << kMargin << "\" y=\"" << base
      << "\" font-size=\"11\">" << label(fr.x0) << "</text>\n";
  out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << base
      << "\" font-size=\"11\" text-anchor=\"end\">" << label(fr.x1)
      << "</text>\n";
  out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin
      << "\" font-size=\"11\" text-anchor=\"end\">" << label(fr.y1)
      << "</text>\n";
}

void polyline(std::ostream& out, const Frame& fr, std::span<const double> xs,
              std::span<const double> ys, const char* colour) {
  // Non-finite values (e.g. an unbounded density at a critical point) are
  // left out of the line.
  out << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\"";
  bool first = true;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(ys[i])) continue;
    if (!first) out << ' ';
    first = false;
    out << fmt(fr.px(xs[i])) << ',' << fmt(fr.py(std::min(ys[i], fr.y1)));
  }
  out << "\"/>\n";
}

double finite_max(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) {
    if (std::isfinite(x)) m = std::max(m, x);
  }
  return m > 0.0 ? m * 1.05 : 1.0;
}

}  // namespace

void plot_density_svg(std::ostream& out, const DensityTable& table,
                      std::span<const double> breakpoints) {
  if (table.grid.size() < 2) throw InputError("density table is too small to plot");
  const Frame fr{table.grid.front(), table.grid.back(), finite_max(table.values)};
  header(out, fr);
  polyline(out, fr, table.grid, table.values, "steelblue");
  for (double b : breakpoints) {
    if (b < fr.x0 || b > fr.x1) continue;
    const double x = fr.px(b);
    out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(fr.py(0)) << "\" x2=\""
        << fmt(x) << "\" y2=\"" << fmt(fr.py(0) + 6)
        << "\" stroke=\"firebrick\"/>\n";
  }
  out << "</svg>\n";
}

void plot_histogram_svg(std::ostream& out, const EmpiricalMeasure& e,
                        std::size_t bins,
                        const std::function<double(double)>& reference) {
  if (e.samples.empty()) throw InputError("cannot plot an empty sample");
  if (bins == 0) throw InputError("histogram needs at least one bin");
  double lo = e.samples.front();
  double hi = e.samples.back();
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double w = (hi - lo) / static_cast<double>(bins);
  std::vector<double> heights(bins, 0.0);
  for (double s : e.samples) {
    auto k = static_cast<std::size_t>((s - lo) / w);
    heights[std::min(k, bins - 1)] += 1.0;
  }
  const double n = static_cast<double>(e.samples.size());
  for (double& h : heights) h /= n * w;

  std::vector<double> rx, ry;
  if (reference) {
    const std::size_t points = 4 * bins + 1;
    for (std::size_t i = 0; i < points; ++i) {
      const double x = lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(points - 1);
      rx.push_back(x);
      ry.push_back(reference(x));
    }
  }
  const Frame fr{lo, hi, std::max(finite_max(heights), finite_max(ry))};
  header(out, fr);
  for (std::size_t k = 0; k < bins; ++k) {
    const double a = fr.px(lo + w * static_cast<double>(k));
    const double b = fr.px(lo + w * static_cast<double>(k + 1));
    const double top = fr.py(heights[k]);
    out << "<rect x=\"" << fmt(a) << "\" y=\"" << fmt(top) << "\" width=\""
        << fmt(b - a) << "\" height=\"" << fmt(fr.py(0) - top)
        << "\" fill=\"lightsteelblue\" stroke=\"none\"/>\n";
  }
  if (reference) polyline(out, fr, rx, ry, "firebrick");
  out << "</svg>\n";
}

}  // namespace ym
