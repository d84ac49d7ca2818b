#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <span>

#include "ym/analytic.hpp"
#include "ym/empirical.hpp"

namespace ym {

// Minimal deterministic SVG output; the same input always gives the same
// bytes.

// Density polyline with a tick at every breakpoint.
void plot_density_svg(std::ostream& out, const DensityTable& table,
                      std::span<const double> breakpoints);

// Histogram of the samples (density-normalized, `bins` bins), optionally
// overlaid with a reference density. Throws InputError for an empty sample.
void plot_histogram_svg(std::ostream& out, const EmpiricalMeasure& e,
                        std::size_t bins,
                        const std::function<double(double)>& reference = {});

}  // namespace ym
