#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ym {

// Sorted draws of f(U), U uniform on the domain. Draws that landed in the
// tail or on a piece boundary are counted in `rejected` and excluded.
struct EmpiricalMeasure {
  std::vector<double> samples;
  std::uint64_t seed = 0;
  std::size_t rejected = 0;

  std::size_t size() const { return samples.size(); }
  std::size_t drawn() const { return samples.size() + rejected; }
};

// Compensated (Neumaier) mean. Every sample average in the library goes
// through here so that equal inputs give bitwise-equal means.
double sample_mean(std::span<const double> values);

}  // namespace ym
