#pragma once

// Closed forms worked out by hand for the fixtures, kept free of library
// calls so they can check it.

#include <cmath>

namespace oracle {

inline double harmonic(int n) {
  double h = 0.0;
  for (int k = 1; k <= n; ++k) h += 1.0 / k;
  return h;
}

// Staircase piece n maps (1/n, 1/(n-1)) onto (0, 1/(n-1)) with slope n, so y
// is hit by every piece with n - 1 <= 1/y, each adding 1/n. Images are taken
// closed, so y = 0 sees all pieces and y = 1 sees piece 2.
inline double staircase_density(double y, int truncation) {
  if (y < 0.0 || y > 1.0) return 0.0;
  double g = 0.0;
  for (int n = 2; n <= truncation; ++n) {
    if (y <= 1.0 / (n - 1)) g += 1.0 / n;
  }
  return g;
}

// Untruncated CDF: with m = ceil(1/y), F(y) = y (H_m - 1) + 1/m.
inline double staircase_cdf(double y) {
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  const int m = static_cast<int>(std::ceil(1.0 / y));
  return y * (harmonic(m) - 1.0) + 1.0 / m;
}

// int over piece n of (n x - 1) dx.
inline double staircase_piece_mean(int n) {
  return 1.0 / (2.0 * n * (n - 1.0) * (n - 1.0));
}

}  // namespace oracle
