#pragma once

// Piecewise cubic Hermite interpolation with prescribed slopes, plus the
// exact integral of the interpolant (corrected trapezoid).  Slopes get the
// Fritsch-Carlson clamp so monotone data produces a monotone interpolant
// even when an exact slope slightly exceeds the safe region.

#include <algorithm>
#include <cmath>
#include <vector>

#include "cahn/errors.hpp"

namespace cahn {

struct CubicHermiteTable {
  std::vector<double> x, y, dy;  // x strictly increasing

  int interval_of(double t) const {
    // rightmost i with x[i] <= t, clamped to a valid interval index
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    int i = static_cast<int>(it - x.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(x.size()) - 2);
  }

  double eval(double t) const {
    if (x.size() == 1) return y[0];
    const int i = interval_of(t);
    const double h = x[i + 1] - x[i];
    const double s = (t - x[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    return y[i] * (2 * s3 - 3 * s2 + 1) + h * dy[i] * (s3 - 2 * s2 + s) +
           y[i + 1] * (-2 * s3 + 3 * s2) + h * dy[i + 1] * (s3 - s2);
  }

  double eval_deriv(double t) const {
    if (x.size() == 1) return 0.0;
    const int i = interval_of(t);
    const double h = x[i + 1] - x[i];
    const double s = (t - x[i]) / h;
    const double s2 = s * s;
    return (y[i] * (6 * s2 - 6 * s) + h * dy[i] * (3 * s2 - 4 * s + 1) +
            y[i + 1] * (-6 * s2 + 6 * s) + h * dy[i + 1] * (3 * s2 - 2 * s)) / h;
  }

  // ∫ H over the full range: sum of h*(y_l+y_r)/2 + h^2*(dy_l-dy_r)/12.
  double integral() const {
    double total = 0.0;
    for (size_t i = 0; i + 1 < x.size(); ++i) {
      const double h = x[i + 1] - x[i];
      total += h * (y[i] + y[i + 1]) / 2 + h * h * (dy[i] - dy[i + 1]) / 12;
    }
    return total;
  }
};

// Build a table from monotone nondecreasing data with prescribed slopes.
// Slopes are clamped into [0, 3 * min(adjacent secants)].
inline CubicHermiteTable make_monotone_hermite(std::vector<double> x,
                                               std::vector<double> y,
                                               std::vector<double> dy) {
  const size_t n = x.size();
  if (n == 0 || y.size() != n || dy.size() != n) {
    throw DomainError("make_monotone_hermite: size mismatch");
  }
  for (size_t i = 0; i + 1 < n; ++i) {
    if (!(x[i] < x[i + 1])) {
      throw DomainError("make_monotone_hermite: x must be strictly increasing");
    }
    if (y[i + 1] < y[i]) {
      throw DomainError("make_monotone_hermite: data must be nondecreasing");
    }
  }
  if (n >= 2) {
    std::vector<double> sec(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) sec[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    for (size_t i = 0; i < n; ++i) {
      const double sl = i > 0 ? sec[i - 1] : sec[0];
      const double sr = i + 1 < n ? sec[i] : sec[n - 2];
      const double cap = 3.0 * std::min(sl, sr);
      dy[i] = std::clamp(dy[i], 0.0, cap);
    }
  }
  return CubicHermiteTable{std::move(x), std::move(y), std::move(dy)};
}

}  // namespace cahn
