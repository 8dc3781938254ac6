#pragma once

// Small fitting kit for the sweep harnesses: straight-line least squares,
// log-log decay orders, and Richardson extrapolation of eps-indexed values.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "cahn/errors.hpp"

namespace cahn {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw DomainError("fit_line: x and y sizes differ");
  if (n < 2) throw DomainError("fit_line: needs at least two points");
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) { xm += x[i]; ym += y[i]; }
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
    syy += (y[i] - ym) * (y[i] - ym);
  }
  if (!(sxx > 0.0)) throw NumericsError("fit_line: degenerate abscissa spread");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  // all-equal ordinates fit exactly; guard the 0/0
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

// Log-log slope of |err| against eps: the apparent decay order of a sweep.
inline double fit_decay_order(const std::vector<double>& eps,
                              const std::vector<double>& err) {
  if (eps.size() != err.size()) throw DomainError("fit_decay_order: size mismatch");
  std::vector<double> lx, ly;
  lx.reserve(eps.size());
  ly.reserve(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw DomainError("fit_decay_order: eps must be positive");
    if (!(std::abs(err[i]) > 0.0)) {
      throw DomainError("fit_decay_order: zero error value, order undefined");
    }
    lx.push_back(std::log(eps[i]));
    ly.push_back(std::log(std::abs(err[i])));
  }
  return fit_line(lx, ly).slope;
}

// Extrapolation of v(eps) = L + c eps^p from a decreasing eps sweep.  The
// order is assumed (default 1); the fitted order from the last three points
// is reported, and takes over whenever it disagrees with the assumption by
// more than 20%.  A non-monotone tail cannot be extrapolated honestly, so it
// only raises a flag and returns the finest value.
struct Extrapolation {
  double limit = 0.0;
  double assumed_order = 1.0;
  double fitted_order = std::numeric_limits<double>::quiet_NaN();
  bool order_trusted = true;  // fitted order within 20% of assumed (or unfittable)
  bool monotone = true;       // successive differences kept one sign
};

namespace detail {

inline double two_point_limit(double e0, double v0, double e1, double v1, double p) {
  // v = L + c e^p through (e0,v0), (e1,v1) with e1 < e0
  const double w0 = std::pow(e0, p), w1 = std::pow(e1, p);
  return v1 - w1 * (v1 - v0) / (w1 - w0);
}

}  // namespace detail

inline Extrapolation richardson_extrapolate(const std::vector<double>& eps,
                                            const std::vector<double>& values,
                                            double assumed_order = 1.0) {
  const std::size_t n = eps.size();
  if (n != values.size()) throw DomainError("richardson_extrapolate: size mismatch");
  if (n < 2) throw DomainError("richardson_extrapolate: needs at least two points");
  if (!(assumed_order > 0.0)) {
    throw DomainError("richardson_extrapolate: order must be positive");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(eps[i] > eps[i + 1]) || !(eps[i + 1] > 0.0)) {
      throw DomainError("richardson_extrapolate: eps must decrease and stay positive");
    }
  }

  Extrapolation out;
  out.assumed_order = assumed_order;

  for (std::size_t i = 2; i < n && out.monotone; ++i) {
    const double d0 = values[i - 1] - values[i - 2];
    const double d1 = values[i] - values[i - 1];
    if (d0 * d1 < 0.0) out.monotone = false;  // strict flip; exact ties are stationary
  }
  if (!out.monotone) {
    out.limit = values.back();
    out.order_trusted = false;
    return out;
  }

  if (n >= 3) {
    const double d0 = values[n - 2] - values[n - 3];
    const double d1 = values[n - 1] - values[n - 2];
    // (v_{k-1}-v_{k-2})/(v_k-v_{k-1}) = (e_{k-2}/e_{k-1})^p for constant ratio
    if (d1 != 0.0 && d0 / d1 > 0.0) {
      out.fitted_order = std::log(d0 / d1) / std::log(eps[n - 3] / eps[n - 2]);
      out.order_trusted =
          std::abs(out.fitted_order - assumed_order) <= 0.2 * std::abs(assumed_order);
    }
  }

  const double p = out.order_trusted || std::isnan(out.fitted_order) ||
                           !(out.fitted_order > 0.0)
                       ? assumed_order
                       : out.fitted_order;
  out.limit = detail::two_point_limit(eps[n - 2], values[n - 2], eps[n - 1],
                                      values[n - 1], p);
  return out;
}

}  // namespace cahn
