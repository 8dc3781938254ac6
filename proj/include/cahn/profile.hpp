#pragma once

// Heteroclinic transition profile z: [0, T] -> [alpha, b] solving
//   z' = sqrt(W(z)),  z(0) = alpha,
// tabulated on a graded ladder of values and interpolated with cubic
// Hermite pieces whose endpoint slopes are the exact ODE slopes.  Because
// the well is subquadratic the profile reaches b at a finite hitting time.

#include <cmath>
#include <utility>
#include <vector>

#include "cahn/errors.hpp"
#include "cahn/interpolate.hpp"
#include "cahn/potential.hpp"

namespace cahn {

struct TransitionProfile {
  double alpha = 0.0;
  double well_b = 1.0;
  double hitting_time = 0.0;   // time at which the profile arrives at b
  double tail_integral = 0.0;  // ∫_0^T dist(z(s), b) ds
  double tail_integral_alt = 0.0;  // same value via ∫_0^T 2 W(z(s)) s ds
  CubicHermiteTable table;         // s -> z(s) on [0, hitting_time]

  double eval(double s) const {
    if (s < 0) throw DomainError("TransitionProfile::eval: negative time");
    if (s >= hitting_time) return well_b;
    return std::min(table.eval(s), well_b);
  }

  double eval_deriv(double s) const {
    if (s < 0) throw DomainError("TransitionProfile::eval_deriv: negative time");
    if (s >= hitting_time) return 0.0;
    return std::max(table.eval_deriv(s), 0.0);
  }
};

namespace detail {

// Emit knots of (value, travel time from the previous knot), splitting in
// value until each piece is short enough in time.  Near the start the cap
// is graded down to a fraction of the elapsed time: a profile leaving a
// well goes like t^(2/(1-q)), whose higher derivatives blow up at t = 0
// unless the exponent happens to be an integer, so the first pieces must
// shrink geometrically.  t_acc accumulates the travel time emitted so far.
inline void subdivide_by_time(const DoubleWell& well, double z_lo, double z_hi,
                              double time_cap, double gap_floor, double& t_acc,
                              std::vector<double>& zs, std::vector<double>& dts) {
  const double dt = psi_integral(well, z_lo, z_hi);
  const double local_cap =
      std::min(time_cap, std::max(time_cap / 1024.0, 0.3 * t_acc));
  if (dt <= local_cap || z_hi - z_lo <= gap_floor) {
    zs.push_back(z_hi);
    dts.push_back(dt);
    t_acc += dt;
    return;
  }
  const double mid = 0.5 * (z_lo + z_hi);
  subdivide_by_time(well, z_lo, mid, time_cap, gap_floor, t_acc, zs, dts);
  subdivide_by_time(well, mid, z_hi, time_cap, gap_floor, t_acc, zs, dts);
}

}  // namespace detail

// Value ladder from alpha up to b: `resolution` uniform steps, a geometric
// cascade of gaps under b (the arrival region carries its own knots), then
// each piece split further until no piece takes longer than
// hitting_time / resolution to traverse.
inline TransitionProfile build_profile(const DoubleWell& well, double alpha,
                                       int resolution = 800) {
  if (resolution < 8) throw ConfigError("build_profile: resolution must be >= 8");
  if (!(alpha >= well.a && alpha <= well.b)) {
    throw DomainError("build_profile: alpha outside the well interval");
  }
  TransitionProfile p;
  p.alpha = alpha;
  p.well_b = well.b;
  if (alpha == well.b) {  // already at the target well: constant profile
    p.table = CubicHermiteTable{{0.0}, {well.b}, {0.0}};
    return p;
  }

  const double b = well.b;
  const double span = b - alpha;
  const double step = span / resolution;
  const double gap_min = 1e-13 * (well.b - well.a);

  std::vector<double> base;
  base.reserve(resolution + 64);
  for (int k = 0; k < resolution; ++k) base.push_back(alpha + k * step);
  for (double gap = step / 2; gap > gap_min; gap /= 2) base.push_back(b - gap);
  base.push_back(b);

  const double total_time = psi_integral(well, alpha, b);
  const double time_cap = total_time / resolution;

  std::vector<double> z{alpha}, dt{0.0};
  double t_acc = 0.0;
  for (size_t k = 0; k + 1 < base.size(); ++k) {
    detail::subdivide_by_time(well, base[k], base[k + 1], time_cap, gap_min, t_acc,
                              z, dt);
  }
  const size_t n = z.size();

  std::vector<double> t(n, 0.0), dz(n, 0.0);
  for (size_t k = 1; k < n; ++k) t[k] = t[k - 1] + dt[k];
  for (size_t k = 0; k < n; ++k) dz[k] = std::sqrt(well.w(z[k]));
  p.hitting_time = t[n - 1];
  p.table = make_monotone_hermite(t, std::vector<double>(z), std::move(dz));

  // Distance-to-arrival per knot, accumulated from the top so values near b
  // stay accurate.
  std::vector<double> dist(n, 0.0);
  for (size_t k = n - 1; k-- > 0;) {
    dist[k] = dist[k + 1] + geodesic_distance(well, z[k], z[k + 1]);
  }

  // Tail in two forms.  Both integrands are tabulated with exact values and
  // exact derivatives at the knots, so the corrected trapezoid is the exact
  // integral of their Hermite models:
  //   phi(s) = dist(z(s), b),        phi' = -2 W(z)
  //   psi(s) = 2 W(z(s)) s,          psi' = 2 W'(z) z' s + 2 W(z)
  double tail = 0.0, tail_alt = 0.0;
  for (size_t k = 0; k + 1 < n; ++k) {
    const double h = t[k + 1] - t[k];
    const double w0 = well.w(z[k]), w1 = well.w(z[k + 1]);
    const double phi0 = dist[k], phi1 = dist[k + 1];
    const double dphi0 = -2.0 * w0, dphi1 = -2.0 * w1;
    const double psi0 = 2.0 * w0 * t[k], psi1 = 2.0 * w1 * t[k + 1];
    const double dpsi0 = 2.0 * well.dw(z[k]) * p.table.dy[k] * t[k] + 2.0 * w0;
    const double dpsi1 = 2.0 * well.dw(z[k + 1]) * p.table.dy[k + 1] * t[k + 1] + 2.0 * w1;
    tail += h * (phi0 + phi1) / 2 + h * h * (dphi0 - dphi1) / 12;
    tail_alt += h * (psi0 + psi1) / 2 + h * h * (dpsi0 - dpsi1) / 12;
  }
  p.tail_integral = tail;
  p.tail_integral_alt = tail_alt;
  return p;
}

// The same tail value by nested quadrature in value space,
//   ∫_alpha^b 2 sqrt(W(z)) * time_to_reach(z) dz,
// independent of the knot ladder.  Slow; meant as an oracle.
inline double tail_integral_by_value_quadrature(const DoubleWell& well,
                                                double alpha,
                                                double rel_tol = 1e-10) {
  if (alpha == well.b) return 0.0;
  auto f = [&](double zv) {
    return 2.0 * std::sqrt(well.w(zv)) * psi_integral(well, alpha, zv, 1e-11);
  };
  return integrate_adaptive<double>(f, alpha, well.b, rel_tol);
}

}  // namespace cahn
