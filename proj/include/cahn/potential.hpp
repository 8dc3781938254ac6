#pragma once

// Subquadratic double-well potentials and the metric they induce.
//
// The canonical family is W(s) = scale * |s-a|^(1+q) * |s-b|^(1+q) with
// q in (0,1).  Custom evaluators can be plugged in as long as they share the
// (a, b, q) frame: every grading and growth bound below keys off q, and a
// genuinely quadratic well (exponent 2 at the zeros) is meant to be rejected
// by certify_growth.
//
// Quadrature near a well substitutes u = (rho - well)^((1-q)/2).  That turns
// 1/sqrt(W) into a bounded integrand (the exponents cancel exactly) and
// sqrt(W) into a high-order zero.  The cancellation trap: reconstructing
// rho = well - u^P and re-subtracting loses ~half the digits of the well
// distance, so the transformed integrands work with the exact distance u^P
// and the reduced factor W(rho) / dist^(1+q), never the raw difference.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "cahn/errors.hpp"
#include "cahn/quadrature.hpp"

namespace cahn {

template <class Real>
struct WellFrame {
  Real a, b, q, scale;
};

template <class Real>
Real canonical_w(const WellFrame<Real>& f, Real s) {
  const Real u = std::abs(s - f.a);
  const Real v = std::abs(s - f.b);
  return f.scale * std::pow(u, 1 + f.q) * std::pow(v, 1 + f.q);
}

template <class Real>
Real canonical_dw(const WellFrame<Real>& f, Real s) {
  const Real u = s - f.a;
  const Real v = s - f.b;
  const Real au = std::abs(u), av = std::abs(v);
  if (au == 0 || av == 0) return Real(0);  // one-sided limit, q > 0
  const Real su = u > 0 ? Real(1) : Real(-1);
  const Real sv = v > 0 ? Real(1) : Real(-1);
  return f.scale * (1 + f.q) *
         (su * std::pow(au, f.q) * std::pow(av, 1 + f.q) +
          sv * std::pow(av, f.q) * std::pow(au, 1 + f.q));
}

template <class Real>
Real canonical_ddw(const WellFrame<Real>& f, Real s) {
  const Real u = s - f.a;
  const Real v = s - f.b;
  const Real au = std::abs(u), av = std::abs(v);
  if (au == 0 || av == 0) return std::numeric_limits<Real>::infinity();
  const Real sgn = (u > 0) == (v > 0) ? Real(1) : Real(-1);
  const Real q = f.q;
  return f.scale * (1 + q) *
         (q * std::pow(au, q - 1) * std::pow(av, 1 + q) +
          2 * (1 + q) * sgn * std::pow(au, q) * std::pow(av, q) +
          q * std::pow(av, q - 1) * std::pow(au, 1 + q));
}

// Reduced factor W(well +/- dist) / dist^(1+q) for the canonical family,
// computed without ever forming the cancellation-prone difference.
template <class Real>
Real canonical_w_reduced(const WellFrame<Real>& f, Real /*well*/, Real dist) {
  return f.scale * std::pow((f.b - f.a) - dist, 1 + f.q);
}

struct DoubleWell {
  double a = 0.0;
  double b = 1.0;
  double q = 0.5;
  double scale = 1.0;

  // Optional overrides; empty => canonical family.
  std::function<double(double)> w_fn, dw_fn, ddw_fn;

  static DoubleWell canonical(double a, double b, double q, double scale = 1.0) {
    if (!(a < b)) throw DomainError("DoubleWell: requires a < b");
    if (!(q > 0.0 && q < 1.0)) throw DomainError("DoubleWell: requires q in (0,1)");
    if (!(scale > 0.0)) throw DomainError("DoubleWell: requires scale > 0");
    return DoubleWell{a, b, q, scale, {}, {}, {}};
  }

  WellFrame<double> frame() const { return {a, b, q, scale}; }

  double w(double s) const { return w_fn ? w_fn(s) : canonical_w(frame(), s); }
  double dw(double s) const { return dw_fn ? dw_fn(s) : canonical_dw(frame(), s); }
  double ddw(double s) const { return ddw_fn ? ddw_fn(s) : canonical_ddw(frame(), s); }

  // W(well +/- dist) / dist^(1+q), dist measured toward the interior.
  // Custom evaluators go through the raw division and inherit whatever
  // precision their W carries near the wells.
  double w_reduced(double well, double dist) const {
    if (!w_fn) return canonical_w_reduced(frame(), well, dist);
    if (dist <= 0.0) dist = 1e-300;
    const double rho = well == a ? a + dist : b - dist;
    return w_fn(rho) / std::pow(dist, 1.0 + q);
  }

  // W'' clipped away from the wells; q < 1 makes the raw value blow up there
  // and Newton only needs a large finite curvature.
  double ddw_guarded(double s, double dist_floor = 1e-9) const {
    const double da = s - a, db = b - s;
    double t = s;
    if (std::abs(da) < dist_floor) t = a + (da < 0 ? -dist_floor : dist_floor);
    if (std::abs(db) < dist_floor) t = b - (db < 0 ? -dist_floor : dist_floor);
    return ddw(t);
  }
};

struct GrowthCertificate {
  double sigma;  // two-sided comparison constant, in (0,1)
  double delta;  // neighborhood half-width around each well
  double rho;    // W(b - delta): domain bound for the inverse branch at b
};

namespace detail {

// ∫_lo^hi W^(p/2) drho over one half-interval, graded toward its well.
// p is +1 (for 2 sqrt(W), factor two applied by the caller) or -1.
// Substituting dist = u^P with P = 2/(1-q) gives
//   drho = P u^(P-1) du,  W^(p/2) = u^(p P (1+q)/2) * reduced^(p/2),
// so the total u-exponent is P-1 + p P (1+q)/2, which is exactly 0 for
// p = -1: the singular endpoint disappears analytically.
template <class Real, class Reduced>
Real integrate_power_graded(Reduced&& reduced, Real well, Real q, int p, Real lo,
                            Real hi, bool well_left, Real rel_tol) {
  const Real P = 2 / (1 - q);
  const Real expo = (P - 1) + p * P * (1 + q) / 2;
  const Real dlo = well_left ? lo - well : well - hi;
  const Real dhi = well_left ? hi - well : well - lo;
  const Real ulo = std::pow(dlo, 1 / P);
  const Real uhi = std::pow(dhi, 1 / P);
  auto g = [&](Real u) {
    const Real dist = std::pow(u, P);
    const Real red = reduced(well, dist);
    const Real rpow = p > 0 ? std::sqrt(red) : 1 / std::sqrt(red);
    return P * rpow * (expo == Real(0) ? Real(1) : std::pow(u, expo));
  };
  return integrate_adaptive(g, ulo, uhi, rel_tol);
}

template <class Real, class Reduced>
Real integrate_power_well_aware(Reduced&& reduced, Real a, Real b, Real q, int p,
                                Real r, Real s, Real rel_tol) {
  if (r == s) return Real(0);
  const Real mid = (a + b) / 2;
  Real total = 0;
  const Real lo_a = r, hi_a = std::min(s, mid);
  if (lo_a < hi_a) {
    total += integrate_power_graded(reduced, a, q, p, lo_a, hi_a, true, rel_tol);
  }
  const Real lo_b = std::max(r, mid), hi_b = s;
  if (lo_b < hi_b) {
    total += integrate_power_graded(reduced, b, q, p, lo_b, hi_b, false, rel_tol);
  }
  return total;
}

}  // namespace detail

// ∫_r^s 2 sqrt(W), r <= s, both in [a,b].  Building block for the metric.
// reduced(well, dist) must return W(well +/- dist) / dist^(1+q).
template <class Real, class Reduced>
Real integral_two_sqrt_w(Reduced&& reduced, Real a, Real b, Real q, Real r, Real s,
                         Real rel_tol = Real(1e-12)) {
  return 2 * detail::integrate_power_well_aware(reduced, a, b, q, +1, r, s, rel_tol);
}

// ∫_r^s 1 / sqrt(W), r <= s, both in [a,b].  Finite for q < 1 even when an
// endpoint sits at a well.
template <class Real, class Reduced>
Real integral_inv_sqrt_w(Reduced&& reduced, Real a, Real b, Real q, Real r, Real s,
                         Real rel_tol = Real(1e-12)) {
  return detail::integrate_power_well_aware(reduced, a, b, q, -1, r, s, rel_tol);
}

// Geodesic distance d_W(r,s) = |∫_r^s 2 sqrt(W)|.
inline double geodesic_distance(const DoubleWell& W, double r, double s,
                                double rel_tol = 1e-12) {
  if (r < W.a || r > W.b || s < W.a || s > W.b) {
    throw DomainError("geodesic_distance: arguments must lie in [a,b]");
  }
  const double lo = std::min(r, s), hi = std::max(r, s);
  auto reduced = [&](double well, double dist) { return W.w_reduced(well, dist); };
  return integral_two_sqrt_w(reduced, W.a, W.b, W.q, lo, hi, rel_tol);
}

// Signed transition time integral ∫_r^s 1/sqrt(W).
inline double psi_integral(const DoubleWell& W, double r, double s,
                           double rel_tol = 1e-12) {
  if (r < W.a || r > W.b || s < W.a || s > W.b) {
    throw DomainError("psi_integral: arguments must lie in [a,b]");
  }
  auto reduced = [&](double well, double dist) { return W.w_reduced(well, dist); };
  if (r <= s) return integral_inv_sqrt_w(reduced, W.a, W.b, W.q, r, s, rel_tol);
  return -integral_inv_sqrt_w(reduced, W.a, W.b, W.q, s, r, rel_tol);
}

// Monotone solve of W(x) = t on [b-delta, b]; W restricted there must be
// decreasing (checked coarsely).  Safeguarded Newton, |bracket| <= x_tol.
inline double well_inverse(const DoubleWell& W, double t, double delta,
                           double x_tol = 1e-13) {
  if (!(delta > 0.0) || delta >= W.b - W.a) {
    throw DomainError("well_inverse: delta outside (0, b-a)");
  }
  const double lo = W.b - delta, hi = W.b;
  const double rho = W.w(lo);
  if (t < 0.0 || t > rho) throw DomainError("well_inverse: t outside [0, rho]");
  for (int k = 0; k < 16; ++k) {  // coarse monotonicity guard
    const double x0 = lo + delta * k / 16.0, x1 = lo + delta * (k + 1) / 16.0;
    if (W.w(x0) < W.w(x1)) {
      throw DomainError("well_inverse: W not decreasing on [b-delta, b]");
    }
  }
  if (t == 0.0) return W.b;
  double xlo = lo, xhi = hi;  // W(xlo) >= t >= W(xhi)
  double x = lo + delta * 0.5;
  for (int it = 0; it < 200; ++it) {
    const double f = W.w(x) - t;
    if (f > 0) xlo = x; else xhi = x;
    if (xhi - xlo <= x_tol) break;
    const double df = W.dw(x);
    double xn = df != 0.0 ? x - f / df : xlo;
    if (!(xn > xlo && xn < xhi)) xn = 0.5 * (xlo + xhi);
    x = xn;
  }
  return 0.5 * (xlo + xhi);
}

inline double well_inverse(const DoubleWell& W, double t,
                           const GrowthCertificate& cert) {
  return well_inverse(W, t, cert.delta);
}

// Certify the two-sided growth sigma * d^(1+q) <= W <= d^(1+q) / sigma at
// distance d from each well, d spanning [1e-9 (b-a), delta] log-spaced.
// sigma is the largest constant valid at every sample; a potential whose
// wells are genuinely quadratic drives sigma below any usable floor.
inline GrowthCertificate certify_growth(const DoubleWell& W, int n_samples = 200,
                                        double sigma_floor = 1e-4) {
  if (n_samples < 100) throw DomainError("certify_growth: n_samples >= 100");
  const double span = W.b - W.a;
  const double delta = span / 4.0;
  const double d_min = 1e-9 * span;
  double sigma = 0.999999;
  for (int i = 0; i < n_samples; ++i) {
    const double d = delta * std::pow(d_min / delta, double(i) / (n_samples - 1));
    const double pw = std::pow(d, 1.0 + W.q);
    for (double s : {W.a + d, W.b - d}) {
      const double ratio = W.w(s) / pw;
      sigma = std::min(sigma, std::min(ratio, 1.0 / ratio));
    }
  }
  if (!(sigma > sigma_floor)) {
    throw CertificationError("certify_growth: no sigma above floor; well growth is not the declared |s-well|^(1+q)");
  }
  return GrowthCertificate{sigma, delta, W.w(W.b - delta)};
}

}  // namespace cahn
