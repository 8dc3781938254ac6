// Planar boundary curves, signed curvature, the normal tube chart with its
// Jacobian weight, and the curvature/boundary-data admissibility gate.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cahn/errors.hpp"
#include "cahn/functional1d.hpp"
#include "cahn/quadrature.hpp"

namespace cahn {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 p, Vec2 q) { return {p.x + q.x, p.y + q.y}; }
inline Vec2 operator-(Vec2 p, Vec2 q) { return {p.x - q.x, p.y - q.y}; }
inline Vec2 operator*(double c, Vec2 p) { return {c * p.x, c * p.y}; }
inline double dot(Vec2 p, Vec2 q) { return p.x * q.x + p.y * q.y; }
inline double cross(Vec2 p, Vec2 q) { return p.x * q.y - p.y * q.x; }
inline double norm(Vec2 p) { return std::hypot(p.x, p.y); }

// Closed parametrized curve over [0, 2pi).  Orientation fixes the sign
// convention: the interior lies on the left of the tangent, so the inward
// normal is the tangent rotated a quarter turn counterclockwise and the unit
// circle parametrized counterclockwise has curvature +1.
struct BoundaryCurve {
  std::function<Vec2(double)> pos, dpos, ddpos;
  std::vector<double> arclength;  // cumulative at knots+1 uniform parameter knots
  int knots = 256;

  double length() const { return arclength.back(); }

  Vec2 tangent(double th) const {
    const Vec2 d = dpos(th);
    const double n = norm(d);
    if (!(n > 1e-12)) throw DomainError("BoundaryCurve: degenerate tangent");
    return {d.x / n, d.y / n};
  }

  Vec2 inward_normal(double th) const {
    const Vec2 t = tangent(th);
    return {-t.y, t.x};
  }

  static BoundaryCurve from_functions(std::function<Vec2(double)> pos,
                                      std::function<Vec2(double)> dpos,
                                      std::function<Vec2(double)> ddpos,
                                      int knots = 256) {
    const double two_pi = 2.0 * std::acos(-1.0);
    const Vec2 gap = pos(two_pi) - pos(0.0);
    if (!(norm(gap) <= 1e-12)) {
      throw DomainError("BoundaryCurve: endpoints do not close (gap " +
                        std::to_string(norm(gap)) + ")");
    }
    BoundaryCurve c;
    c.pos = std::move(pos);
    c.dpos = std::move(dpos);
    c.ddpos = std::move(ddpos);
    c.knots = knots;
    c.arclength.assign(knots + 1, 0.0);
    for (int k = 1; k <= knots; ++k) {
      const double lo = two_pi * (k - 1) / knots, hi = two_pi * k / knots;
      const double seg = gl16_panel<double>(
          [&](double th) {
            const double speed = norm(c.dpos(th));
            if (!(speed > 1e-12)) {
              throw DomainError("BoundaryCurve: degenerate parametrization");
            }
            return speed;
          },
          lo, hi);
      c.arclength[k] = c.arclength[k - 1] + seg;
    }
    return c;
  }
};

// Signed curvature; positive where the boundary bends around the interior
// (unit circle: +1), negative on boundary pieces that are concave from
// inside (annulus inner circle: -1/r0).
inline double curvature(const BoundaryCurve& curve, double th) {
  const Vec2 d = curve.dpos(th);
  const Vec2 dd = curve.ddpos(th);
  const double speed = norm(d);
  if (!(speed > 1e-12)) {
    throw DomainError("curvature: degenerate parametrization point");
  }
  return cross(d, dd) / (speed * speed * speed);
}

inline BoundaryCurve make_circle(double radius) {
  if (!(radius > 0.0)) throw DomainError("make_circle: radius must be positive");
  return BoundaryCurve::from_functions(
      [radius](double th) { return Vec2{radius * std::cos(th), radius * std::sin(th)}; },
      [radius](double th) { return Vec2{-radius * std::sin(th), radius * std::cos(th)}; },
      [radius](double th) { return Vec2{-radius * std::cos(th), -radius * std::sin(th)}; });
}

// Inner boundary component of an annulus: parametrized clockwise so the
// annulus interior stays on the left; the inward normal points away from
// the enclosed hole and the curvature is -1/r0.
inline BoundaryCurve make_inner_circle(double r0) {
  if (!(r0 > 0.0)) throw DomainError("make_inner_circle: radius must be positive");
  return BoundaryCurve::from_functions(
      [r0](double th) { return Vec2{r0 * std::cos(th), -r0 * std::sin(th)}; },
      [r0](double th) { return Vec2{-r0 * std::sin(th), -r0 * std::cos(th)}; },
      [r0](double th) { return Vec2{-r0 * std::cos(th), r0 * std::sin(th)}; });
}

// Star-shaped curve r(th) = c0 + sum_k a[k-1] cos(k th) + b[k-1] sin(k th),
// counterclockwise.
inline BoundaryCurve make_fourier_curve(double c0, const std::vector<double>& a,
                                        const std::vector<double>& b) {
  const auto r = [c0, a, b](double th) {
    double v = c0;
    for (size_t k = 0; k < a.size(); ++k) v += a[k] * std::cos((k + 1) * th);
    for (size_t k = 0; k < b.size(); ++k) v += b[k] * std::sin((k + 1) * th);
    return v;
  };
  const auto dr = [a, b](double th) {
    double v = 0.0;
    for (size_t k = 0; k < a.size(); ++k) v -= a[k] * (k + 1) * std::sin((k + 1) * th);
    for (size_t k = 0; k < b.size(); ++k) v += b[k] * (k + 1) * std::cos((k + 1) * th);
    return v;
  };
  const auto ddr = [a, b](double th) {
    double v = 0.0;
    for (size_t k = 0; k < a.size(); ++k) {
      v -= a[k] * (k + 1) * (k + 1) * std::cos((k + 1) * th);
    }
    for (size_t k = 0; k < b.size(); ++k) {
      v -= b[k] * (k + 1) * (k + 1) * std::sin((k + 1) * th);
    }
    return v;
  };
  const double two_pi = 2.0 * std::acos(-1.0);
  for (int i = 0; i < 1024; ++i) {
    if (!(r(two_pi * i / 1024) > 1e-9)) {
      throw DomainError("make_fourier_curve: radius must stay positive");
    }
  }
  return BoundaryCurve::from_functions(
      [r](double th) {
        const double v = r(th);
        return Vec2{v * std::cos(th), v * std::sin(th)};
      },
      [r, dr](double th) {
        const double v = r(th), dv = dr(th);
        return Vec2{dv * std::cos(th) - v * std::sin(th),
                    dv * std::sin(th) + v * std::cos(th)};
      },
      [r, dr, ddr](double th) {
        const double v = r(th), dv = dr(th), ddv = ddr(th);
        return Vec2{ddv * std::cos(th) - 2.0 * dv * std::sin(th) - v * std::cos(th),
                    ddv * std::sin(th) + 2.0 * dv * std::cos(th) - v * std::sin(th)};
      });
}

// Normal tube chart Phi(y,t) = y + t nu(y).  In the plane the area Jacobian
// is exactly 1 - kappa(y) t; the default half-width keeps it >= 0.75.
struct TubeChart {
  BoundaryCurve curve;
  double delta = 0.0;

  Vec2 map(double th, double t) const { return curve.pos(th) + t * curve.inward_normal(th); }

  double jacobian(double th, double t) const { return 1.0 - curvature(curve, th) * t; }

  // Newton inversion of the chart; the seed walks the knot grid first.
  std::pair<double, double> invert(Vec2 p) const {
    const double two_pi = 2.0 * std::acos(-1.0);
    double th = 0.0, best = 1e300;
    for (int k = 0; k < curve.knots; ++k) {
      const double cand = two_pi * k / curve.knots;
      const double d = norm(p - curve.pos(cand));
      if (d < best) { best = d; th = cand; }
    }
    double t = dot(p - curve.pos(th), curve.inward_normal(th));
    for (int it = 0; it < 60; ++it) {
      const Vec2 nu = curve.inward_normal(th);
      const Vec2 f = curve.pos(th) + t * nu - p;
      if (norm(f) <= 1e-13) break;
      // d(pos + t nu)/dth = dpos + t dnu, with dnu = -kappa * dpos for the
      // quarter-turn normal
      const double kap = curvature(curve, th);
      const Vec2 dth_col = (1.0 - kap * t) * curve.dpos(th);
      const double det = cross(dth_col, nu);
      if (!(std::abs(det) > 1e-14)) {
        throw NumericsError("TubeChart::invert: singular Jacobian");
      }
      const double step_th = cross(f, nu) / det;
      const double step_t = cross(dth_col, f) / det;
      th -= step_th;
      t -= step_t;
    }
    th = std::fmod(th, two_pi);
    if (th < 0.0) th += two_pi;
    return {th, t};
  }

  static TubeChart from_curve(BoundaryCurve curve, double delta = 0.0) {
    double kmax = 0.0, kpos = 0.0;  // only positive curvature can pinch the tube
    const double two_pi = 2.0 * std::acos(-1.0);
    for (int k = 0; k < 1024; ++k) {
      const double kap = curvature(curve, two_pi * k / 1024);
      kmax = std::max(kmax, std::abs(kap));
      kpos = std::max(kpos, kap);
    }
    TubeChart chart;
    if (delta <= 0.0) {
      delta = kmax > 0.0 ? 0.25 / kmax : 0.25;
    } else if (kpos * delta >= 1.0) {
      throw DomainError("TubeChart: tube too wide, jacobian vanishes inside");
    }
    chart.curve = std::move(curve);
    chart.delta = delta;
    return chart;
  }
};

// The 1-D weight seen by the slice through boundary point th: omega(t) =
// 1 - kappa(th) t on [0, T_slice].
inline Weight slice_weight(const TubeChart& chart, double th, double T_slice) {
  if (!(T_slice > 0.0 && T_slice <= chart.delta)) {
    throw DomainError("slice_weight: slice must fit inside the tube");
  }
  const double kap = curvature(chart.curve, th);
  if (!(1.0 - kap * T_slice > 0.0)) {
    throw DomainError("slice_weight: jacobian vanishes inside the slice");
  }
  return Weight::affine(T_slice, 1.0, -kap);
}

// Boundary data g over the curve parameter, an optional eps-family, and the
// thresholds the curvature gate compares against.
struct BoundaryDatum {
  std::function<double(double)> g;
  std::function<double(double)> dg_dtheta;
  std::function<double(double, double)> g_eps;  // (th, eps); empty means g_eps = g
  double alpha_minus = 0.1;
  double kappa0 = -1.0;

  double eval_eps(double th, double eps) const {
    return g_eps ? g_eps(th, eps) : g(th);
  }
};

struct AdmissibilityReport {
  bool pass = true;
  std::vector<double> theta, g, kappa;
  std::vector<int> violations;  // samples with g <= alpha_minus but kappa >= kappa0

  std::string describe() const {
    if (pass) return "admissible: {g <= alpha_minus} subset of {kappa < kappa0}";
    std::string s = "inadmissible at " + std::to_string(violations.size()) +
                    " samples; theta in [";
    s += std::to_string(theta[violations.front()]) + ", " +
         std::to_string(theta[violations.back()]) + "]";
    return s;
  }
};

// The configuration gate: wherever the boundary datum dips to alpha_minus or
// below, the boundary must bend strictly away from the interior.
inline AdmissibilityReport check_admissibility(const BoundaryCurve& curve,
                                               const BoundaryDatum& datum,
                                               int n_samples = 256) {
  if (n_samples < 64) {
    throw ConfigError("check_admissibility: need at least 64 samples");
  }
  const double two_pi = 2.0 * std::acos(-1.0);
  AdmissibilityReport rep;
  rep.theta.resize(n_samples);
  rep.g.resize(n_samples);
  rep.kappa.resize(n_samples);
  for (int k = 0; k < n_samples; ++k) {
    const double th = two_pi * k / n_samples;
    rep.theta[k] = th;
    rep.g[k] = datum.g(th);
    rep.kappa[k] = curvature(curve, th);
    if (rep.g[k] <= datum.alpha_minus && !(rep.kappa[k] < datum.kappa0)) {
      rep.violations.push_back(k);
      rep.pass = false;
    }
  }
  return rep;
}

}  // namespace cahn
