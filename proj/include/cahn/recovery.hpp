// Explicit near-minimizers: ride the transition profile in from alpha_eps,
// sit at b across the middle, ride back out to beta_eps, and split their
// second-order energy into the four bookkeeping pieces the limsup bound needs.
#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cahn/errors.hpp"
#include "cahn/functional1d.hpp"
#include "cahn/potential.hpp"
#include "cahn/profile.hpp"
#include "cahn/quadrature.hpp"

namespace cahn {

struct RecoveryProfile {
  double eps = 0.0;
  Grid grid;
  BoundaryData1D data;
  double t_eps = 0.0;        // left arrival time: eps * hitting time from alpha_eps
  double s_eps_right = 0.0;  // right arrival span: eps * hitting time from beta_eps
  std::vector<double> t, v;
};

// The three-piece profile exists only while both transitions fit inside the
// interval with the plateau in between.
inline RecoveryProfile build_recovery(const DoubleWell& well,
                                      const BoundaryData1D& data, const Grid& grid,
                                      double eps, int resolution = 800) {
  if (!(eps > 0.0)) throw DomainError("build_recovery: eps must be positive");
  for (double s : {data.alpha_eps, data.beta_eps}) {
    if (!(s >= well.a && s <= well.b)) {
      throw DomainError("build_recovery: boundary values must lie in [a,b]");
    }
  }
  const TransitionProfile left = build_profile(well, data.alpha_eps, resolution);
  const TransitionProfile right = build_profile(well, data.beta_eps, resolution);

  RecoveryProfile r;
  r.eps = eps;
  r.grid = grid;
  r.data = data;
  r.t_eps = eps * left.hitting_time;
  r.s_eps_right = eps * right.hitting_time;
  if (!(r.t_eps < grid.length - r.s_eps_right)) {
    throw DomainError(
        "build_recovery: requires t_eps < T - s_eps_right, got t_eps = " +
        std::to_string(r.t_eps) +
        " and T - s_eps_right = " + std::to_string(grid.length - r.s_eps_right) +
        " (eps too large for this interval)");
  }
  r.v = detail::three_piece_nodal(well, data, grid, eps, left, right);
  r.t.resize(grid.n + 1);
  for (int i = 0; i <= grid.n; ++i) r.t[i] = grid.node(i);
  return r;
}

struct EnergySplit {
  double a = 0.0;  // weight-at-zero part measured against the sharp-interface cost
  double b = 0.0;  // omega'(0) times the first moment of the left transition
  double c = 0.0;  // Taylor-remainder part of the weight on the left region
  double d = 0.0;  // full-weight energy of the right transition region
  double total() const { return a + b + c + d; }
};

// Regroups the reported second-order energy of the recovery profile.  The
// weight is split as omega(t) = omega(0) + omega'(0) t + remainder on nodes
// left of the right-transition onset, and kept whole to the right; every
// piece goes through the same corrected-trapezoid quadrature as energy_g0,
// so a + b + c + d rebuilds energy_g2 exactly up to roundoff.
inline EnergySplit decompose_energy(const RecoveryProfile& recovery,
                                    const DoubleWell& well, const Weight& weight,
                                    double eps, double alpha_limit) {
  const Grid& grid = recovery.grid;
  const int n = grid.n;
  const double h = grid.h();
  const std::vector<double> dv = detail::nodal_derivative(recovery.v, h);
  const double cut = grid.length - recovery.s_eps_right;
  std::vector<double> fa(n + 1, 0.0), fb(n + 1, 0.0), fc(n + 1, 0.0),
      fd(n + 1, 0.0);
  for (int i = 0; i <= n; ++i) {
    const double t = grid.node(i);
    const double f = well.w(recovery.v[i]) + eps * eps * dv[i] * dv[i];
    if (t < cut) {
      fa[i] = weight.at0 * f;
      fb[i] = weight.dat0 * t * f;
      fc[i] = weight.taylor_remainder(t) * f;
    } else {
      fd[i] = weight.omega(t) * f;
    }
  }
  const double e2 = eps * eps;
  EnergySplit s;
  s.a = detail::corrected_trapezoid(fa, h) / e2 -
        weight.omega(0.0) * geodesic_distance(well, alpha_limit, well.b) / eps;
  s.b = detail::corrected_trapezoid(fb, h) / e2;
  s.c = detail::corrected_trapezoid(fc, h) / e2;
  s.d = detail::corrected_trapezoid(fd, h) / e2;
  return s;
}

// First moment of the left transition energy in both parameterizations:
// 2/eps^2 * int t W(z(t/eps)) dt over [0, t_eps], and its rescaled twin
// 2 * int s W(z(s)) ds.  The two must agree to quadrature accuracy; the
// decomposition's b term converges to omega'(0) times this value.
inline std::pair<double, double> transition_first_moment_forms(
    const DoubleWell& well, const TransitionProfile& prof, double eps) {
  const double t_end = eps * prof.hitting_time;
  const double form_t =
      2.0 / (eps * eps) *
      integrate_adaptive([&](double t) { return t * well.w(prof.eval(t / eps)); },
                         0.0, t_end, 1e-13);
  const double form_s = 2.0 * integrate_adaptive(
                                  [&](double s) { return s * well.w(prof.eval(s)); },
                                  0.0, prof.hitting_time, 1e-13);
  return {form_t, form_s};
}

}  // namespace cahn
