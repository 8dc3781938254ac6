#pragma once

// Weighted 1-D phase-transition functional on [0, T]:
//   E(v) = ∫ (W(v) + eps^2 v'^2) omega(t) dt,   v(0), v(T) prescribed.
//
// Two discrete energies coexist on purpose.  The solver minimizes a
// cell-form energy (midpoint weight, trapezoid potential, exact cell
// differences): positive, tridiagonal, and its minimizer dominates every
// nodal competitor by construction.  Reported energies use a corrected
// trapezoid with fourth-order nodal derivatives instead; the cell form
// carries an O(h^2/eps) bias that would pollute extrapolation of the
// second-order quantity, which divides another factor eps^2 out of it.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cahn/errors.hpp"
#include "cahn/potential.hpp"
#include "cahn/profile.hpp"

namespace cahn {

struct Weight {
  double length = 1.0;  // T
  std::function<double(double)> omega, domega;
  double omega0 = 1.0, omega1 = 1.0;  // min and max of omega over [0,T]
  double at0 = 1.0, dat0 = 0.0;       // omega(0), omega'(0)

  double taylor_remainder(double t) const { return omega(t) - at0 - dat0 * t; }

  static Weight from_functions(double T, std::function<double(double)> f,
                               std::function<double(double)> df,
                               int n_samples = 4096) {
    if (!(T > 0.0 && T <= 1.0)) {
      throw ConfigError("Weight: length must lie in (0, 1]");
    }
    Weight w;
    w.length = T;
    w.at0 = f(0.0);
    w.dat0 = df(0.0);
    double lo = w.at0, hi = w.at0;
    for (int i = 0; i <= n_samples; ++i) {
      const double val = f(T * i / n_samples);
      lo = std::min(lo, val);
      hi = std::max(hi, val);
    }
    if (!(lo > 0.0)) throw ConfigError("Weight: omega must be positive on [0,T]");
    w.omega0 = lo;
    w.omega1 = hi;
    w.omega = std::move(f);
    w.domega = std::move(df);
    // first-order Taylor remainder must vanish faster than t; subtract a
    // rounding allowance so exactly-affine weights are not flagged for
    // cancellation noise
    double prev = -1.0;
    for (double t : {1e-3, 1e-4, 1e-5}) {
      t = std::min(t, T / 2);
      const double allowance = 16 * std::numeric_limits<double>::epsilon() *
                               (std::abs(w.at0) + std::abs(w.dat0) * t +
                                std::abs(w.omega(t)));
      const double ratio =
          std::max(std::abs(w.taylor_remainder(t)) - allowance, 0.0) / t;
      if (prev >= 0.0 && !(ratio <= 0.9 * prev + 1e-12)) {
        throw ConfigError("Weight: omega is not differentiable at 0 (remainder not o(t))");
      }
      prev = ratio;
    }
    return w;
  }

  static Weight affine(double T, double value0, double slope) {
    return from_functions(
        T, [=](double t) { return value0 + slope * t; },
        [=](double) { return slope; });
  }
};

struct BoundaryData1D {
  double alpha_eps = 0.0;
  double beta_eps = 1.0;
  double alpha_limit = 0.0;  // limiting left datum, enters the g2 subtraction
  double alpha_minus = 0.1;
  double kappa0 = -1.0;

  void validate(const DoubleWell& well, const Weight& weight) const {
    for (double s : {alpha_eps, beta_eps, alpha_limit}) {
      if (!(s >= well.a && s <= well.b)) {
        throw DomainError("BoundaryData1D: values must lie in [a,b]");
      }
    }
    if (!(alpha_minus > well.a && alpha_minus < well.b)) {
      throw DomainError("BoundaryData1D: alpha_minus must lie in (a,b)");
    }
    if (!(kappa0 < 0.0)) throw DomainError("BoundaryData1D: kappa0 must be negative");
    const bool case_one = alpha_eps >= alpha_minus;
    const bool case_two = weight.dat0 >= -kappa0;
    if (!case_one && !case_two) {
      throw ConfigError(
          "BoundaryData1D: inadmissible data, needs alpha_eps >= alpha_minus "
          "or omega'(0) >= -kappa0");
    }
  }
};

struct Grid {
  double length = 1.0;
  int n = 4;  // cells; n+1 nodes

  double h() const { return length / n; }
  double node(int i) const { return length * i / n; }
  double cell_mid(int i) const { return length * (2 * i + 1) / (2.0 * n); }

  static Grid for_epsilon(double T, double eps, int cells_per_eps = 32) {
    if (!(T > 0.0) || !(eps > 0.0) || cells_per_eps < 1) {
      throw ConfigError("Grid: T, eps, cells_per_eps must be positive");
    }
    const int n = static_cast<int>(std::ceil(cells_per_eps * T / eps - 1e-12));
    return Grid{T, std::max(n, 4)};
  }
};

namespace detail {

// Fourth-order nodal derivatives on a uniform grid (5-point stencils).
inline std::vector<double> nodal_derivative(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size()) - 1;
  if (n < 4) throw DomainError("nodal_derivative: needs at least 5 nodes");
  std::vector<double> d(n + 1);
  d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h);
  d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h);
  for (int i = 2; i <= n - 2; ++i) {
    d[i] = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) / (12 * h);
  }
  d[n - 1] = (3 * f[n] + 10 * f[n - 1] - 18 * f[n - 2] + 6 * f[n - 3] - f[n - 4]) / (12 * h);
  d[n] = (25 * f[n] - 48 * f[n - 1] + 36 * f[n - 2] - 16 * f[n - 3] + 3 * f[n - 4]) / (12 * h);
  return d;
}

// Trapezoid with the telescoped h^2 endpoint-derivative correction.
inline double corrected_trapezoid(const std::vector<double>& F, double h) {
  const size_t n = F.size() - 1;
  double total = 0.5 * (F[0] + F[n]);
  for (size_t i = 1; i < n; ++i) total += F[i];
  total *= h;
  const std::vector<double> dF = nodal_derivative(F, h);
  return total + h * h * (dF[0] - dF[n]) / 12.0;
}

// Three-piece nodal field: left transition, plateau at b, right transition.
// Also the recovery construction; the solver starts Newton from it.
inline std::vector<double> three_piece_nodal(const DoubleWell& well,
                                             const BoundaryData1D& data,
                                             const Grid& grid, double eps,
                                             const TransitionProfile& left,
                                             const TransitionProfile& right) {
  std::vector<double> v(grid.n + 1, well.b);
  for (int i = 0; i <= grid.n; ++i) {
    const double t = grid.node(i);
    const double lv = left.eval(std::min(t / eps, left.hitting_time));
    const double rv = right.eval(std::min((grid.length - t) / eps, right.hitting_time));
    v[i] = std::min(lv, rv);
  }
  v[0] = data.alpha_eps;
  v[grid.n] = data.beta_eps;
  return v;
}

}  // namespace detail

// Solver-form discrete energy (cell quadrature).  Minimizers of this
// functional dominate every same-grid competitor exactly.
inline double discrete_energy(const DoubleWell& well, const Weight& weight,
                              const Grid& grid, double eps,
                              const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != grid.n + 1) {
    throw DomainError("discrete_energy: nodal field does not match the grid");
  }
  const double h = grid.h();
  double total = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double wc = weight.omega(grid.cell_mid(i));
    const double dv = (v[i + 1] - v[i]) / h;
    total += h * wc * (0.5 * (well.w(v[i]) + well.w(v[i + 1])) + eps * eps * dv * dv);
  }
  return total;
}

// Reported energy: corrected trapezoid of (W(v) + eps^2 v'^2) omega with
// fourth-order nodal derivatives.  At least second-order accurate; in
// practice the h^2 term telescopes away and the value tracks the continuum
// energy of the interpolated field to higher order.
inline double energy_g0(const DoubleWell& well, const Weight& weight,
                        const Grid& grid, double eps, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != grid.n + 1) {
    throw DomainError("energy_g0: nodal field does not match the grid");
  }
  const double h = grid.h();
  const std::vector<double> dv = detail::nodal_derivative(v, h);
  std::vector<double> F(grid.n + 1);
  for (int i = 0; i <= grid.n; ++i) {
    F[i] = (well.w(v[i]) + eps * eps * dv[i] * dv[i]) * weight.omega(grid.node(i));
  }
  return detail::corrected_trapezoid(F, h);
}

// Second-order rescaling: (E/eps^2) - omega(0) d_W(alpha, b)/eps.
inline double energy_g2(const DoubleWell& well, const Weight& weight,
                        const Grid& grid, double eps, const std::vector<double>& v,
                        double alpha_limit) {
  const double dw_ab = geodesic_distance(well, alpha_limit, well.b);
  return energy_g0(well, weight, grid, eps, v) / (eps * eps) -
         weight.omega(0.0) * dw_ab / eps;
}

struct MinimizerResult {
  std::vector<double> t, v;
  double eps = 0.0;
  Grid grid;
  BoundaryData1D data;
  double energy_g0 = 0.0;       // reported quadrature
  double energy_g2 = 0.0;
  double solver_energy = 0.0;   // cell-form value the solver minimized
  double el_residual = 0.0;     // max |grad E_cell| / (2h), bound-projected
  std::vector<double> delta_profile;  // closed-formula first-integral defect
  double s_eps = 0.0, theta_eps = 0.0;
  double min_value = 0.0;
  double sup_deriv_times_eps = 0.0;
  int newton_iterations = 0;
};

struct MinimizeOptions {
  int max_newton = 100;
  double tolerance = 1e-10;  // on max |grad|/(2h)
  bool continuation = true;  // on failure, re-solve from 8*eps downward
  int profile_resolution = 800;
};

namespace detail {

struct NewtonOutcome {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

inline void solver_gradient(const DoubleWell& well, const Weight& weight,
                            const Grid& grid, double eps,
                            const std::vector<double>& v, std::vector<double>& g) {
  const int n = grid.n;
  const double h = grid.h();
  g.assign(n + 1, 0.0);
  for (int i = 1; i < n; ++i) {
    const double wcm = weight.omega(grid.cell_mid(i - 1));
    const double wcp = weight.omega(grid.cell_mid(i));
    g[i] = 0.5 * h * (wcm + wcp) * well.dw(v[i]) +
           2.0 * eps * eps *
               (wcm * (v[i] - v[i - 1]) - wcp * (v[i + 1] - v[i])) / h;
  }
}

inline double nodal_gradient(const DoubleWell& well, const Weight& weight,
                             const Grid& grid, double eps,
                             const std::vector<double>& v, int i, double x) {
  const double h = grid.h();
  const double wcm = weight.omega(grid.cell_mid(i - 1));
  const double wcp = weight.omega(grid.cell_mid(i));
  return 0.5 * h * (wcm + wcp) * well.dw(x) +
         2.0 * eps * eps * (wcm * (x - v[i - 1]) - wcp * (v[i + 1] - x)) / h;
}

// Bound-projected residual.  Directions blocked by the clamp do not count,
// and neither does a node whose nodal gradient changes sign within one ulp:
// the subquadratic W' has infinite slope at the wells, so next to the
// plateau the true nodal optimum can sit between adjacent doubles, where no
// representable value zeroes the gradient.
inline double projected_residual(const DoubleWell& well, const Weight& weight,
                                 const Grid& grid, double eps,
                                 const std::vector<double>& v,
                                 const std::vector<double>& g) {
  double worst = 0.0;
  for (int i = 1; i < grid.n; ++i) {
    double r = g[i];
    if (v[i] <= well.a && r > 0) r = 0;
    if (v[i] >= well.b && r < 0) r = 0;
    if (r != 0.0 && std::abs(r) <= 1e-6 * grid.h()) {
      // only residuals this small can flip sign across one ulp
      const double up = std::nextafter(v[i], well.b);
      const double dn = std::nextafter(v[i], well.a);
      const double gup = nodal_gradient(well, weight, grid, eps, v, i, up);
      const double gdn = nodal_gradient(well, weight, grid, eps, v, i, dn);
      const bool up_ok = gup > 0.0 || (up >= well.b && gup >= 0.0);
      const bool dn_ok = gdn < 0.0 || (dn <= well.a && gdn <= 0.0);
      if (up_ok && dn_ok) r = 0;
    }
    worst = std::max(worst, std::abs(r));
  }
  return worst / (2.0 * grid.h());
}

// Exact nodewise relaxation sweep.  For h <= eps/32 the quadratic coupling
// 4 eps^2/h dominates h |W''|, so each single-node energy is strictly convex
// and has one root of the nodal gradient in [a,b]; bound activity falls out
// exactly.  Guaranteed progress where the global Newton model fails (the
// W'' blow-up next to the plateau wrecks its local quadratic there).
inline void relaxation_sweep(const DoubleWell& well, const Weight& weight,
                             const Grid& grid, double eps, std::vector<double>& v) {
  const int n = grid.n;
  const double h = grid.h();
  for (int i = 1; i < n; ++i) {
    const double wcm = weight.omega(grid.cell_mid(i - 1));
    const double wcp = weight.omega(grid.cell_mid(i));
    const double coeff = 0.5 * h * (wcm + wcp);
    const double stiff = 2.0 * eps * eps / h;
    auto gi = [&](double x) {
      return coeff * well.dw(x) +
             stiff * (wcm * (x - v[i - 1]) - wcp * (v[i + 1] - x));
    };
    // pin outright when the pull away from a well is below the one-ulp
    // granule of W' there; such nodes have no float-resolvable interior
    // optimum and belong to the dead core
    const double ga = gi(well.a), gb = gi(well.b);
    const double push_a = coeff * well.dw(std::nextafter(well.a, well.b));
    const double pull_b = -coeff * well.dw(std::nextafter(well.b, well.a));
    if (ga >= -push_a) { v[i] = well.a; continue; }
    if (gb <= pull_b) { v[i] = well.b; continue; }
    // safeguarded Newton, resolved down to adjacent representables: near
    // the plateau the optimum is separated from b by a handful of ulps
    double lo = well.a, hi = well.b;
    double x = std::clamp(v[i], lo, hi);
    for (int it = 0; it < 100; ++it) {
      const double gx = gi(x);
      if (gx == 0.0) break;
      if (gx > 0.0) hi = x; else lo = x;
      const double slope = coeff * well.ddw_guarded(x) + stiff * (wcm + wcp);
      double xn = x - gx / slope;
      if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
      if (xn == x || xn <= lo || xn >= hi) break;
      x = xn;
    }
    v[i] = x;
  }
}

inline NewtonOutcome newton_clamped(const DoubleWell& well, const Weight& weight,
                                    const Grid& grid, double eps,
                                    std::vector<double>& v,
                                    const MinimizeOptions& opts) {
  const int n = grid.n;
  const double h = grid.h();
  // float-decidability floor: one ulp of a neighbouring value already moves
  // a nodal gradient by about (2 eps^2 / h) * omega_max * ulp, so residual
  // targets below a few such granules cannot be certified in double
  // precision.  On the standard h = eps/32 grids this floor sits near 4e-12
  // and the requested tolerance wins; on strongly refined grids the floor
  // takes over.
  const double vmag =
      std::max({std::abs(well.a), std::abs(well.b), well.b - well.a});
  const double granule = (eps * eps / (h * h)) * weight.omega1 *
                         std::numeric_limits<double>::epsilon() * vmag;
  const double tol = std::max(opts.tolerance, 32.0 * granule);
  std::vector<double> g, diag(n + 1), upper(n + 1), lower(n + 1),
      cprime(n + 1), step(n + 1, 0.0), vtry(n + 1), gtry;
  double energy = discrete_energy(well, weight, grid, eps, v);
  NewtonOutcome out;
  for (int iter = 0; iter < opts.max_newton; ++iter) {
    solver_gradient(well, weight, grid, eps, v, g);
    out.residual = projected_residual(well, weight, grid, eps, v, g);
    out.iterations = iter;
    if (out.residual <= tol) {
      out.converged = true;
      return out;
    }
    // global damped Newton step on the tridiagonal Hessian.  W'' < 0 across
    // the transition band can make the pinned Hessian indefinite (the
    // second-difference block contributes only O(h) to the lowest eigenvalue
    // on a long array), which shows up as a nonpositive factorization pivot
    // or as a solve direction pointing uphill.  A diagonal shift restores
    // definiteness; grow it until a step passes the acceptance test.
    bool solved = false;
    double diag_scale = 0.0;
    for (int i = 1; i < n; ++i) {
      const double wcm = weight.omega(grid.cell_mid(i - 1));
      const double wcp = weight.omega(grid.cell_mid(i));
      diag[i] = 0.5 * h * (wcm + wcp) * well.ddw_guarded(v[i]) +
                2.0 * eps * eps * (wcm + wcp) / h;
      upper[i] = -2.0 * eps * eps * wcp / h;
      lower[i] = -2.0 * eps * eps * wcm / h;
      diag_scale = std::max(diag_scale,
                            std::abs(diag[i]) + std::abs(upper[i]) + std::abs(lower[i]));
    }
    const double floor_slack =
        8 * std::numeric_limits<double>::epsilon() * std::abs(energy);
    double shift = 0.0;
    for (int attempt = 0; attempt < 6 && !solved; ++attempt) {
      bool pivot_ok = true;
      double piv = diag[1] + shift;
      if (!(piv > 1e-300)) pivot_ok = false;
      if (pivot_ok) {
        cprime[1] = upper[1] / piv;
        step[1] = -g[1] / piv;
        for (int i = 2; i < n && pivot_ok; ++i) {
          piv = diag[i] + shift - lower[i] * cprime[i - 1];
          if (!(piv > 1e-300)) { pivot_ok = false; break; }
          cprime[i] = upper[i] / piv;
          step[i] = (-g[i] - lower[i] * step[i - 1]) / piv;
        }
        for (int i = n - 2; i >= 1 && pivot_ok; --i) step[i] -= cprime[i] * step[i + 1];
      }
      if (pivot_ok) {
        // backtracking with clamping; accept on a measurable energy decrease
        // (beyond rounding noise).  Once energy differences drown in rounding
        // judge the full step after a relaxation polish: the raw Newton step
        // always disturbs the plateau-entry nodes it models poorly, so the
        // composite step+sweep is the unit that must shrink the residual.
        double scale = 1.0;
        for (int bt = 0; bt < 30; ++bt) {
          vtry = v;
          for (int i = 1; i < n; ++i) {
            vtry[i] = std::clamp(v[i] + scale * step[i], well.a, well.b);
          }
          double etry = discrete_energy(well, weight, grid, eps, vtry);
          bool accept = etry < energy - floor_slack;
          if (!accept && bt == 0) {
            relaxation_sweep(well, weight, grid, eps, vtry);
            etry = discrete_energy(well, weight, grid, eps, vtry);
            solver_gradient(well, weight, grid, eps, vtry, gtry);
            // residual progress may substitute for descent only at rounding
            // level: the iterate must never drift measurably above the energy
            // of the three-piece seed, or the competitor bracket breaks.
            accept = (projected_residual(well, weight, grid, eps, vtry, gtry) <=
                          0.7 * out.residual &&
                      etry <= energy + 8 * floor_slack) ||
                     etry < energy - floor_slack;
          }
          if (accept) {
            v.swap(vtry);
            energy = etry;
            solved = true;
            break;
          }
          scale *= 0.5;
        }
      }
      if (!solved) shift = (shift == 0.0 ? 1e-4 * diag_scale : shift * 64.0);
    }
    // always re-polish: the sweep resolves the plateau-entry nodes the
    // global model handles poorly, and never increases the energy
    relaxation_sweep(well, weight, grid, eps, v);
    // endgame: the error left after a stalled global step is confined to
    // the entry skirt of the dead core, where W'' varies too fast between
    // nodes for the quadratic model.  Those short modes contract under
    // nodewise relaxation at a visible geometric rate, so keep sweeping
    // while each pass still pays.
    solver_gradient(well, weight, grid, eps, v, g);
    double res_prev = projected_residual(well, weight, grid, eps, v, g);
    for (int extra = 0; extra < 40 && res_prev > tol; ++extra) {
      relaxation_sweep(well, weight, grid, eps, v);
      solver_gradient(well, weight, grid, eps, v, g);
      const double res_now = projected_residual(well, weight, grid, eps, v, g);
      const bool paying = res_now <= 0.98 * res_prev;
      res_prev = res_now;
      if (!paying) break;
    }
    energy = discrete_energy(well, weight, grid, eps, v);
  }
  solver_gradient(well, weight, grid, eps, v, g);
  out.residual = projected_residual(well, weight, grid, eps, v, g);
  out.iterations = opts.max_newton;
  out.converged = out.residual <= tol;
  return out;
}

}  // namespace detail

// theta_eps and S_eps: threshold just below b and the first time v crosses
// it.  The gap max{b - beta_eps, eps^(2/(1-q))} keeps the Psi deficit O(eps)
// so S_eps/eps approaches the hitting time at a visible rate.
inline std::pair<double, double> transition_time(const DoubleWell& well,
                                                 const Grid& grid, double eps,
                                                 const std::vector<double>& v,
                                                 const BoundaryData1D& data) {
  const double gap =
      std::max(well.b - data.beta_eps, std::pow(eps, 2.0 / (1.0 - well.q)));
  const double theta = well.b - gap;
  int hit = -1;
  for (int i = 0; i <= grid.n; ++i) {
    if (v[i] >= theta) { hit = i; break; }
  }
  if (hit < 0) {
    throw NumericsError(
        "transition_time: minimizer never reaches the threshold theta_eps");
  }
  if (data.alpha_eps >= data.alpha_minus) {
    for (int j = 0; j < hit; ++j) {
      if (v[j + 1] < v[j] - 1e-10) {
        throw NumericsError("transition_time: v not nondecreasing before S_eps");
      }
    }
  }
  double s = grid.node(hit);
  if (hit > 0 && v[hit] > v[hit - 1]) {
    s = grid.node(hit - 1) + grid.h() * (theta - v[hit - 1]) / (v[hit] - v[hit - 1]);
  }
  return {theta, s};
}

inline MinimizerResult minimize(const DoubleWell& well, const Weight& weight,
                                const BoundaryData1D& data, const Grid& grid,
                                double eps, const MinimizeOptions& opts = {}) {
  data.validate(well, weight);
  if (grid.h() > eps / 32.0 + 1e-15) {
    throw ConfigError("minimize: grid must resolve h <= eps/32");
  }
  const TransitionProfile left = build_profile(well, data.alpha_eps, opts.profile_resolution);
  const TransitionProfile right = build_profile(well, data.beta_eps, opts.profile_resolution);

  std::vector<double> v = detail::three_piece_nodal(well, data, grid, eps, left, right);
  detail::NewtonOutcome outcome = detail::newton_clamped(well, weight, grid, eps, v, opts);
  int total_iterations = outcome.iterations;

  if (!outcome.converged && opts.continuation) {
    // continuation: solve a stiffer-to-softer ladder, halving down to eps.
    // The direct attempt may already sit closer to the minimizer than the
    // ladder can get, so keep whichever iterate ends with the smaller
    // residual.
    std::vector<double> best = v;
    double best_residual = outcome.residual;
    v = detail::three_piece_nodal(well, data, grid, eps, left, right);
    for (double e : {8 * eps, 4 * eps, 2 * eps, eps}) {
      outcome = detail::newton_clamped(well, weight, grid, eps > e ? eps : e, v, opts);
      total_iterations += outcome.iterations;
    }
    if (!outcome.converged && best_residual < outcome.residual) {
      v = std::move(best);
      outcome.residual = best_residual;
    }
  }
  if (!outcome.converged) {
    throw SolverError("minimize: Newton did not converge, residual " +
                          std::to_string(outcome.residual),
                      v);
  }

  MinimizerResult r;
  r.eps = eps;
  r.grid = grid;
  r.data = data;
  r.v = std::move(v);
  r.t.resize(grid.n + 1);
  for (int i = 0; i <= grid.n; ++i) r.t[i] = grid.node(i);
  r.newton_iterations = total_iterations;
  r.el_residual = outcome.residual;
  r.solver_energy = discrete_energy(well, weight, grid, eps, r.v);
  r.energy_g0 = energy_g0(well, weight, grid, eps, r.v);
  r.energy_g2 = energy_g2(well, weight, grid, eps, r.v, data.alpha_limit);
  r.min_value = *std::min_element(r.v.begin(), r.v.end());
  const std::vector<double> dv = detail::nodal_derivative(r.v, grid.h());
  double sup_dv = 0.0;
  for (double d : dv) sup_dv = std::max(sup_dv, std::abs(d));
  r.sup_deriv_times_eps = eps * sup_dv;
  auto [theta, s] = transition_time(well, grid, eps, r.v, data);
  r.theta_eps = theta;
  r.s_eps = s;

  // closed-formula first-integral defect at the nodes
  const double h = grid.h();
  std::vector<double> F(grid.n + 1);
  for (int i = 0; i <= grid.n; ++i) {
    F[i] = weight.domega(r.t[i]) * (well.w(r.v[i]) + eps * eps * dv[i] * dv[i]);
  }
  const std::vector<double> dF = detail::nodal_derivative(F, h);
  const double delta0 = eps * eps * dv[0] * dv[0] - well.w(r.v[0]);
  r.delta_profile.assign(grid.n + 1, 0.0);
  double running = 0.0;
  r.delta_profile[0] = delta0;
  for (int i = 0; i < grid.n; ++i) {
    running += h * (F[i] + F[i + 1]) / 2 + h * h * (dF[i] - dF[i + 1]) / 12.0;
    r.delta_profile[i + 1] =
        (weight.omega(0.0) * delta0 - running) / weight.omega(r.t[i + 1]);
  }
  return r;
}

struct DeltaDiagnostic {
  std::vector<double> t, closed_form, pointwise;
  double max_mismatch = 0.0;   // max |closed - pointwise|
  double neg_part_norm = 0.0;  // max over nodes of max(-delta, 0)
  double lipschitz_t = 0.0;    // max |d delta / dt|
};

// First-integral defect on an internally refined grid; the two independent
// routes (pointwise defect vs. closed running-integral formula) must agree.
inline DeltaDiagnostic delta_diagnostic(const DoubleWell& well, const Weight& weight,
                                        const BoundaryData1D& data, double eps,
                                        int cells_per_eps = 2048,
                                        const MinimizeOptions& opts = {}) {
  const Grid fine = Grid::for_epsilon(weight.length, eps, cells_per_eps);
  const MinimizerResult r = minimize(well, weight, data, fine, eps, opts);
  const double h = fine.h();
  const std::vector<double> dv = detail::nodal_derivative(r.v, h);

  DeltaDiagnostic d;
  d.t = r.t;
  d.pointwise.resize(fine.n + 1);
  for (int i = 0; i <= fine.n; ++i) {
    d.pointwise[i] = eps * eps * dv[i] * dv[i] - well.w(r.v[i]);
  }
  d.closed_form = r.delta_profile;
  for (int i = 0; i <= fine.n; ++i) {
    d.max_mismatch = std::max(d.max_mismatch, std::abs(d.closed_form[i] - d.pointwise[i]));
    d.neg_part_norm = std::max(d.neg_part_norm, std::max(-d.closed_form[i], 0.0));
    if (i > 0) {
      d.lipschitz_t = std::max(
          d.lipschitz_t, std::abs(d.closed_form[i] - d.closed_form[i - 1]) / h);
    }
  }
  return d;
}

struct RescaledView {
  std::vector<double> s, w;           // w(s) = v(eps s)
  std::array<double, 3> sup_dist{};   // sup |w - z_alpha| on [0,N], N in {1,2,4}
};

inline RescaledView rescaled_view(const MinimizerResult& result, const DoubleWell& well,
                                  int profile_resolution = 800) {
  RescaledView view;
  const TransitionProfile z =
      build_profile(well, result.data.alpha_limit, profile_resolution);
  view.s.resize(result.v.size());
  view.w = result.v;
  const std::array<double, 3> windows{1.0, 2.0, 4.0};
  for (size_t i = 0; i < result.v.size(); ++i) {
    view.s[i] = result.t[i] / result.eps;
    for (size_t k = 0; k < windows.size(); ++k) {
      if (view.s[i] <= windows[k]) {
        view.sup_dist[k] = std::max(view.sup_dist[k],
                                    std::abs(result.v[i] - z.eval(view.s[i])));
      }
    }
  }
  return view;
}

// Collocation form of the Euler-Lagrange residual,
//   eps^2 v'' - W'(v)/2 + eps^2 (omega'/omega) v',
// with centered second differences; consistency proxy for the solver form.
inline std::vector<double> el_collocation_residual(const DoubleWell& well,
                                                   const Weight& weight,
                                                   const Grid& grid, double eps,
                                                   const std::vector<double>& v) {
  const double h = grid.h();
  std::vector<double> r(grid.n + 1, 0.0);
  for (int i = 1; i < grid.n; ++i) {
    const double t = grid.node(i);
    r[i] = eps * eps * (v[i + 1] - 2 * v[i] + v[i - 1]) / (h * h) -
           0.5 * well.dw(v[i]) +
           eps * eps * (weight.domega(t) / weight.omega(t)) *
               (v[i + 1] - v[i - 1]) / (2 * h);
  }
  return r;
}

// Sharp-interface first-order functional on {a,b}-valued step functions.
inline double energy_g1_sharp(const DoubleWell& well, const Weight& weight,
                              const std::vector<double>& jumps, double start_phase,
                              double v0_target, double vT_target) {
  if (start_phase != well.a && start_phase != well.b) {
    throw DomainError("energy_g1_sharp: start phase must be a or b");
  }
  const double cw = geodesic_distance(well, well.a, well.b);
  double phase = start_phase;
  double total = weight.omega(0.0) * geodesic_distance(well, phase, v0_target);
  double prev = 0.0;
  for (double tau : jumps) {
    if (!(tau > prev && tau < weight.length)) {
      throw DomainError("energy_g1_sharp: jumps must be increasing inside (0,T)");
    }
    prev = tau;
    total += cw * weight.omega(tau);
    phase = (phase == well.a) ? well.b : well.a;
  }
  total += weight.omega(weight.length) * geodesic_distance(well, phase, vT_target);
  return total;
}

// Weight-spread threshold below which the constant-b minimality argument
// applies.
inline double smallness_threshold(const DoubleWell& well, double alpha_minus) {
  return 0.05 * geodesic_distance(well, well.a, well.b) /
         geodesic_distance(well, alpha_minus, well.b);
}

inline bool weight_lower_bound_holds(const Weight& weight, double kappa0,
                                     int n_samples = 1024) {
  for (int i = 0; i <= n_samples; ++i) {
    const double t = weight.length * i / n_samples;
    if (weight.omega(t) < weight.omega(0.0) - 0.5 * kappa0 * t - 1e-12) return false;
  }
  return true;
}

}  // namespace cahn
