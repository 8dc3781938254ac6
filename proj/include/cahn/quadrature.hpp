#pragma once

// Panel Gauss-Legendre quadrature with adaptive bisection.  Everything is
// templated on the scalar type so the same code runs the double evaluators
// and the long-double oracle pass used to freeze fixture values.

#include <array>
#include <cmath>
#include <cstdlib>

#include "cahn/errors.hpp"

namespace cahn {

// Nodes and weights for N-point Gauss-Legendre on [-1,1].  Computed once by
// Newton iteration on P_N in long double; accurate to ~1e-19, enough for
// both scalar types.
template <int N>
struct GaussLegendreTable {
  std::array<long double, N> x{};
  std::array<long double, N> w{};

  GaussLegendreTable() {
    const long double pi = std::acos(-1.0L);
    for (int i = 0; i < N; ++i) {
      long double xi = std::cos(pi * (i + 0.75L) / (N + 0.5L));
      long double dp = 0.0L;
      for (int it = 0; it < 100; ++it) {
        long double p0 = 1.0L, p1 = xi;
        for (int k = 2; k <= N; ++k) {
          long double pk = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        dp = N * (xi * p1 - p0) / (xi * xi - 1.0L);
        long double dx = p1 / dp;
        xi -= dx;
        if (std::abs(dx) < 1e-19L) break;
      }
      x[i] = xi;
      w[i] = 2.0L / ((1.0L - xi * xi) * dp * dp);
    }
  }
};

inline const GaussLegendreTable<16>& gl16_table() {
  static const GaussLegendreTable<16> table;
  return table;
}

template <class Real, class F>
Real gl16_panel(F&& f, Real lo, Real hi) {
  const auto& t = gl16_table();
  const Real mid = (lo + hi) / 2;
  const Real half = (hi - lo) / 2;
  Real sum = 0;
  for (int i = 0; i < 16; ++i) {
    sum += static_cast<Real>(t.w[i]) * f(mid + half * static_cast<Real>(t.x[i]));
  }
  return sum * half;
}

namespace detail {

template <class Real, class F>
Real refine_panel(F& f, Real lo, Real hi, Real whole, Real tol, int depth) {
  const Real mid = (lo + hi) / 2;
  const Real left = gl16_panel(f, lo, mid);
  const Real right = gl16_panel(f, mid, hi);
  const Real split = left + right;
  if (std::abs(split - whole) <= tol || hi - lo <= std::abs(mid) * Real(1e-15)) {
    return split;
  }
  if (depth >= 48) {
    throw NumericsError("adaptive quadrature did not converge");
  }
  return refine_panel(f, lo, mid, left, tol / 2, depth + 1) +
         refine_panel(f, mid, hi, right, tol / 2, depth + 1);
}

}  // namespace detail

// Integrate f over [lo, hi] (lo <= hi).  The error control is the classic
// bisection test: a panel is accepted when splitting changes it by less than
// its share of rel_tol * (first whole-interval estimate).
template <class Real, class F>
Real integrate_adaptive(F&& f, Real lo, Real hi, Real rel_tol = Real(1e-12)) {
  if (!(lo <= hi)) throw DomainError("integrate_adaptive: lo > hi");
  if (lo == hi) return Real(0);
  const Real whole = gl16_panel(f, lo, hi);
  // Seed the scale with a 4-panel estimate in case the single panel badly
  // underestimates a peaked integrand.
  Real scale = std::abs(whole);
  {
    Real s4 = 0;
    for (int k = 0; k < 4; ++k) {
      const Real a = lo + (hi - lo) * Real(k) / 4;
      const Real b = lo + (hi - lo) * Real(k + 1) / 4;
      s4 += std::abs(gl16_panel(f, a, b));
    }
    if (s4 > scale) scale = s4;
  }
  const Real tol = rel_tol * (scale > Real(0) ? scale : Real(1));
  return detail::refine_panel(f, lo, hi, whole, tol, 0);
}

}  // namespace cahn
