#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cahn/potential.hpp"
#include "cahn/profile.hpp"

using namespace cahn;

namespace {
const DoubleWell canon = DoubleWell::canonical(0.0, 1.0, 0.5);
}

TEST_CASE("hitting time equals the singular time integral") {
  // From the left well the closed form is B((1-q)/2, (1-q)/2).
  auto p0 = build_profile(canon, 0.0);
  REQUIRE(p0.hitting_time == Catch::Approx(std::beta(0.25, 0.25)).epsilon(1e-9));

  // Frozen high-precision references for interior starts.
  auto p02 = build_profile(canon, 0.2);
  REQUIRE(p02.hitting_time == Catch::Approx(4.65212838842344606).epsilon(1e-9));
  auto p05 = build_profile(canon, 0.5);
  REQUIRE(p05.hitting_time == Catch::Approx(3.70814935460274384).epsilon(1e-9));

  // Ladder accumulation agrees with one direct adaptive pass, any frame.
  const DoubleWell shifted = DoubleWell::canonical(-1.0, 2.0, 0.3, 0.7);
  auto ps = build_profile(shifted, -0.4);
  REQUIRE(ps.hitting_time ==
          Catch::Approx(psi_integral(shifted, -0.4, 2.0)).epsilon(1e-9));
}

TEST_CASE("profile satisfies z' = sqrt(W(z))") {
  auto residual_at = [](const DoubleWell& well, const TransitionProfile& p,
                        double t) {
    return std::abs(p.eval_deriv(t) - std::sqrt(well.w(p.eval(t))));
  };

  SECTION("at interval midpoints, including a degenerate start") {
    for (double alpha : {0.0, 0.2}) {
      auto p = build_profile(canon, alpha);
      double worst = 0.0;
      for (size_t i = 0; i + 1 < p.table.x.size(); ++i) {
        const double mid = 0.5 * (p.table.x[i] + p.table.x[i + 1]);
        worst = std::max(worst, residual_at(canon, p, mid));
      }
      CAPTURE(alpha);
      REQUIRE(worst <= 1e-8);
    }
  }

  SECTION("at random times") {
    auto p = build_profile(canon, 0.0);
    std::mt19937 rng(321);
    std::uniform_real_distribution<double> u(0.0, p.hitting_time);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) worst = std::max(worst, residual_at(canon, p, u(rng)));
    REQUIRE(worst <= 1e-8);
  }

  SECTION("on a shifted frame with smaller exponent") {
    const DoubleWell shifted = DoubleWell::canonical(-1.0, 2.0, 0.3, 0.7);
    auto p = build_profile(shifted, -1.0, 1600);
    double worst = 0.0;
    for (size_t i = 0; i + 1 < p.table.x.size(); ++i) {
      const double mid = 0.5 * (p.table.x[i] + p.table.x[i + 1]);
      worst = std::max(worst, residual_at(shifted, p, mid));
    }
    REQUIRE(worst <= 1e-8);
  }
}

TEST_CASE("flow property: restarting the profile reproduces it") {
  auto p = build_profile(canon, 0.2);
  for (double s0 : {0.5, 1.5}) {
    const double a2 = p.eval(s0);
    auto q = build_profile(canon, a2);
    REQUIRE(q.hitting_time == Catch::Approx(p.hitting_time - s0).margin(1e-9));
    for (int k = 0; k <= 40; ++k) {
      const double t = q.hitting_time * k / 40.0;
      REQUIRE(q.eval(t) == Catch::Approx(p.eval(s0 + t)).margin(1e-8));
    }
  }
}

TEST_CASE("arrival is exact and quartic") {
  auto p = build_profile(canon, 0.2);
  const double T = p.hitting_time;
  REQUIRE(p.eval(T) == 1.0);
  REQUIRE(p.eval(T + 3.0) == 1.0);
  REQUIRE(p.eval_deriv(T + 3.0) == 0.0);

  // Approach to the well: b - z(T-s) = (s/4)^4 (1 + O(s^4)) for q = 1/2.
  for (double s : {0.05, 0.1, 0.2, 0.4}) {
    const double gap = 1.0 - p.eval(T - s);
    REQUIRE(gap == Catch::Approx(std::pow(s / 4.0, 4.0)).epsilon(1e-2));
  }

  // Monotone nondecreasing along the way.
  double prev = p.eval(0.0);
  REQUIRE(prev == 0.2);
  for (int k = 1; k <= 1000; ++k) {
    const double v = p.eval(T * k / 1000.0);
    REQUIRE(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("time-to-value roundtrip through the interpolant") {
  auto p = build_profile(canon, 0.2);
  for (double zeta : {0.25, 0.4, 0.6, 0.85, 0.99}) {
    const double t = psi_integral(canon, 0.2, zeta);
    REQUIRE(p.eval(t) == Catch::Approx(zeta).margin(1e-9));
  }
}

TEST_CASE("tail integral: two forms, closed form, and frozen references") {
  auto p0 = build_profile(canon, 0.0);
  auto p02 = build_profile(canon, 0.2);
  auto p05 = build_profile(canon, 0.5);

  SECTION("the direct form and the by-parts form agree") {
    for (const auto* p : {&p0, &p02, &p05}) {
      REQUIRE(p->tail_integral ==
              Catch::Approx(p->tail_integral_alt).epsilon(1e-7));
    }
  }

  SECTION("start at the far well: B(1/4,1/4) B(7/4,7/4), i.e. 3 pi / 5") {
    const double closed = std::beta(0.25, 0.25) * std::beta(1.75, 1.75);
    REQUIRE(closed == Catch::Approx(0.6 * M_PI).epsilon(1e-14));
    REQUIRE(p0.tail_integral == Catch::Approx(closed).epsilon(1e-8));
  }

  SECTION("frozen references from nested value-space quadrature") {
    REQUIRE(p02.tail_integral == Catch::Approx(0.50367651830753178).epsilon(1e-8));
    REQUIRE(p05.tail_integral == Catch::Approx(0.163294743870485393).epsilon(1e-8));
  }

  SECTION("independent value-space oracle, canonical and shifted") {
    REQUIRE(p02.tail_integral ==
            Catch::Approx(tail_integral_by_value_quadrature(canon, 0.2)).epsilon(1e-8));
    const DoubleWell shifted = DoubleWell::canonical(-1.0, 2.0, 0.3, 0.7);
    auto ps = build_profile(shifted, 0.3);
    REQUIRE(ps.tail_integral ==
            Catch::Approx(tail_integral_by_value_quadrature(shifted, 0.3)).epsilon(1e-8));
    REQUIRE(ps.tail_integral == Catch::Approx(ps.tail_integral_alt).epsilon(1e-7));
  }

  SECTION("monotone decreasing in the start value") {
    auto p09 = build_profile(canon, 0.9);
    REQUIRE(p0.tail_integral > p02.tail_integral);
    REQUIRE(p02.tail_integral > p05.tail_integral);
    REQUIRE(p05.tail_integral > p09.tail_integral);
    REQUIRE(p09.tail_integral > 0.0);
  }
}

TEST_CASE("degenerate start at the target well") {
  auto p = build_profile(canon, 1.0);
  REQUIRE(p.hitting_time == 0.0);
  REQUIRE(p.tail_integral == 0.0);
  REQUIRE(p.eval(0.0) == 1.0);
  REQUIRE(p.eval(2.5) == 1.0);
  REQUIRE(p.eval_deriv(1.0) == 0.0);
}

TEST_CASE("profile input validation") {
  REQUIRE_THROWS_AS(build_profile(canon, 0.2, 7), ConfigError);
  REQUIRE_THROWS_AS(build_profile(canon, -0.1), DomainError);
  REQUIRE_THROWS_AS(build_profile(canon, 1.5), DomainError);
  auto p = build_profile(canon, 0.2);
  REQUIRE_THROWS_AS(p.eval(-0.5), DomainError);
  REQUIRE_THROWS_AS(p.eval_deriv(-0.5), DomainError);
}
