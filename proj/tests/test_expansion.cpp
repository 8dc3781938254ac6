#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "cahn/expansion.hpp"

using namespace cahn;

namespace {

const double kTwoPi = 2.0 * std::acos(-1.0);

DoubleWell canonical() { return DoubleWell::canonical(0.0, 1.0, 0.5); }

BoundaryDatum constant_datum(double g) {
  BoundaryDatum d;
  d.g = [g](double) { return g; };
  d.dg_dtheta = [](double) { return 0.0; };
  return d;
}

const std::vector<double> kSweep = {0.04, 0.02, 0.01, 0.005};

}  // namespace

TEST_CASE("line fits and decay orders") {
  SECTION("exact line is recovered exactly") {
    std::vector<double> x = {0.0, 1.0, 2.5, 4.0}, y;
    for (double xi : x) y.push_back(3.0 * xi - 2.0);
    const LineFit f = fit_line(x, y);
    REQUIRE(f.slope == Catch::Approx(3.0).margin(1e-14));
    REQUIRE(f.intercept == Catch::Approx(-2.0).margin(1e-14));
    REQUIRE(f.r_squared == Catch::Approx(1.0).margin(1e-14));
  }
  SECTION("scatter lowers r_squared") {
    const std::vector<double> x = {0.0, 1.0, 2.0, 3.0};
    const std::vector<double> y = {0.0, 1.4, 1.6, 3.0};
    const LineFit f = fit_line(x, y);
    REQUIRE(f.r_squared < 1.0);
    REQUIRE(f.r_squared > 0.9);
  }
  SECTION("degenerate inputs are rejected") {
    REQUIRE_THROWS_AS(fit_line({1.0}, {2.0}), DomainError);
    REQUIRE_THROWS_AS(fit_line({1.0, 2.0}, {1.0, 2.0, 3.0}), DomainError);
    REQUIRE_THROWS_AS(fit_line({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0}), NumericsError);
  }
  SECTION("decay order of a power law") {
    std::vector<double> eps = {0.08, 0.04, 0.02, 0.01}, err;
    for (double e : eps) err.push_back(5.0 * std::pow(e, 2.5));
    REQUIRE(fit_decay_order(eps, err) == Catch::Approx(2.5).margin(1e-12));
    REQUIRE_THROWS_AS(fit_decay_order({0.1, 0.05}, {1.0, 0.0}), DomainError);
    REQUIRE_THROWS_AS(fit_decay_order({0.1, -0.05}, {1.0, 0.5}), DomainError);
  }
}

TEST_CASE("richardson extrapolation and order fitting") {
  const std::vector<double> eps = {0.04, 0.02, 0.01, 0.005};

  SECTION("first-order sequence lands on the planted limit") {
    std::vector<double> v;
    for (double e : eps) v.push_back(7.25 - 3.0 * e);
    const Extrapolation ex = richardson_extrapolate(eps, v, 1.0);
    REQUIRE(ex.limit == Catch::Approx(7.25).margin(1e-13));
    REQUIRE(ex.fitted_order == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(ex.order_trusted);
    REQUIRE(ex.monotone);
  }
  SECTION("slow fractional order is detected and used") {
    std::vector<double> v;
    for (double e : eps) v.push_back(2.0 + 1.7 * std::pow(e, 0.3));
    const Extrapolation ex = richardson_extrapolate(eps, v, 1.0);
    REQUIRE_FALSE(ex.order_trusted);
    REQUIRE(ex.fitted_order == Catch::Approx(0.3).margin(1e-9));
    REQUIRE(ex.limit == Catch::Approx(2.0).margin(1e-12));
  }
  SECTION("non-monotone tail only raises the flag") {
    const std::vector<double> v = {1.0, 0.5, 0.8, 0.6};
    const Extrapolation ex = richardson_extrapolate(eps, v, 1.0);
    REQUIRE_FALSE(ex.monotone);
    REQUIRE_FALSE(ex.order_trusted);
    REQUIRE(ex.limit == 0.6);
  }
  SECTION("stationary zero differences extrapolate to the shared value") {
    const std::vector<double> v = {0.0, 0.0, 0.0, 0.0};
    const Extrapolation ex = richardson_extrapolate(eps, v, 1.0);
    REQUIRE(ex.monotone);
    REQUIRE(ex.limit == 0.0);
  }
  SECTION("bad sweeps are rejected") {
    REQUIRE_THROWS_AS(richardson_extrapolate({0.01, 0.02}, {1.0, 2.0}, 1.0), DomainError);
    REQUIRE_THROWS_AS(richardson_extrapolate({0.02}, {1.0}, 1.0), DomainError);
    REQUIRE_THROWS_AS(richardson_extrapolate(eps, {1.0, 2.0}, 1.0), DomainError);
    REQUIRE_THROWS_AS(richardson_extrapolate(eps, {1.0, 2.0, 3.0, 4.0}, -1.0), DomainError);
  }
}

TEST_CASE("predicted second-order boundary integral") {
  const DoubleWell well = canonical();

  SECTION("datum at the far well contributes nothing") {
    REQUIRE(predicted_limit(make_circle(1.0), constant_datum(1.0), well) == 0.0);
  }
  SECTION("unit circle with constant datum") {
    const double tail05 = build_profile(well, 0.5).tail_integral;
    const double pred = predicted_limit(make_circle(1.0), constant_datum(0.5), well, 256);
    REQUIRE(pred == Catch::Approx(-kTwoPi * tail05).margin(1e-12));
  }
  SECTION("inner annulus circle, datum at the near well") {
    const double tail0 = build_profile(well, 0.0).tail_integral;
    const double pred = predicted_limit(make_inner_circle(0.5), constant_datum(0.0), well, 256);
    // kappa = -1/r0 and length 2 pi r0: the radius cancels, sign positive
    REQUIRE(pred == Catch::Approx(kTwoPi * tail0).margin(1e-12));
  }
  SECTION("total curvature makes the integral shape-independent") {
    // closed curve of turning number one: integral of -kappa dH^1 = -2 pi
    // regardless of shape, so a constant datum reproduces the circle value
    const BoundaryCurve wavy = make_fourier_curve(1.0, {0.0, 0.15}, {0.1});
    const double tail05 = build_profile(well, 0.5).tail_integral;
    const double pred = predicted_limit(wavy, constant_datum(0.5), well, 64);
    REQUIRE(pred == Catch::Approx(-kTwoPi * tail05).margin(1e-12));
  }
  SECTION("admissibility gate") {
    // datum dips to the near well on a convex boundary: kappa = +1 >= kappa0
    REQUIRE_THROWS_AS(predicted_limit(make_circle(1.0), constant_datum(0.05), well),
                      ConfigError);
    try {
      predicted_limit(make_circle(1.0), constant_datum(0.05), well);
    } catch (const ConfigError& e) {
      REQUIRE(std::string(e.what()).find("admissibility") != std::string::npos);
    }
  }
}

TEST_CASE("slice sweep mechanics") {
  const DoubleWell well = canonical();
  const BoundaryCurve disk = make_circle(1.0);

  SECTION("radial symmetry collapses to a single solve") {
    const std::vector<SliceResult> s =
        sweep_slices(disk, constant_datum(0.5), well, 0.02);
    const double quad = slice_quadrature(s, &SliceResult::slice_g2);
    REQUIRE(quad == Catch::Approx(kTwoPi * s.front().slice_g2).epsilon(1e-10));
    double arc = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (j > 0) REQUIRE(s[j].theta > s[j - 1].theta);
      REQUIRE(s[j].slice_g2 == s.front().slice_g2);  // shared cache entry
      REQUIRE(s[j].end_value == s[j].beta_eps);      // Dirichlet end honored
      arc += s[j].arc_weight;
    }
    REQUIRE(arc == Catch::Approx(kTwoPi).margin(1e-12));
  }
  SECTION("datum at the far well costs nothing") {
    const std::vector<SliceResult> s =
        sweep_slices(disk, constant_datum(1.0), well, 0.02);
    for (const SliceResult& r : s) {
      REQUIRE(r.slice_g2 == 0.0);
      REQUIRE(r.slice_g0 == 0.0);
    }
  }
  SECTION("slice too short for the boundary transition is rejected") {
    SweepOptions opts;
    opts.tube_delta = 0.5;
    opts.slice_length = 0.1;
    REQUIRE_THROWS_AS(
        sweep_slices(make_inner_circle(0.5), constant_datum(0.0), well, 0.04, opts),
        ConfigError);
  }
  SECTION("solver failures aggregate into one report") {
    SweepOptions opts;
    opts.solve.max_newton = 1;
    opts.solve.continuation = false;
    try {
      sweep_slices(disk, constant_datum(0.5), well, 0.04, opts);
      FAIL("expected an aggregated solver failure");
    } catch (const SolverError& e) {
      const std::string what = e.what();
      REQUIRE(what.find("slice solve(s) failed") != std::string::npos);
      REQUIRE(what.find("theta = ") != std::string::npos);
      REQUIRE_FALSE(e.last_iterate.empty());
    }
  }
  SECTION("repeat sweeps are byte-identical") {
    const std::vector<SliceResult> s1 =
        sweep_slices(disk, constant_datum(0.5), well, 0.02);
    const std::vector<SliceResult> s2 =
        sweep_slices(disk, constant_datum(0.5), well, 0.02);
    REQUIRE(s1.size() == s2.size());
    for (std::size_t j = 0; j < s1.size(); ++j) {
      REQUIRE(s1[j].slice_g2 == s2[j].slice_g2);
      REQUIRE(s1[j].slice_g0 == s2[j].slice_g0);
    }
  }
}

TEST_CASE("numeric sweeps approach the predicted limit") {
  const DoubleWell well = canonical();

  SECTION("unit disk converges at first order") {
    const BoundaryCurve disk = make_circle(1.0);
    const BoundaryDatum datum = constant_datum(0.5);
    const double pred = predicted_limit(disk, datum, well, 256);
    std::vector<double> numeric;
    double dw_beta_max = 0.0;
    for (double eps : kSweep) {
      const std::vector<SliceResult> s = sweep_slices(disk, datum, well, eps);
      numeric.push_back(slice_quadrature(s, &SliceResult::slice_g2));
      // quantified per-slice lower bound: G2 >= -M'(1 + d_W gaps / eps)
      for (const SliceResult& r : s) {
        const double gaps = geodesic_distance(well, r.alpha_eps, r.g) +
                            geodesic_distance(well, r.beta_eps, well.b);
        REQUIRE(r.slice_g2 >= -2.0 * (1.0 + gaps / eps));
        dw_beta_max = std::max(dw_beta_max, geodesic_distance(well, r.beta_eps, well.b));
      }
    }
    REQUIRE(dw_beta_max < 1e-5);  // plateau schedule keeps the end cost negligible
    const Extrapolation ex = richardson_extrapolate(kSweep, numeric, 1.0);
    REQUIRE(ex.order_trusted);
    REQUIRE(ex.fitted_order == Catch::Approx(1.0).margin(0.2));
    REQUIRE(ex.limit == Catch::Approx(pred).epsilon(1e-3));
    // each sweep value moves monotonically toward the extrapolated limit
    for (std::size_t k = 1; k < numeric.size(); ++k) {
      REQUIRE(std::abs(numeric[k] - ex.limit) < std::abs(numeric[k - 1] - ex.limit));
    }
  }

  SECTION("annulus inner circle: slow order is reported, limit still within 3%") {
    const BoundaryCurve inner = make_inner_circle(0.5);
    const BoundaryDatum datum = constant_datum(0.0);
    const double pred = predicted_limit(inner, datum, well, 256);
    SweepOptions opts;
    opts.tube_delta = 0.5;  // negative curvature widens the tube; transitions are long
    std::vector<double> numeric;
    for (double eps : kSweep) {
      numeric.push_back(numeric_second_order(inner, datum, well, eps, opts));
    }
    const Extrapolation ex = richardson_extrapolate(kSweep, numeric, 1.0);
    // the datum sits at the degenerate well: the approach is far slower than
    // first order and the extrapolation must say so
    REQUIRE_FALSE(ex.order_trusted);
    REQUIRE(ex.fitted_order < 0.5);
    REQUIRE(ex.fitted_order > 0.0);
    REQUIRE(ex.limit == Catch::Approx(pred).epsilon(0.03));
  }

  SECTION("non-radial boundary at one eps") {
    const BoundaryCurve wavy = make_fourier_curve(1.0, {0.0, 0.15}, {0.1});
    const BoundaryDatum datum = constant_datum(0.5);
    const double pred = predicted_limit(wavy, datum, well, 256);
    const double quad = numeric_second_order(wavy, datum, well, 0.02);
    REQUIRE(quad == Catch::Approx(pred).epsilon(0.02));
  }
}

TEST_CASE("expansion of minima table") {
  const DoubleWell well = canonical();
  const BoundaryCurve disk = make_circle(1.0);

  SECTION("unit disk bookkeeping") {
    const BoundaryDatum datum = constant_datum(0.5);
    const ExpansionReport rep = expansion_table(disk, datum, well, kSweep);
    REQUIRE(rep.m0 == 0.0);
    REQUIRE(rep.m1 == Catch::Approx(kTwoPi * geodesic_distance(well, 0.5, 1.0)).margin(1e-12));
    REQUIRE(rep.m2 == rep.extrapolated_f2);
    REQUIRE(rep.extrapolated_f2 == Catch::Approx(rep.predicted_f2).epsilon(1e-3));
    REQUIRE_FALSE(rep.extrapolation_warning);
    REQUIRE(rep.residual_order == Catch::Approx(3.0).margin(0.5));
    for (std::size_t k = 0; k < rep.eps.size(); ++k) {
      const double e = rep.eps[k];
      // minimizer sits below its recovery competitor, both near the limit
      REQUIRE(rep.numeric_f2[k] <= rep.recovery_f2[k]);
      REQUIRE(rep.recovery_f2[k] == Catch::Approx(rep.predicted_f2).epsilon(5e-4));
      // the residual is exactly the remaining second-order gap
      const double expect = e * e * (rep.numeric_f2[k] - rep.m2);
      REQUIRE(rep.residual[k] == Catch::Approx(expect).margin(1e-15));
    }
  }

  SECTION("datum at the far well zeroes every column") {
    const ExpansionReport rep = expansion_table(disk, constant_datum(1.0), well,
                                                {0.04, 0.02, 0.01});
    REQUIRE(rep.predicted_f2 == 0.0);
    REQUIRE(rep.m1 == 0.0);
    REQUIRE(rep.m2 == 0.0);
    REQUIRE_FALSE(rep.extrapolation_warning);
    for (double r : rep.residual) REQUIRE(std::abs(r) < 1e-14);
  }
}

TEST_CASE("interior closeness fits") {
  const DoubleWell well = canonical();
  const double T = 0.25, mu = 0.5, C0 = 0.5;
  const Weight w = Weight::affine(T, 1.0, 0.3);

  std::vector<MinimizerResult> slices;
  for (double eps : kSweep) {
    BoundaryData1D data;
    data.alpha_eps = 0.2;
    data.beta_eps = 1.0 - C0 * (1.0 - 0.2) * std::exp(-mu * T / eps);
    data.alpha_limit = 0.2;
    slices.push_back(minimize(well, w, data, Grid::for_epsilon(T, eps, 32), eps));
  }

  SECTION("end-gap fit recovers the planted exponential") {
    const ClosenessReport rep = interior_closeness(well, slices, T);
    REQUIRE(rep.slope == Catch::Approx(-mu * T).margin(1e-6));
    REQUIRE(rep.r_squared > 0.9999);
    REQUIRE(rep.pass());
  }
  SECTION("inside the slice the profile has already arrived") {
    // subquadratic wells hit b exactly: at any interior depth the gap is 0
    // to the last float and the log-fit is undefined; that is the honest
    // strong form of the exponential closeness bound
    REQUIRE_THROWS_AS(interior_closeness(well, slices, T / 2.0), NumericsError);
    const double hitting = build_profile(well, 0.2).hitting_time;
    int checked = 0;
    for (const MinimizerResult& r : slices) {
      const int mid = r.grid.n / 2;
      if (r.eps * hitting >= r.grid.node(mid)) continue;  // still in transit
      REQUIRE(r.v[mid] == well.b);
      ++checked;
    }
    REQUIRE(checked >= 2);
  }
  SECTION("doubling the depth doubles the exponent") {
    const double eps = kSweep.front();
    BoundaryData1D data;
    data.alpha_eps = 0.2;
    data.beta_eps = 1.0 - C0 * (1.0 - 0.2) * std::exp(-mu * 2.0 * T / eps);
    data.alpha_limit = 0.2;
    const MinimizerResult far = minimize(well, Weight::affine(2.0 * T, 1.0, 0.3), data,
                                         Grid::for_epsilon(2.0 * T, eps, 32), eps);
    const double gap_near = well.b - slices.front().v.back();
    const double gap_far = well.b - far.v.back();
    REQUIRE(std::log(gap_far) - std::log(gap_near) == Catch::Approx(-mu * T / eps).margin(1e-9));
  }
  SECTION("degenerate inputs are rejected") {
    REQUIRE_THROWS_AS(interior_closeness(well, {slices[0], slices[1]}, T), DomainError);
    REQUIRE_THROWS_AS(interior_closeness(well, slices, 4.0), DomainError);
    // fabricated non-monotone gaps
    std::vector<MinimizerResult> fake(slices.begin(), slices.begin() + 3);
    fake[1].v.back() = 1.0 - 2.0 * (1.0 - fake[0].v.back());
    REQUIRE_THROWS_AS(interior_closeness(well, fake, T), NumericsError);
  }
}

TEST_CASE("slower normalization collapses the second order") {
  const DoubleWell well = canonical();
  const Weight w = Weight::from_functions(
      0.5, [](double t) { return 1.0 + 0.3 * t; }, [](double) { return 0.3; });
  std::vector<double> g2s, delta;
  for (double eps : kSweep) {
    BoundaryData1D data;
    data.alpha_eps = 0.2;
    data.beta_eps = 1.0;
    data.alpha_limit = 0.2;
    g2s.push_back(minimize(well, w, data, Grid::for_epsilon(0.5, eps, 32), eps).energy_g2);
    delta.push_back(std::sqrt(eps));
  }
  const double tail02 = build_profile(well, 0.2).tail_integral;
  const Extrapolation base = richardson_extrapolate(kSweep, g2s, 1.0);
  REQUIRE(base.limit == Catch::Approx(0.3 * tail02).epsilon(0.02));

  const std::vector<double> scaled = rescale_second_order(kSweep, g2s, delta);
  for (std::size_t k = 0; k < scaled.size(); ++k) {
    REQUIRE(scaled[k] == Catch::Approx(g2s[k] * kSweep[k]).epsilon(1e-14));  // eps^2/delta^2 = eps
  }
  const Extrapolation ex = richardson_extrapolate(kSweep, scaled, 1.0);
  REQUIRE(std::abs(ex.limit) < 0.02 * std::abs(0.3 * tail02));
  REQUIRE(std::abs(ex.limit) < 1e-4);

  REQUIRE_THROWS_AS(rescale_second_order(kSweep, g2s, {1.0}), DomainError);
  REQUIRE_THROWS_AS(rescale_second_order({0.1}, {1.0}, {0.0}), DomainError);
}
