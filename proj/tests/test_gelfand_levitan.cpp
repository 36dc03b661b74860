#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "tract/direct.hpp"
#include "tract/gelfand_levitan.hpp"

using namespace tract;

namespace {

const PhysicalConstants consts;
const Grid1D kgrid_default{0.003, 0.003, 1000};

BKernel exponential_kernel(double a, double ell, std::size_t n_x) {
  BKernel b;
  b.tgrid = Grid1D::over(0.0, 2.0 * ell, 2 * n_x - 1);
  b.values.resize(b.tgrid.count);
  for (std::size_t i = 0; i < b.tgrid.count; ++i) {
    b.values[i] = -a * std::exp(-a * b.tgrid.coord(i));
  }
  return b;
}

}  // namespace

TEST_CASE("solve_gl with the zero kernel") {
  const std::size_t n = 101;
  BKernel b;
  b.tgrid = Grid1D::over(0.0, 32.0, 2 * n - 1);
  b.values.assign(b.tgrid.count, 0.0);
  const Grid1D xg = Grid1D::over(0.0, 16.0, n);
  const GLSolution sol = solve_gl({b.tgrid, b.values, std::nullopt}, xg);
  CHECK(sol.cot_theta() == doctest::Approx(0.0));
  for (double v : sol.q.values) CHECK(std::abs(v) < 1e-14);
  for (double v : sol.phi0) CHECK(v == doctest::Approx(1.0));
  const std::vector<double> phi = sol.phi_at(0.8);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(phi[i] == doctest::Approx(std::cos(0.8 * xg.coord(i))));
  }
}

TEST_CASE("solve_gl with the exponential kernel (analytic table)") {
  const double a = 0.05;
  const std::size_t n = 401;
  const BKernel b = exponential_kernel(a, 16.0, n);
  const Grid1D xg = Grid1D::over(0.0, 16.0, n);
  const GLSolution sol = solve_gl({b.tgrid, b.values, std::nullopt}, xg);

  // Continuum solution: h(x, y) = a, q = 0, cot theta = -a, phi0 = 1 + a x.
  CHECK(sol.cot_theta() == doctest::Approx(-a).epsilon(1e-8));
  for (double v : sol.q.values) CHECK(std::abs(v) < 1e-6);
  for (std::size_t i = 0; i < n; i += 29) {
    CHECK(sol.phi0[i] ==
          doctest::Approx(1.0 + a * xg.coord(i)).epsilon(1e-7));
    CHECK(sol.h[n - 1][i] == doctest::Approx(a).epsilon(1e-6));
  }

  // Analytic continuation used by the Darboux step: phi(ia, x) = e^{a x}.
  const std::vector<double> phi_ia = sol.phi_imag_axis(a);
  for (std::size_t i = 0; i < n; i += 57) {
    CHECK(phi_ia[i] ==
          doctest::Approx(std::exp(a * xg.coord(i))).epsilon(1e-6));
  }
}

TEST_CASE("solve_gl with data-derived kernel recovers the linear duct") {
  const double a = 0.05;
  const std::size_t n = 401;
  const PressureSpectrum s =
      oracle::linear_radius_spectrum(a, 13.0, kgrid_default);
  const BKernel b = b_kernel(s, 32.0, 2 * n - 1);
  const Grid1D xg = Grid1D::over(0.0, 16.0, n);
  const GLSolution sol = solve_gl({b.tgrid, b.values, std::nullopt}, xg);
  CHECK(std::abs(sol.cot_theta() + a) < 1e-4);
  for (double v : sol.q.values) CHECK(std::abs(v) < 1e-4);
}

TEST_CASE("solve_gl with a rank-one bound-state kernel") {
  // G = g^2 cosh(bx) cosh(by) alone has the separable closed form
  // h(x,y) = -g^2 cosh(bx) cosh(by) / (1 + g^2 int_0^x cosh^2).
  const double beta = 0.3, g_sq = 0.5, ell = 2.0;
  const std::size_t n = 201;
  BKernel zero;
  zero.tgrid = Grid1D::over(0.0, 2.0 * ell, 2 * n - 1);
  zero.values.assign(zero.tgrid.count, 0.0);
  const Grid1D xg = Grid1D::over(0.0, ell, n);
  const GLSolution sol =
      solve_gl({zero.tgrid, zero.values, std::make_pair(beta, g_sq)}, xg);
  for (std::size_t i = 0; i < n; i += 23) {
    const double x = xg.coord(i);
    const double run =
        x / 2.0 + std::sinh(2.0 * beta * x) / (4.0 * beta);  // int cosh^2
    const double expected = -g_sq * std::cosh(beta * x) * std::cosh(beta * x) /
                            (1.0 + g_sq * run);
    CHECK(sol.h[i][i] == doctest::Approx(expected).epsilon(5e-5));
  }
}

TEST_CASE("radius_no_bound") {
  SUBCASE("linear duct and the endpoint identity") {
    const double a = 0.05, p_inf = 13.0;
    const std::size_t n = 401;
    const BKernel b = exponential_kernel(a, 16.0, n);
    const Grid1D xg = Grid1D::over(0.0, 16.0, n);
    const GLSolution sol = solve_gl({b.tgrid, b.values, std::nullopt}, xg);
    const RadiusProfile r = radius_no_bound(sol, p_inf, consts);
    const double scale = std::sqrt(
        consts.c_mu() / (std::numbers::pi * p_inf * (1.0 + a * 16.0)));
    for (std::size_t i = 0; i < n; i += 40) {
      CHECK(r.values[i] ==
            doctest::Approx(scale * (1.0 + a * xg.coord(i))).epsilon(1e-6));
    }
    CHECK(std::numbers::pi * r.glottis_value() * r.lip_value() * p_inf ==
          doctest::Approx(consts.c_mu()).epsilon(1e-6));
  }

  SUBCASE("flat spectrum gives the uniform duct") {
    PressureSpectrum s;
    s.kgrid = kgrid_default;
    s.values.assign(kgrid_default.count, 21.0);
    s.p_inf = 21.0;
    s.tail_c = 0.0;
    const std::size_t n = 201;
    const BKernel b = b_kernel(s, 32.0, 2 * n - 1);
    const Grid1D xg = Grid1D::over(0.0, 16.0, n);
    const GLSolution sol = solve_gl({b.tgrid, b.values, std::nullopt}, xg);
    const RadiusProfile r = radius_no_bound(sol, s.p_inf, consts);
    const double expected =
        std::sqrt(consts.c_mu() / (std::numbers::pi * s.p_inf));
    for (double v : r.values) CHECK(v == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("darboux transform") {
  const double a = 0.05;
  const std::size_t n = 401;
  const BKernel b = exponential_kernel(a, 16.0, n);
  const Grid1D xg = Grid1D::over(0.0, 16.0, n);
  const GLSolution sol = solve_gl({b.tgrid, b.values, std::nullopt}, xg);

  SUBCASE("linear duct: boundary parameter flips and phi becomes 1 - a x") {
    const DarbouxResult dr = darboux(sol, a, 2.0 * a);
    CHECK(dr.cot_theta == doctest::Approx(a).epsilon(1e-6));
    for (std::size_t i = 0; i < n; i += 31) {
      CHECK(dr.phi0[i] ==
            doctest::Approx(1.0 - a * xg.coord(i)).epsilon(5e-6));
    }
  }

  SUBCASE("vanishing norming constant is the identity") {
    const DarbouxResult dr = darboux(sol, a, 1e-12);
    for (std::size_t i = 0; i < n; i += 57) {
      CHECK(dr.phi0[i] == doctest::Approx(sol.phi0[i]).epsilon(1e-9));
    }
  }

  SUBCASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(darboux(sol, 0.0, 0.1), validation_error);
    CHECK_THROWS_AS(darboux(sol, 0.1, -0.5), validation_error);
  }
}

TEST_CASE("admissibility criterion") {
  // For the linear duct the criterion reduces to a ell < 1.
  auto build = [](double a, std::size_t n) {
    const BKernel b = exponential_kernel(a, 16.0, n);
    const Grid1D xg = Grid1D::over(0.0, 16.0, n);
    return solve_gl({b.tgrid, b.values, std::nullopt}, xg);
  };

  SUBCASE("a ell < 1 admissible") {
    const GLSolution sol = build(0.05, 201);
    CHECK(admissible(sol.phi0, sol.phi_imag_axis(0.05), sol.xgrid, 0.05));
  }
  SUBCASE("a ell > 1 inadmissible") {
    const GLSolution sol = build(0.07, 201);
    CHECK_FALSE(admissible(sol.phi0, sol.phi_imag_axis(0.07), sol.xgrid, 0.07));
  }
}

TEST_CASE("enumerate_candidates on the two-branch linear fixture") {
  const double a = 0.05, ell = 16.0;
  const double p_inf = consts.c_mu() / (std::numbers::pi * (1.0 + a * ell));
  const PressureSpectrum s =
      oracle::linear_radius_spectrum(a, p_inf, kgrid_default);
  InverseOptions options;
  options.n_x = 401;
  const InverseResult result = enumerate_candidates(s, ell, options, consts);

  REQUIRE(result.report.m_count == 1);
  CHECK(std::abs(result.report.betas[0] - a) < 1e-4);
  CHECK(std::abs(result.report.g_sq[0] - 2.0 * a) < 1e-3);
  CHECK(std::abs(result.report.m_sq[0] - 2.0 * a) < 1e-3);
  CHECK(result.report.scenario == Scenario::NoBoundPositiveSlope);

  // With this plateau the no-bound branch is exactly 1 + a x.
  const RadiusProfile& r0 = result.candidates.no_bound;
  double worst0 = 0.0;
  for (std::size_t i = 0; i < r0.values.size(); ++i) {
    const double expected = 1.0 + a * r0.grid.coord(i);
    worst0 = std::max(worst0, std::abs(r0.values[i] - expected) / expected);
  }
  CHECK(worst0 < 1e-3);
  CHECK(r0.slopeL / r0.glottis_value() == doctest::Approx(a).epsilon(2e-2));
  CHECK(std::abs(r0.slopeL / r0.glottis_value() - a) < 1e-3);

  REQUIRE(result.candidates.with_bound.size() == 1);
  const Candidate& c1 = result.candidates.with_bound[0];
  CHECK(c1.admissible);
  REQUIRE(c1.radius.has_value());
  const RadiusProfile& r1 = *c1.radius;
  const double scale1 = std::sqrt((1.0 + a * ell) / (1.0 - a * ell));
  double worst1 = 0.0;
  for (std::size_t i = 0; i < r1.values.size(); ++i) {
    const double expected = scale1 * (1.0 - a * r1.grid.coord(i));
    worst1 = std::max(worst1, std::abs(r1.values[i] - expected) /
                                  std::abs(expected));
  }
  CHECK(worst1 < 1e-3);
  CHECK(std::abs(r1.slopeL / r1.glottis_value() + a) < 1e-3);

  // Endpoint identity for every candidate.
  for (const RadiusProfile* r : {&r0, &r1}) {
    CHECK(std::numbers::pi * r->glottis_value() * r->lip_value() * p_inf ==
          doctest::Approx(consts.c_mu()).epsilon(1e-6));
  }
}

TEST_CASE("enumerate_candidates: uniform spectrum has a single candidate") {
  PressureSpectrum s;
  s.kgrid = kgrid_default;
  s.values.assign(kgrid_default.count, 21.0);
  s.p_inf = 21.0;
  s.tail_c = 0.0;
  InverseOptions options;
  options.n_x = 201;
  const InverseResult result = enumerate_candidates(s, 16.0, options, consts);
  CHECK(result.report.m_count == 0);
  CHECK(result.candidates.with_bound.empty());
  CHECK(result.report.scenario == Scenario::NoBoundZeroSlope);
}

TEST_CASE("resonance count is invariant under spectrum scaling") {
  const double a = 0.05, ell = 16.0;
  InverseOptions options;
  options.n_x = 201;
  const PressureSpectrum s1 =
      oracle::linear_radius_spectrum(a, 13.0, kgrid_default);
  PressureSpectrum s2 = s1;
  for (double& v : s2.values) v *= 2.5;
  s2.p_inf *= 2.5;
  const InverseResult r1 = enumerate_candidates(s1, ell, options, consts);
  const InverseResult r2 = enumerate_candidates(s2, ell, options, consts);
  REQUIRE(r1.report.m_count == r2.report.m_count);
  CHECK(r1.report.betas[0] == doctest::Approx(r2.report.betas[0]).epsilon(1e-9));
}

TEST_CASE("bound-state recovery: kernel route agrees with Darboux") {
  const double a = 0.05, ell = 16.0;
  const PressureSpectrum s =
      oracle::linear_radius_spectrum(a, 13.0, kgrid_default);
  InverseOptions darboux_route;
  darboux_route.n_x = 301;
  InverseOptions kernel_route = darboux_route;
  kernel_route.bound_route = BoundStateRoute::gl_kernel;

  const InverseResult rd = enumerate_candidates(s, ell, darboux_route, consts);
  const InverseResult rk = enumerate_candidates(s, ell, kernel_route, consts);
  REQUIRE(rd.candidates.with_bound.size() == 1);
  REQUIRE(rk.candidates.with_bound.size() == 1);
  const RadiusProfile& a_ = *rd.candidates.with_bound[0].radius;
  const RadiusProfile& b_ = *rk.candidates.with_bound[0].radius;
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a_.values.size(); ++i) {
    worst = std::max(worst, std::abs(a_.values[i] - b_.values[i]));
    scale = std::max(scale, std::abs(a_.values[i]));
  }
  CHECK(worst / scale < 1e-3);
}

TEST_CASE("pipeline invariants on a smooth forward-generated duct") {
  const double ell = 16.0;
  const RadiusProfile duct = oracle::random_smooth_radius(9, ell, 401, false);
  const PressureSpectrum s = pressure_spectrum(duct, kgrid_default, consts);
  InverseOptions options;
  options.n_x = 401;
  const InverseResult result = enumerate_candidates(s, ell, options, consts);
  const RadiusProfile& rec = result.candidates.no_bound;

  SUBCASE("recovered radius matches the duct") {
    double worst = 0.0;
    for (std::size_t i = 0; i < rec.values.size(); ++i) {
      worst = std::max(worst, std::abs(rec.values[i] - duct.values[i]) /
                                  duct.values[i]);
    }
    CHECK(worst < 5e-3);
  }

  SUBCASE("round trip through the forward solver, L2 within 1 percent") {
    const PressureSpectrum back = pressure_spectrum(rec, kgrid_default, consts);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < kgrid_default.count; ++j) {
      const double k = kgrid_default.coord(j);
      if (k < 0.1 || k > 0.9 * kgrid_default.back()) continue;
      const double d = back.values[j] - s.values[j];
      num += d * d;
      den += s.values[j] * s.values[j];
    }
    CHECK(std::sqrt(num / den) < 0.01);
  }

  SUBCASE("extracted potential matches the duct's second-difference potential") {
    const PotentialProfile q_direct = potential_from_radius(duct);
    const PotentialProfile& q_gl = result.no_bound.q;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < q_direct.values.size(); ++i) {
      const double d = q_gl.values[i] - q_direct.values[i];
      num += d * d;
      den += q_direct.values[i] * q_direct.values[i];
    }
    const double h = q_direct.grid.step;
    CHECK(std::sqrt(num * h) < 5e-3 * (1.0 + std::sqrt(den * h)));
  }

  SUBCASE("phi(0,x) equals the normalized radius") {
    for (std::size_t i = 0; i < rec.values.size(); i += 37) {
      CHECK(result.no_bound.phi0[i] ==
            doctest::Approx(duct.values[i] / duct.values.front()).epsilon(5e-3));
    }
  }
}

TEST_CASE("enumerate_candidates rejects the time-domain method tag") {
  const PressureSpectrum s =
      oracle::linear_radius_spectrum(0.05, 13.0, kgrid_default);
  InverseOptions options;
  options.method = InverseMethod::timedomain;
  CHECK_THROWS_AS(enumerate_candidates(s, 16.0, options, consts),
                  validation_error);
}
