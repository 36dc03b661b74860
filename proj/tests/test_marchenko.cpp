#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "oracles.hpp"
#include "tract/direct.hpp"
#include "tract/gelfand_levitan.hpp"
#include "tract/marchenko.hpp"

using namespace tract;
using cplx = std::complex<double>;

namespace {

const PhysicalConstants consts;

std::vector<cplx> sampled(const JostEvaluator& f, const Grid1D& kg) {
  std::vector<cplx> out(kg.count);
  for (std::size_t j = 0; j < kg.count; ++j) out[j] = f(cplx(kg.coord(j), 0.0));
  return out;
}

}  // namespace

TEST_CASE("scattering_matrix") {
  const Grid1D kg{0.003, 0.003, 1000};

  SUBCASE("F = k + ia maps to the Mobius phase") {
    const double a = 0.05;
    std::vector<cplx> f(kg.count);
    for (std::size_t j = 0; j < kg.count; ++j) {
      f[j] = cplx(kg.coord(j), a);
    }
    const std::vector<cplx> s = scattering_matrix(f);
    for (std::size_t j = 0; j < kg.count; j += 97) {
      const cplx k(kg.coord(j), 0.0);
      const cplx expected = (k - cplx(0.0, a)) / (k + cplx(0.0, a));
      CHECK(std::abs(s[j] - expected) < 1e-14);
    }
  }

  SUBCASE("F = k gives the identity") {
    std::vector<cplx> f(kg.count);
    for (std::size_t j = 0; j < kg.count; ++j) f[j] = cplx(kg.coord(j), 0.0);
    const std::vector<cplx> s = scattering_matrix(f);
    for (const cplx& v : s) CHECK(std::abs(v - 1.0) < 1e-15);
  }

  SUBCASE("unimodular on the whole grid for a reference duct") {
    const oracle::ConstPotential cp{1.0 / 200.0, -1.0, 16.0};
    PotentialProfile q;
    q.grid = Grid1D::over(0.0, cp.ell, 201);
    q.values.assign(201, cp.v);
    q.cot_theta = cp.cot;
    const std::vector<cplx> s = scattering_matrix(jost_evaluator(q), kg);
    for (const cplx& v : s) CHECK(std::abs(std::abs(v) - 1.0) < 1e-10);
  }
}

TEST_CASE("marchenko_kernel") {
  const Grid1D kg{0.003, 0.003, 2000};
  const Grid1D yg = Grid1D::over(0.0, 8.0, 401);

  SUBCASE("no-bound Mobius data has no kernel mass at positive y") {
    const double a = 0.05;
    std::vector<cplx> s(kg.count);
    for (std::size_t j = 0; j < kg.count; ++j) {
      const cplx k(kg.coord(j), 0.0);
      s[j] = (k - cplx(0.0, a)) / (k + cplx(0.0, a));
    }
    const MarchenkoKernelSpec spec = make_marchenko_spec(kg, s, std::nullopt);
    CHECK(spec.gamma_tail == doctest::Approx(a).epsilon(1e-4));
    const std::vector<double> m = marchenko_kernel(spec, yg);
    for (std::size_t i = 1; i < m.size(); ++i) {
      CHECK(std::abs(m[i]) < 1e-7);
    }
  }

  SUBCASE("bound term alone is the exponential") {
    std::vector<cplx> s(kg.count, cplx(1.0, 0.0));
    const MarchenkoKernelSpec spec =
        make_marchenko_spec(kg, s, std::make_pair(0.3, 0.5));
    const std::vector<double> m = marchenko_kernel(spec, yg);
    // The y = 0 corner is extrapolated, so it is only cubically exact.
    CHECK(m[0] == doctest::Approx(0.5).epsilon(1e-6));
    for (std::size_t i = 1; i < m.size(); i += 19) {
      CHECK(m[i] ==
            doctest::Approx(0.5 * std::exp(-0.3 * yg.coord(i))).epsilon(1e-10));
    }
  }

  SUBCASE("identity scattering alone is the zero kernel") {
    std::vector<cplx> s(kg.count, cplx(1.0, 0.0));
    const MarchenkoKernelSpec spec = make_marchenko_spec(kg, s, std::nullopt);
    const std::vector<double> m = marchenko_kernel(spec, yg);
    for (double v : m) CHECK(std::abs(v) < 1e-14);
  }
}

TEST_CASE("solve_marchenko against the rank-one closed form") {
  // beta large enough that the kernel tail is fully inside the truncated
  // triangle, so the infinite-domain closed form applies.
  const double beta = 2.0, m_sq = 1.0, ell = 4.0;
  const std::size_t n = 201;
  const Grid1D xg = Grid1D::over(0.0, ell, n);
  const std::size_t margin_cells = (n - 1 + 9) / 10;
  const Grid1D yg{0.0, xg.step, 2 * n - 1 + margin_cells};
  const double y_end = yg.back();

  std::vector<double> m_table(yg.count);
  for (std::size_t i = 0; i < yg.count; ++i) {
    m_table[i] = m_sq * std::exp(-beta * yg.coord(i));
  }
  // Separable kernel: K(x, y) = B(x) e^{-beta y} with
  // B = -m^2 e^{-bx} / (1 + m^2 e^{-2bx} / (2b)).
  auto b_exact = [&](double x) {
    return -m_sq * std::exp(-beta * x) /
           (1.0 + m_sq * std::exp(-2.0 * beta * x) / (2.0 * beta));
  };

  const JostEvaluator f_free = [](cplx k) { return k; };
  const MarchenkoSolution sol = solve_marchenko(m_table, yg, xg, f_free);
  for (std::size_t i = 0; i < n; i += 23) {
    const double x = xg.coord(i);
    for (std::size_t q = 0; q < sol.k_rows[i].size(); q += 41) {
      const double y = yg.coord(i + q);
      const double expected = b_exact(x) * std::exp(-beta * y);
      CHECK(std::abs(sol.k_rows[i][q] - expected) < 2e-4);
    }
  }

  // f(0, x) = 1 + B(x)(e^{-bx} - e^{-bY})/b.
  const std::vector<cplx> f0 = sol.f_at(0.0);
  for (std::size_t i = 0; i < n; i += 31) {
    const double x = xg.coord(i);
    const double expected =
        1.0 + b_exact(x) * (std::exp(-beta * x) - std::exp(-beta * y_end)) / beta;
    CHECK(std::abs(f0[i].real() - expected) < 2e-4);
    CHECK(std::abs(f0[i].imag()) < 1e-12);
  }
}

TEST_CASE("full Mobius-pair data recovers the falling linear duct") {
  // |F| data of the two-branch linear fixture, bound state inserted at
  // beta = a: scattering and bound term cancel, so K vanishes and the
  // regular solution becomes 1 - a x.
  const double a = 0.05, ell = 16.0;
  const Grid1D kg{0.003, 0.003, 2000};
  std::vector<cplx> s1(kg.count);
  for (std::size_t j = 0; j < kg.count; ++j) {
    const cplx k(kg.coord(j), 0.0);
    s1[j] = (k + cplx(0.0, a)) / (k - cplx(0.0, a));
  }
  const MarchenkoKernelSpec spec =
      make_marchenko_spec(kg, s1, std::make_pair(a, 2.0 * a));
  const std::size_t n = 401;
  const Grid1D xg = Grid1D::over(0.0, ell, n);
  const std::size_t margin_cells = (n - 1 + 9) / 10;
  const Grid1D yg{0.0, xg.step, 2 * n - 1 + margin_cells};
  const std::vector<double> m1 = marchenko_kernel(spec, yg);

  double mass = 0.0;
  for (std::size_t i = 1; i < m1.size(); ++i) {
    mass = std::max(mass, std::abs(m1[i]));
  }
  CHECK(mass < 1e-6);

  const JostEvaluator f1 = [a](cplx k) { return k - cplx(0.0, a); };
  const MarchenkoSolution sol = solve_marchenko(m1, yg, xg, f1);
  CHECK(sol.cot_theta == doctest::Approx(a).epsilon(1e-3));
  CHECK(sol.phi_origin_residual < 1e-5);
  for (std::size_t i = 0; i < n; i += 37) {
    CHECK(sol.phi0[i] ==
          doctest::Approx(1.0 - a * xg.coord(i)).epsilon(5e-4));
  }
}

TEST_CASE("phi(k, 0) = 1 is exact for reflectionless data") {
  const std::size_t n = 101;
  const Grid1D xg = Grid1D::over(0.0, 4.0, n);
  const Grid1D yg{0.0, xg.step, 2 * n - 1 + 10};
  const std::vector<double> zero(yg.count, 0.0);
  const JostEvaluator f_free = [](cplx k) { return k; };
  const MarchenkoSolution sol = solve_marchenko(zero, yg, xg, f_free);
  CHECK(sol.phi_origin_residual < 1e-8);
  // The probe-k one-sided difference carries an O(k^4 h^3) floor.
  CHECK(std::abs(sol.cot_theta) < 5e-5);
}

TEST_CASE("kernel support stays inside [0, 2 ell] for duct data") {
  // Rising duct with an interior bump: the potential vanishes at both ends,
  // so the scattering data has no slowly-decaying oscillatory tail and the
  // band truncation error sits far below the kernel scale.
  const double ell = 4.0, sig = 0.45, amp = 0.2, mu = 2.0;
  RadiusProfile duct;
  duct.grid = Grid1D::over(0.0, ell, 401);
  duct.values.resize(401);
  for (std::size_t i = 0; i < 401; ++i) {
    const double u = (duct.grid.coord(i) - mu) / sig;
    duct.values[i] = 1.0 + 0.05 * duct.grid.coord(i) + amp * std::exp(-u * u);
  }
  auto bump_prime = [&](double x) {
    const double u = (x - mu) / sig;
    return -2.0 * amp * u / sig * std::exp(-u * u);
  };
  duct.slope0 = 0.05 + bump_prime(0.0);
  duct.slopeL = 0.05 + bump_prime(ell);
  const PotentialProfile q = potential_from_radius(duct);

  const Grid1D kg{0.0015, 0.0015, 12000};
  const std::vector<cplx> s = scattering_matrix(jost_evaluator(q), kg);
  const MarchenkoKernelSpec spec = make_marchenko_spec(kg, s, std::nullopt);
  const Grid1D yg = Grid1D::over(0.0, 3.0 * ell, 601);
  const std::vector<double> m = marchenko_kernel(spec, yg);

  double peak = 0.0, outside = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double y = yg.coord(i);
    peak = std::max(peak, std::abs(m[i]));
    if (y > 2.0 * ell + 0.2) outside = std::max(outside, std::abs(m[i]));
  }
  CHECK(outside < 1e-8 * peak);
}

TEST_CASE("Marchenko route matches the Gel'fand-Levitan route") {
  const Grid1D kg{0.003, 0.003, 1000};

  SUBCASE("rising duct (unique branch)") {
    const RadiusProfile duct = oracle::random_smooth_radius(2, 16.0, 401, false);
    const PressureSpectrum s = pressure_spectrum(duct, kg, consts);
    InverseOptions gl_opts;
    gl_opts.n_x = 241;
    InverseOptions ma_opts = gl_opts;
    ma_opts.method = InverseMethod::marchenko;
    const InverseResult rg = enumerate_candidates(s, 16.0, gl_opts, consts);
    const InverseResult rm = enumerate_candidates(s, 16.0, ma_opts, consts);
    REQUIRE(rg.report.m_count == rm.report.m_count);
    double worst = 0.0;
    for (std::size_t i = 0; i < rg.candidates.no_bound.values.size(); ++i) {
      worst = std::max(worst,
                       std::abs(rg.candidates.no_bound.values[i] -
                                rm.candidates.no_bound.values[i]) /
                           rg.candidates.no_bound.values[i]);
    }
    CHECK(worst < 1e-3);
  }

  SUBCASE("falling duct (bound-state candidates included)") {
    const RadiusProfile duct = oracle::random_smooth_radius(14, 16.0, 401, true);
    const PressureSpectrum s = pressure_spectrum(duct, kg, consts);
    InverseOptions gl_opts;
    gl_opts.n_x = 201;
    InverseOptions ma_opts = gl_opts;
    ma_opts.method = InverseMethod::marchenko;
    const InverseResult rg = enumerate_candidates(s, 16.0, gl_opts, consts);
    const InverseResult rm = enumerate_candidates(s, 16.0, ma_opts, consts);
    REQUIRE(rg.report.m_count == rm.report.m_count);
    REQUIRE(rg.report.m_count >= 1);

    for (std::size_t j = 0; j < rg.report.m_count; ++j) {
      const Candidate& cg = rg.candidates.with_bound[j];
      const Candidate& cm = rm.candidates.with_bound[j];
      CHECK(cg.admissible == cm.admissible);
      double worst = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < cg.phi0.size(); ++i) {
        worst = std::max(worst, std::abs(cg.phi0[i] - cm.phi0[i]));
        scale = std::max(scale, std::abs(cg.phi0[i]));
      }
      CHECK(worst / scale < 1e-3);
    }
  }
}
