#include "tract/gelfand_levitan.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tract/marchenko.hpp"
#include "tract/numeric.hpp"

namespace tract {

namespace {

// Node-aligned kernel access: G(x_i, x_j) for grids sharing one step.
struct KernelTable {
  const std::vector<double>& b;
  bool has_bound = false;
  double g_sq = 0.0;
  std::vector<double> cosh_beta;  // cosh(beta x_i)

  double operator()(std::size_t i, std::size_t j) const {
    const std::size_t hi = std::max(i, j);
    const std::size_t lo = std::min(i, j);
    double value = 0.5 * (b[hi + lo] + b[hi - lo]);
    if (has_bound) value += g_sq * cosh_beta[i] * cosh_beta[j];
    return value;
  }
};

std::vector<double> trapezoid_weights(std::size_t n, double h) {
  std::vector<double> w(n, h);
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return w;
}

}  // namespace

GLSolution solve_gl(const GLKernelSpec& kernel, const Grid1D& xgrid,
                    const GLOptions& options) {
  xgrid.validate();
  kernel.tgrid.validate();
  const std::size_t n = xgrid.count;
  const double h = xgrid.step;
  if (std::abs(kernel.tgrid.step - h) > 1e-12 * std::max(1.0, h) ||
      kernel.tgrid.count < 2 * n - 1 ||
      kernel.b_table.size() != kernel.tgrid.count) {
    throw validation_error(
        "solve_gl: kernel table must cover [0, 2 ell] on the x-grid step");
  }

  KernelTable G{kernel.b_table};
  if (kernel.bound_state) {
    G.has_bound = true;
    const double beta = kernel.bound_state->first;
    G.g_sq = kernel.bound_state->second;
    if (!(beta > 0.0) || !(G.g_sq > 0.0)) {
      throw validation_error("solve_gl: bound-state data must be positive");
    }
    G.cosh_beta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      G.cosh_beta[i] = std::cosh(beta * xgrid.coord(i));
    }
  }

  GLSolution sol;
  sol.xgrid = xgrid;
  sol.h.resize(n);
  sol.h[0] = {-G(0, 0)};

  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t m = i + 1;
    const std::vector<double> w = trapezoid_weights(m, h);
    Eigen::MatrixXd a(m, m);
    Eigen::VectorXd rhs(m);
    for (std::size_t row = 0; row < m; ++row) {
      for (std::size_t col = 0; col < m; ++col) {
        a(row, col) = w[col] * G(col, row);
      }
      a(row, row) += 1.0;
      rhs(row) = -G(i, row);
    }
    Eigen::VectorXd hrow = a.partialPivLu().solve(rhs);
    if (!hrow.allFinite()) {
      throw numeric_error(
          "solve_gl: singular Nystrom system; data inconsistent with an "
          "admissible duct");
    }
    sol.h[i].assign(hrow.data(), hrow.data() + m);
  }

  // Residual sanity check on the largest system.
  {
    const std::size_t i = n - 1;
    const std::vector<double> w = trapezoid_weights(n, h);
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t row = 0; row < n; ++row) {
      double acc = sol.h[i][row] + G(i, row);
      for (std::size_t col = 0; col < n; ++col) {
        acc += w[col] * sol.h[i][col] * G(col, row);
      }
      worst = std::max(worst, std::abs(acc));
      scale = std::max(scale, std::abs(G(i, row)));
    }
    if (worst > 1e-8 * (1.0 + scale)) {
      throw numeric_error("solve_gl: Nystrom residual above tolerance");
    }
  }

  // Extraction: q = 2 d/dx h(x,x), cot theta = -h(0,0),
  // phi(0,x) = 1 + int_0^x h(x,y) dy.
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = sol.h[i][i];

  sol.q.grid = xgrid;
  sol.q.values.resize(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    sol.q.values[i] = (diag[i + 1] - diag[i - 1]) / h;
  }
  sol.q.values[0] = (-3.0 * diag[0] + 4.0 * diag[1] - diag[2]) / h;
  sol.q.values[n - 1] = (3.0 * diag[n - 1] - 4.0 * diag[n - 2] + diag[n - 3]) / h;
  sol.q.cot_theta = -diag[0];

  if (options.smooth_q) {
    std::vector<double> smoothed = sol.q.values;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      smoothed[i] =
          (sol.q.values[i - 1] + sol.q.values[i] + sol.q.values[i + 1]) / 3.0;
    }
    sol.q.values = std::move(smoothed);
  }

  sol.phi0.resize(n);
  sol.phi0[0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::vector<double> w = trapezoid_weights(i + 1, h);
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += w[j] * sol.h[i][j];
    sol.phi0[i] = 1.0 + acc;
  }
  return sol;
}

std::vector<double> GLSolution::phi_at(double k) const {
  const std::size_t n = xgrid.count;
  const double hstep = xgrid.step;
  std::vector<double> out(n);
  out[0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::vector<double> w = trapezoid_weights(i + 1, hstep);
    double acc = std::cos(k * xgrid.coord(i));
    for (std::size_t j = 0; j <= i; ++j) {
      acc += w[j] * h[i][j] * std::cos(k * xgrid.coord(j));
    }
    out[i] = acc;
  }
  return out;
}

std::vector<double> GLSolution::phi_imag_axis(double beta) const {
  const std::size_t n = xgrid.count;
  const double hstep = xgrid.step;
  std::vector<double> out(n);
  out[0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::vector<double> w = trapezoid_weights(i + 1, hstep);
    double acc = std::cosh(beta * xgrid.coord(i));
    for (std::size_t j = 0; j <= i; ++j) {
      acc += w[j] * h[i][j] * std::cosh(beta * xgrid.coord(j));
    }
    out[i] = acc;
  }
  return out;
}

RadiusProfile radius_no_bound(const GLSolution& solution, double p_inf,
                              const PhysicalConstants& consts) {
  consts.validate();
  if (!(p_inf > 0.0)) {
    throw validation_error("radius_no_bound: p_inf must be positive");
  }
  const double phi_ell = solution.phi0.back();
  if (!(phi_ell > 0.0)) {
    throw numeric_error(
        "radius_no_bound: phi(0, ell) <= 0; data inconsistent with a "
        "bound-state-free duct");
  }
  const double scale =
      std::sqrt(consts.c_mu() / (std::numbers::pi * p_inf * phi_ell));
  RadiusProfile r;
  r.grid = solution.xgrid;
  r.values.resize(solution.phi0.size());
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    r.values[i] = scale * solution.phi0[i];
  }
  r.slope0 = scale * (-solution.cot_theta());  // phi'(0,0) = -cot theta
  r.slopeL = scale * end_slope_right(solution.xgrid, solution.phi0);
  r.validate();
  return r;
}

DarbouxResult darboux(const GLSolution& no_bound, double beta, double g_sq) {
  if (!(g_sq > 0.0) || !(beta > 0.0)) {
    throw validation_error("darboux: beta and g^2 must be positive");
  }
  const Grid1D& xg = no_bound.xgrid;
  const std::vector<double> phi_ib = no_bound.phi_imag_axis(beta);
  const std::vector<double>& phi0 = no_bound.phi0;

  std::vector<double> cross(xg.count), square(xg.count);
  for (std::size_t i = 0; i < xg.count; ++i) {
    cross[i] = phi0[i] * phi_ib[i];
    square[i] = phi_ib[i] * phi_ib[i];
  }
  const std::vector<double> cross_int =
      numeric::cumulative_trapezoid(cross, xg.step);
  const std::vector<double> square_int =
      numeric::cumulative_trapezoid(square, xg.step);

  DarbouxResult out;
  out.cot_theta = no_bound.cot_theta() + g_sq;
  out.phi0.resize(xg.count);
  for (std::size_t i = 0; i < xg.count; ++i) {
    const double denom = 1.0 + g_sq * square_int[i];
    if (!(denom > 0.0)) {
      throw numeric_error("darboux: vanishing denominator");
    }
    out.phi0[i] = phi0[i] - g_sq * phi_ib[i] * cross_int[i] / denom;
  }
  return out;
}

bool admissible(const std::vector<double>& phi0,
                const std::vector<double>& phi_ibeta, const Grid1D& xgrid,
                double beta) {
  if (phi0.size() != xgrid.count || phi_ibeta.size() != xgrid.count) {
    throw validation_error("admissible: sample count mismatch");
  }
  std::vector<double> cross(xgrid.count);
  for (std::size_t i = 0; i < xgrid.count; ++i) {
    cross[i] = phi0[i] * phi_ibeta[i];
  }
  const double lhs = 2.0 * beta * numeric::trapezoid(cross, xgrid.step);
  return lhs < phi0.back() * phi_ibeta.back();
}

namespace {

RadiusProfile scale_candidate(const std::vector<double>& phi0,
                              const Grid1D& xgrid, double cot_theta,
                              double p_inf, const PhysicalConstants& consts) {
  const double phi_ell = phi0.back();
  const double scale =
      std::sqrt(consts.c_mu() / (std::numbers::pi * p_inf * phi_ell));
  RadiusProfile r;
  r.grid = xgrid;
  r.values.resize(phi0.size());
  for (std::size_t i = 0; i < phi0.size(); ++i) r.values[i] = scale * phi0[i];
  r.slope0 = scale * (-cot_theta);
  r.slopeL = scale * end_slope_right(xgrid, phi0);
  r.validate();
  return r;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void check_distinct(const CandidateSet& set) {
  std::vector<const RadiusProfile*> radii;
  radii.push_back(&set.no_bound);
  for (const Candidate& c : set.with_bound) {
    if (c.radius) radii.push_back(&*c.radius);
  }
  const double floor = 1e-6 * max_abs(set.no_bound.values);
  for (std::size_t a = 0; a < radii.size(); ++a) {
    for (std::size_t b = a + 1; b < radii.size(); ++b) {
      double dist = 0.0;
      for (std::size_t i = 0; i < radii[a]->values.size(); ++i) {
        dist = std::max(dist,
                        std::abs(radii[a]->values[i] - radii[b]->values[i]));
      }
      if (dist <= floor) {
        throw numeric_error("enumerate_candidates: coincident candidates");
      }
    }
  }
}

}  // namespace

InverseResult enumerate_candidates(const PressureSpectrum& spectrum,
                                   double ell, const InverseOptions& options,
                                   const PhysicalConstants& consts) {
  spectrum.validate();
  consts.validate();
  if (!(ell > 0.0)) {
    throw validation_error("enumerate_candidates: ell must be positive");
  }
  if (options.method == InverseMethod::timedomain) {
    throw validation_error(
        "enumerate_candidates: the time-domain route has its own entry point");
  }
  const std::size_t n = options.n_x;
  if (n < 8) {
    throw validation_error("enumerate_candidates: n_x too small");
  }

  InverseResult result;
  result.p_inf = spectrum.p_inf;

  const Grid1D xgrid = Grid1D::over(0.0, ell, n);
  result.b = b_kernel(spectrum, 2.0 * ell, 2 * n - 1);

  GLKernelSpec base_kernel{result.b.tgrid, result.b.values, std::nullopt};
  result.no_bound = solve_gl(base_kernel, xgrid, options.gl);
  const GLSolution& nb = result.no_bound;

  result.candidates.no_bound = radius_no_bound(nb, spectrum.p_inf, consts);

  const double beta_max =
      options.beta_max > 0.0
          ? options.beta_max
          : 5.0 * std::max(1.0 / ell, std::abs(nb.cot_theta()));
  result.report =
      find_eligible_resonances(nb.q, beta_max, options.beta_scan_points);

  // Norming constants recomputed through the Gel'fand-Levitan transform so
  // the Darboux inputs stay consistent with the reconstructed h-kernel.
  const JostEvaluator f0 = jost_evaluator(nb.q);
  for (std::size_t j = 0; j < result.report.m_count; ++j) {
    const double beta = result.report.betas[j];
    const std::vector<double> phi_ib = nb.phi_imag_axis(beta);
    const double g_sq = gl_norming_constant(phi_ib, xgrid, beta);
    if (std::abs(g_sq - result.report.g_sq[j]) >
        1e-3 * std::max(g_sq, result.report.g_sq[j])) {
      result.report.warnings.push_back(
          "norming constant: transform and potential routes disagree beyond 1e-3");
    }
    result.report.g_sq[j] = g_sq;
  }

  // Per-resonance candidate recovery.
  std::vector<std::complex<double>> s_base;
  Grid1D s_grid;
  Grid1D ygrid;
  if (options.method == InverseMethod::marchenko) {
    // The scattering matrix comes from the entire-evaluator continuation of
    // the reconstructed potential, so the kernel transform can integrate
    // well beyond the measured band; this keeps the band-truncation error
    // of the Fourier kernel below the Nystrom level.
    const double k_ext = std::max(12.0, 2.0 * spectrum.kgrid.back());
    const double dk = spectrum.kgrid.step;
    s_grid = Grid1D{dk, dk,
                    static_cast<std::size_t>(std::llround(k_ext / dk))};
    s_base = scattering_matrix(f0, s_grid);
    const std::size_t margin_cells = (n - 1 + 9) / 10;
    const std::size_t ny = 2 * n - 1 + margin_cells;
    ygrid = Grid1D{0.0, xgrid.step, ny};

    // No-bound branch through the Marchenko equation as well.
    const MarchenkoKernelSpec spec0 =
        make_marchenko_spec(s_grid, s_base, std::nullopt);
    const std::vector<double> m0 = marchenko_kernel(spec0, ygrid);
    const MarchenkoSolution sol0 = solve_marchenko(m0, ygrid, xgrid, f0);
    if (!(sol0.phi0.back() > 0.0)) {
      throw numeric_error(
          "enumerate_candidates: Marchenko no-bound branch lost positivity");
    }
    result.candidates.no_bound = scale_candidate(
        sol0.phi0, xgrid, sol0.cot_theta, spectrum.p_inf, consts);
  }

  for (std::size_t j = 0; j < result.report.m_count; ++j) {
    const double beta = result.report.betas[j];
    const double g_sq = result.report.g_sq[j];
    const std::vector<double> phi_ib = nb.phi_imag_axis(beta);

    Candidate cand;
    cand.beta = beta;

    double cot_theta_j = 0.0;
    if (options.method == InverseMethod::marchenko) {
      std::vector<std::complex<double>> s_j(s_base.size());
      for (std::size_t p = 0; p < s_base.size(); ++p) {
        const std::complex<double> k(s_grid.coord(p), 0.0);
        const std::complex<double> mobius =
            (k + std::complex<double>(0.0, beta)) /
            (k - std::complex<double>(0.0, beta));
        s_j[p] = mobius * mobius * s_base[p];
      }
      const MarchenkoKernelSpec spec_j = make_marchenko_spec(
          s_grid, std::move(s_j),
          std::make_pair(beta, result.report.m_sq[j]));
      const std::vector<double> mj = marchenko_kernel(spec_j, ygrid);
      const JostEvaluator fj = bound_state_jost(f0, beta);
      const MarchenkoSolution sol_j = solve_marchenko(mj, ygrid, xgrid, fj);
      cand.phi0 = sol_j.phi0;
      cot_theta_j = sol_j.cot_theta;
    } else if (options.bound_route == BoundStateRoute::darboux) {
      DarbouxResult dr = darboux(nb, beta, g_sq);
      cand.phi0 = std::move(dr.phi0);
      cot_theta_j = dr.cot_theta;
    } else {
      GLKernelSpec kernel_j{result.b.tgrid, result.b.values,
                            std::make_pair(beta, g_sq)};
      const GLSolution sol_j = solve_gl(kernel_j, xgrid, options.gl);
      cand.phi0 = sol_j.phi0;
      cot_theta_j = sol_j.cot_theta();
    }

    cand.admissible = admissible(nb.phi0, phi_ib, xgrid, beta);
    const bool positive_at_lips = cand.phi0.back() > 0.0;
    if (cand.admissible != positive_at_lips) {
      result.report.warnings.push_back(
          "admissibility: criterion and lip-sign test disagree near the "
          "boundary; keeping the conservative answer");
      cand.admissible = cand.admissible && positive_at_lips;
    }
    if (cand.admissible) {
      cand.radius = scale_candidate(cand.phi0, xgrid, cot_theta_j,
                                    spectrum.p_inf, consts);
    }
    result.candidates.with_bound.push_back(std::move(cand));
  }
  result.candidates.m_count = result.candidates.with_bound.size();
  result.candidates.validate();
  check_distinct(result.candidates);
  return result;
}

}  // namespace tract
