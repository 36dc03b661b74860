#include "tract/marchenko.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tract/numeric.hpp"

namespace tract {

using cplx = std::complex<double>;

std::vector<cplx> scattering_matrix(const std::vector<cplx>& f_values) {
  std::vector<cplx> s(f_values.size());
  for (std::size_t j = 0; j < f_values.size(); ++j) {
    if (!(std::abs(f_values[j]) > 0.0)) {
      throw numeric_error("scattering_matrix: Jost function vanishes on the grid");
    }
    // S = -F(-k)/F(k) with F(-k) = -conj(F(k)) for real potentials.
    s[j] = std::conj(f_values[j]) / f_values[j];
  }
  return s;
}

std::vector<cplx> scattering_matrix(const JostEvaluator& f,
                                    const Grid1D& kgrid) {
  kgrid.validate();
  std::vector<cplx> values(kgrid.count);
  for (std::size_t j = 0; j < kgrid.count; ++j) {
    values[j] = f(cplx(kgrid.coord(j), 0.0));
  }
  return scattering_matrix(values);
}

MarchenkoKernelSpec make_marchenko_spec(
    const Grid1D& kgrid, std::vector<cplx> s_values,
    std::optional<std::pair<double, double>> bound_state) {
  kgrid.validate();
  if (s_values.size() != kgrid.count) {
    throw validation_error("marchenko spec: sample count mismatch");
  }
  MarchenkoKernelSpec spec;
  spec.kgrid = kgrid;
  spec.s_values = std::move(s_values);
  spec.bound_state = bound_state;

  // Tail model fitted on the top decade of the grid:
  // Im(S) k = -2 gamma + sigma/k + tau/k^2 (quadratic in 1/k),
  // (Re(S) - 1) k^2 = rho + rho3/k.
  std::size_t m = std::max<std::size_t>(kgrid.count / 10, 12);
  m = std::min(m, kgrid.count);
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  std::vector<double> inv_k(m), re_times_k2(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = kgrid.count - m + i;
    const double k = kgrid.coord(j);
    const double u = 1.0 / k;
    const Eigen::Vector3d row(1.0, u, u * u);
    ata += row * row.transpose();
    atb += row * (spec.s_values[j].imag() * k);
    inv_k[i] = u;
    re_times_k2[i] = (spec.s_values[j].real() - 1.0) * k * k;
  }
  const Eigen::Vector3d im_fit = ata.ldlt().solve(atb);
  spec.gamma_tail = -0.5 * im_fit(0);
  spec.sigma_tail = im_fit(1);
  spec.tau_tail = im_fit(2);
  const numeric::LinearFitResult re_fit = numeric::linear_fit(inv_k, re_times_k2);
  spec.rho_tail = re_fit.intercept;
  spec.rho3_tail = re_fit.slope;
  return spec;
}

std::vector<double> marchenko_kernel(const MarchenkoKernelSpec& spec,
                                     const Grid1D& ygrid) {
  ygrid.validate();
  const Grid1D& kg = spec.kgrid;
  const std::size_t nk = kg.count;
  const double dk = kg.step;
  const double K = kg.back();
  const double gamma = spec.gamma_tail;
  const double rho = spec.rho_tail;
  const double sigma = spec.sigma_tail;
  const double rho3 = spec.rho3_tail;
  const double tau = spec.tau_tail;

  // Grid samples of S - 1 plus an even/odd extrapolated k = 0 node.
  std::vector<double> knots(nk + 1), re(nk + 1), im(nk + 1);
  knots[0] = 0.0;
  im[0] = 0.0;
  for (std::size_t j = 0; j < nk; ++j) {
    knots[j + 1] = kg.coord(j);
    re[j + 1] = spec.s_values[j].real() - 1.0;
    im[j + 1] = spec.s_values[j].imag();
  }
  {
    const double k1 = knots[1], k2 = knots[2];
    re[0] = (k2 * k2 * re[1] - k1 * k1 * re[2]) / (k2 * k2 - k1 * k1);
  }

  std::vector<double> out(ygrid.count, 0.0);
  for (std::size_t iy = 0; iy < ygrid.count; ++iy) {
    const double y = ygrid.coord(iy);
    double acc = 0.0;
    double prev = re[0];
    for (std::size_t j = 1; j < knots.size(); ++j) {
      const double k = knots[j];
      const double cur = re[j] * std::cos(k * y) - im[j] * std::sin(k * y);
      acc += 0.5 * (prev + cur) * (k - knots[j - 1]);
      prev = cur;
    }
    // Euler-Maclaurin end correction from the tail model; the k = 0 end
    // vanishes by evenness of the folded integrand.
    {
      const double c = std::cos(K * y), s = std::sin(K * y);
      const double K2 = K * K, K3 = K2 * K, K4 = K3 * K;
      const double fprime =
          (-2.0 * rho / K3 - 3.0 * rho3 / K4) * c -
          (rho / K2 + rho3 / K3) * y * s +
          (-2.0 * gamma / K2 + 2.0 * sigma / K3 + 3.0 * tau / K4) * s +
          (2.0 * gamma / K - sigma / K2 - tau / K3) * y * c;
      acc -= dk * dk / 12.0 * fprime;
    }
    {
      const double ic = numeric::integral_cos_over_k2(K, y);
      const double is = numeric::integral_sin_over_k2(K, y);
      const double ic3 = std::cos(K * y) / (2.0 * K * K) - 0.5 * y * is;
      const double is3 = std::sin(K * y) / (2.0 * K * K) + 0.5 * y * ic;
      acc += rho * ic - sigma * is + rho3 * ic3 - tau * is3;
    }
    if (y > 0.0) {
      acc += 2.0 * gamma * (std::numbers::pi / 2.0 - numeric::si(K * y));
    }
    out[iy] = acc / std::numbers::pi;
    if (spec.bound_state) {
      out[iy] += spec.bound_state->second * std::exp(-spec.bound_state->first * y);
    }
  }
  // The quadrature returns the half-jump (Dirichlet) value at y = 0 when the
  // kernel jumps there; the integral equation needs the y -> 0+ limit, so
  // extrapolate the corner from the interior.
  if (out.size() >= 4) {
    out[0] = 3.0 * out[1] - 3.0 * out[2] + out[3];
  }
  return out;
}

namespace {

std::vector<double> trapezoid_weights(std::size_t n, double h) {
  std::vector<double> w(n, h);
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return w;
}

}  // namespace

std::vector<cplx> MarchenkoSolution::f_at(double k) const {
  const std::size_t n = xgrid.count;
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ny = k_rows[i].size();
    const std::vector<double> w = trapezoid_weights(ny, ygrid.step);
    cplx acc = std::exp(cplx(0.0, 1.0) * k * xgrid.coord(i));
    for (std::size_t q = 0; q < ny; ++q) {
      const double y = ygrid.coord(i + q);
      acc += w[q] * k_rows[i][q] * std::exp(cplx(0.0, 1.0) * k * y);
    }
    out[i] = acc;
  }
  return out;
}

std::vector<double> marchenko_regular_solution(const MarchenkoSolution& sol,
                                               const JostEvaluator& f_evaluator,
                                               double k) {
  if (k == 0.0) {
    throw validation_error("marchenko_regular_solution: k must be nonzero");
  }
  const cplx F = f_evaluator(cplx(k, 0.0));
  const std::vector<cplx> f = sol.f_at(k);
  std::vector<double> phi(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    // phi = [F(k) f(-k,x) - F(-k) f(k,x)] / 2k = Re[F(k) conj(f(k,x))] / k.
    phi[i] = (F * std::conj(f[i])).real() / k;
  }
  return phi;
}

MarchenkoSolution solve_marchenko(const std::vector<double>& m_table,
                                  const Grid1D& ygrid, const Grid1D& xgrid,
                                  const JostEvaluator& f_evaluator) {
  xgrid.validate();
  ygrid.validate();
  const std::size_t n = xgrid.count;
  const std::size_t ny = ygrid.count;
  const double h = xgrid.step;
  if (std::abs(ygrid.step - h) > 1e-12 * std::max(1.0, h) ||
      ygrid.start != 0.0 || m_table.size() != ny ||
      ygrid.back() < 2.0 * xgrid.back()) {
    throw validation_error(
        "solve_marchenko: kernel grid must cover [0, 2 ell + margin] on the "
        "x-grid step");
  }

  auto m_at = [&](std::size_t idx) {
    return idx < ny ? m_table[idx] : 0.0;
  };

  MarchenkoSolution sol;
  sol.xgrid = xgrid;
  sol.ygrid = ygrid;
  sol.k_rows.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t rows = ny - i;
    const std::vector<double> w = trapezoid_weights(rows, h);
    Eigen::MatrixXd a(rows, rows);
    Eigen::VectorXd rhs(rows);
    for (std::size_t p = 0; p < rows; ++p) {
      for (std::size_t q = 0; q < rows; ++q) {
        a(p, q) = w[q] * m_at(2 * i + p + q);
      }
      a(p, p) += 1.0;
      rhs(p) = -m_at(2 * i + p);
    }
    Eigen::VectorXd sol_row = a.partialPivLu().solve(rhs);
    if (!sol_row.allFinite()) {
      throw numeric_error("solve_marchenko: singular Nystrom system");
    }
    sol.k_rows[i].assign(sol_row.data(), sol_row.data() + rows);
  }

  // Diagnostic potential: q = -2 d/dx K(x,x).
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = sol.k_rows[i][0];
  sol.q.grid = xgrid;
  sol.q.values.resize(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    sol.q.values[i] = -(diag[i + 1] - diag[i - 1]) / h;
  }
  sol.q.values[0] = -(-3.0 * diag[0] + 4.0 * diag[1] - diag[2]) / h;
  sol.q.values[n - 1] =
      -(3.0 * diag[n - 1] - 4.0 * diag[n - 2] + diag[n - 3]) / h;

  // Boundary parameter from phi'(k,0), averaged over three probe wavenumbers,
  // and the phi(k,0) = 1 consistency residual.
  const double probes[3] = {0.8, 1.0, 1.2};
  double cot_acc = 0.0;
  double residual = 0.0;
  for (double k : probes) {
    const std::vector<double> phi = marchenko_regular_solution(sol, f_evaluator, k);
    const double phi_prime0 = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * h);
    cot_acc += -phi_prime0;
    residual = std::max(residual, std::abs(phi[0] - 1.0));
  }
  sol.cot_theta = cot_acc / 3.0;
  sol.phi_origin_residual = residual;
  sol.q.cot_theta = sol.cot_theta;

  // phi(0, x) from the exact zero-wavenumber limit
  // phi(0,x) = F'(0) f(0,x) - F(0) df/dk(0,x), with
  // df/dk(0,x) = i [x + int_x^Y K(x,y) y dy].
  const cplx f_zero = f_evaluator(cplx(0.0, 0.0));
  const double fd = 1e-4;
  const cplx f_dot =
      (f_evaluator(cplx(fd, 0.0)) - f_evaluator(cplx(-fd, 0.0))) / (2.0 * fd);
  const std::vector<cplx> f0 = sol.f_at(0.0);
  sol.phi0.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t rows = sol.k_rows[i].size();
    const std::vector<double> w = trapezoid_weights(rows, h);
    double moment = xgrid.coord(i);
    for (std::size_t p = 0; p < rows; ++p) {
      moment += w[p] * sol.k_rows[i][p] * ygrid.coord(i + p);
    }
    sol.phi0[i] = f_dot.real() * f0[i].real() + f_zero.imag() * moment;
  }
  return sol;
}

}  // namespace tract
