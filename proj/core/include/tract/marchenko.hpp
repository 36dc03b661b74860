#pragma once

// Marchenko inversion route, used to cross-validate the Gel'fand-Levitan
// pipeline: scattering matrix, Fourier kernel with analytic tail, Nystrom
// solve of the Marchenko equation on the truncated half line, and recovery
// of the Jost / regular solutions and boundary parameter.

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "tract/direct.hpp"
#include "tract/types.hpp"

namespace tract {

// S(k) = -F(-k)/F(k) on the real grid. For real potentials this equals
// conj(F)/F, which is what is computed (exactly unimodular).
std::vector<std::complex<double>> scattering_matrix(
    const std::vector<std::complex<double>>& f_values);
std::vector<std::complex<double>> scattering_matrix(const JostEvaluator& f,
                                                    const Grid1D& kgrid);

struct MarchenkoKernelSpec {
  Grid1D kgrid;
  std::vector<std::complex<double>> s_values;
  std::optional<std::pair<double, double>> bound_state;  // {beta, m_sq}
  // Tail model beyond the grid:
  // S(k) ~ 1 - 2 i gamma / k + (rho + i sigma)/k^2 + (rho3 + i tau)/k^3.
  double gamma_tail = 0.0;
  double rho_tail = 0.0;
  double sigma_tail = 0.0;
  double rho3_tail = 0.0;
  double tau_tail = 0.0;
};

// Fits the tail coefficients from the top of the grid.
MarchenkoKernelSpec make_marchenko_spec(
    const Grid1D& kgrid, std::vector<std::complex<double>> s_values,
    std::optional<std::pair<double, double>> bound_state);

// M(y) = (1/2 pi) int (S(k) - 1) e^{iky} dk + m^2 e^{-beta y}, folded to a
// real cosine/sine form, endpoint-corrected trapezoid plus analytic tail.
std::vector<double> marchenko_kernel(const MarchenkoKernelSpec& spec,
                                     const Grid1D& ygrid);

struct MarchenkoSolution {
  Grid1D xgrid;
  Grid1D ygrid;                             // [0, 2 ell + margin], same step
  std::vector<std::vector<double>> k_rows;  // K(x_i, y) for y >= x_i
  double cot_theta = 0.0;
  std::vector<double> phi0;      // phi(0, x)
  PotentialProfile q;            // -2 d/dx K(x, x), diagnostic
  double phi_origin_residual = 0.0;  // max |phi(k, 0) - 1| over probe k

  // f(k, x) = e^{ikx} + int_x^Y K(x,y) e^{iky} dy on the x-grid.
  std::vector<std::complex<double>> f_at(double k) const;
};

// Solves K(x,y) + M(x+y) + int_x^Y K(x,z) M(z+y) dz = 0 on the truncated
// triangle (Y = 2 ell + margin), then recovers f, phi (through the supplied
// Jost evaluator), and cot theta = -phi'(k, 0) averaged over three probe k.
MarchenkoSolution solve_marchenko(const std::vector<double>& m_table,
                                  const Grid1D& ygrid, const Grid1D& xgrid,
                                  const JostEvaluator& f_evaluator);

// phi(k, x) = Re[F(k) conj(f(k, x))] / k for real k != 0.
std::vector<double> marchenko_regular_solution(const MarchenkoSolution& sol,
                                               const JostEvaluator& f_evaluator,
                                               double k);

}  // namespace tract
