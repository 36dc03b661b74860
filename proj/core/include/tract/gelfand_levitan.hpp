#pragma once

// Gel'fand-Levitan inversion: Nystrom solve of the integral equation on a
// triangular grid, extraction of potential / boundary parameter / regular
// solution, candidate radius recovery, Darboux transforms, admissibility
// filtering, and the full candidate-enumeration pipeline.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "tract/spectral.hpp"
#include "tract/time_domain.hpp"
#include "tract/types.hpp"

namespace tract {

// Kernel data for the Gel'fand-Levitan equation. The continuous part comes
// from the cosine-transform table B(t) on [0, 2 ell]:
//   G(x, y) = (B(x+y) + B(|x-y|)) / 2,
// plus, when a bound state is being inserted,
//   g^2 cosh(beta x) cosh(beta y).
struct GLKernelSpec {
  Grid1D tgrid;                // over [0, 2 ell], same step as the x-grid
  std::vector<double> b_table;
  std::optional<std::pair<double, double>> bound_state;  // {beta, g_sq}
};

struct GLOptions {
  bool smooth_q = false;  // optional 3-point moving average on q
};

struct GLSolution {
  Grid1D xgrid;
  std::vector<std::vector<double>> h;  // h[i][j] = h(x_i, y_j), j <= i
  PotentialProfile q;                  // carries cot_theta = -h(0,0)
  std::vector<double> phi0;            // phi(0, x) on the x-grid

  double cot_theta() const { return q.cot_theta; }
  // phi(k, x) = cos(kx) + int_0^x h(x,y) cos(ky) dy on the x-grid.
  std::vector<double> phi_at(double k) const;
  // Analytic continuation to the imaginary axis: cos -> cosh.
  std::vector<double> phi_imag_axis(double beta) const;
};

GLSolution solve_gl(const GLKernelSpec& kernel, const Grid1D& xgrid,
                    const GLOptions& options = {});

// r(x) = sqrt(c mu / (pi p_inf phi(0, ell))) phi(0, x); requires
// phi(0, ell) > 0.
RadiusProfile radius_no_bound(const GLSolution& solution, double p_inf,
                              const PhysicalConstants& consts);

// Darboux transform inserting a bound state at beta with norming constant
// g_sq: returns the new boundary parameter and phi_j(0, .).
struct DarbouxResult {
  double cot_theta = 0.0;
  std::vector<double> phi0;
};
DarbouxResult darboux(const GLSolution& no_bound, double beta, double g_sq);

// Admissibility criterion for the candidate at beta:
// 2 beta int_0^ell phi(0,y) phi(i beta, y) dy < phi(0,ell) phi(i beta, ell).
bool admissible(const std::vector<double>& phi0,
                const std::vector<double>& phi_ibeta, const Grid1D& xgrid,
                double beta);

enum class InverseMethod { gl, marchenko, timedomain };
enum class BoundStateRoute { darboux, gl_kernel };

struct InverseOptions {
  std::size_t n_x = 401;     // samples on [0, ell]
  double beta_max = 0.0;     // 0 -> 5 max(1/ell, |cot theta|)
  std::size_t beta_scan_points = 2000;
  InverseMethod method = InverseMethod::gl;
  BoundStateRoute bound_route = BoundStateRoute::darboux;
  GLOptions gl;
};

struct InverseResult {
  CandidateSet candidates;
  ResonanceReport report;
  GLSolution no_bound;  // diagnostics: q, cot theta, h, phi0
  double p_inf = 0.0;
  BKernel b;
};

// Full pipeline: B kernel, no-bound GL solve, resonance enumeration,
// per-beta bound-state insertion (Darboux or GL kernel route, or the
// Marchenko route when method == marchenko), radius scaling and
// admissibility flags.
InverseResult enumerate_candidates(const PressureSpectrum& spectrum,
                                   double ell, const InverseOptions& options,
                                   const PhysicalConstants& consts);

}  // namespace tract
