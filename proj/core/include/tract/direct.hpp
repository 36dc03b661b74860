#pragma once

// Forward problem: from a radius/area profile compute the Schrodinger
// potential, the Jost function (real or complex wavenumber), the pressure
// spectrum at the open end, and high-frequency diagnostics.

#include <complex>
#include <functional>
#include <vector>

#include "tract/types.hpp"

namespace tract {

// q(x) = r''(x)/r(x) via centered second differences (second-order one-sided
// stencils at the ends); cot(theta) = -r'(0)/r(0) from the stored slope.
PotentialProfile potential_from_radius(const RadiusProfile& r);

// Linear continuation of the radius beyond x = ell:
// r(ell) + r'(ell) (x - ell).
double extend_radius(const RadiusProfile& r, double x_beyond);

// Jost function F(k) = -i [f'(k,0) + cot(theta) f(k,0)], where f solves
// psi'' + k^2 psi = q psi backward from x = ell with f(ell) = e^{ik ell},
// f'(ell) = ik e^{ik ell}. Entire in k; valid at complex arguments.
std::complex<double> jost_function(const PotentialProfile& q,
                                   std::complex<double> k);

using JostEvaluator = std::function<std::complex<double>(std::complex<double>)>;
JostEvaluator jost_evaluator(const PotentialProfile& q);

// Jost solution sampled on the potential grid (f and f' at every node).
struct JostSolution {
  std::complex<double> F;
  std::vector<std::complex<double>> f;
  std::vector<std::complex<double>> f_prime;
};
JostSolution jost_solution(const PotentialProfile& q, std::complex<double> k);

// Regular solution phi(k, x) with phi(0) = 1, phi'(0) = -cot(theta),
// sampled on the potential grid.
struct RegularSolution {
  std::vector<std::complex<double>> phi;
  std::vector<std::complex<double>> phi_prime;
};
RegularSolution regular_solution(const PotentialProfile& q,
                                 std::complex<double> k);

// Normalized frequency-domain Webster state at the glottis end, obtained by
// integrating the first-order pressure / volume-velocity system backward
// from x = ell with data P = 1, V = [A(ell) + A'(ell)/(2ik)] / (c mu).
struct WebsterState {
  std::complex<double> pressure;
  std::complex<double> volume_velocity;
};
WebsterState forward_webster(const AreaFunction& area, double area_slope_end,
                             double k, const PhysicalConstants& consts);

// |P(k_j, ell)| = 1 / |V(k_j, 0)| on the k-grid. p_inf comes from the
// profile end values (c mu / (pi r(0) r(ell))), tail_c from the tail fit.
PressureSpectrum pressure_spectrum(const RadiusProfile& r, const Grid1D& kgrid,
                                   const PhysicalConstants& consts);
PressureSpectrum pressure_spectrum(const AreaFunction& area,
                                   const Grid1D& kgrid,
                                   const PhysicalConstants& consts);

// Pressure modulus via the Jost route: |P| = c mu k / (pi r(0) r(ell) |F|).
double pressure_via_jost(const PotentialProfile& q, double r0, double rl,
                         double k, const PhysicalConstants& consts);

double p_infinity_from_radius(const RadiusProfile& r,
                              const PhysicalConstants& consts);

// Large-k prediction of |P(k,ell)|^2 / p_inf^2:
// 1 - [cot^2(theta) - q(0+)/2 + (q(ell-)/2) cos(2 k ell)] / k^2.
double asymptotic_tail(const PotentialProfile& q, double k);
double asymptotic_tail(const RadiusProfile& r, double k);

// F on a real k-grid, packaged with the source potential.
JostData jost_sweep(const PotentialProfile& q, const Grid1D& kgrid);

}  // namespace tract
