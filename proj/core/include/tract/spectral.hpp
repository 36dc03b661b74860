#pragma once

// Spectral-side reconstruction: Jost modulus from pressure data, the outer
// (bound-state free) Jost function on the real axis, eligible resonances of
// a reconstructed potential, norming constants, and scenario classification.

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "tract/direct.hpp"
#include "tract/types.hpp"

namespace tract {

// |F(k_j)| = k_j p_inf / |P(k_j, ell)| on the spectrum's k-grid.
std::vector<double> modulus_of_jost(const PressureSpectrum& spectrum);

// Outer Jost function on the real grid: same modulus as the data, phase from
// the principal-value log integral (singularity subtracted, analytic 1/k^2
// tail beyond the grid).
struct OuterJost {
  Grid1D kgrid;
  std::vector<std::complex<double>> values;
};
OuterJost outer_jost(const PressureSpectrum& spectrum);

// Mobius factor that moves a resonance at -i beta to a bound state:
// F_j(k) = (k - i beta)/(k + i beta) F0(k). Same modulus on the real axis.
JostEvaluator bound_state_jost(JostEvaluator f0, double beta);

struct ResonanceReport {
  std::size_t m_count = 0;
  std::vector<double> betas;  // strictly increasing
  std::vector<double> g_sq;
  std::vector<double> m_sq;
  Scenario scenario = Scenario::NoBoundPositiveSlope;
  double beta_max = 0.0;
  std::vector<std::string> warnings;
};

// Scans g(beta) = i F(-i beta) of the (bound-state free) potential for sign
// changes on (0, beta_max], bisects each bracket, and keeps zeros with
// g'(beta) > 0. Fills betas, g_sq, m_sq, scenario.
ResonanceReport find_eligible_resonances(const PotentialProfile& q0,
                                         double beta_max,
                                         std::size_t scan_points = 2000);

// g(beta) = i F(-i beta), real for real potentials.
double resonance_function(const PotentialProfile& q0, double beta);

// g_j^2 = 2 beta / [phi(i beta, ell)^2 - 2 beta int_0^ell phi(i beta, y)^2 dy].
double gl_norming_constant(const std::vector<double>& phi_ibeta,
                           const Grid1D& xgrid, double beta);

// m_j^2 = i F_j(-i beta) / (dF_j/dk at i beta), derivative by central
// difference along the imaginary axis.
double marchenko_norming_constant(const JostEvaluator& f_j, double beta);

// Consistency map between the two norming constants:
// g^2 = -4 beta^2 m^2 / F_j(-i beta)^2.
double gl_from_marchenko(const JostEvaluator& f_j, double beta, double m_sq);

// Classifies the duct against the four mutually exclusive possibilities by
// counting sign changes of phi(0,.) (with its linear continuation) and of
// f(0,.) on [0, ell), cross-checked against the sign of -i F(0).
Scenario classify_scenario(const PotentialProfile& q, std::size_t n_bound);
Scenario classify_scenario(const PotentialProfile& q, const JostData& jost);

}  // namespace tract
