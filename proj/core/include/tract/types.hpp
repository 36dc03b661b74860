#pragma once

// Shared value types for the duct-acoustics library: grids, radius/area
// profiles, pressure spectra, Schrodinger-side data and inversion results.
// All types are immutable value objects once filled in; they can be copied
// and shared across threads freely.

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tract {

// Inputs that fail structural checks (bad grids, non-positive samples,
// malformed tables).
class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric procedure that cannot continue (singular system, step-size
// underflow, data outside the supported regime).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PhysicalConstants {
  double sound_speed = 34300.0;  // cm/s
  double air_density = 0.0012;   // g/cm^3

  double c_mu() const { return sound_speed * air_density; }
  void validate() const;
};

// k [rad/cm] for a frequency nu [Hz]: k = 2*pi*nu / c.
double k_from_frequency(double nu_hz, const PhysicalConstants& consts);

// Uniform 1-D grid. Sample i sits at start + i*step, computed as a single
// multiply-add so there is no accumulation drift.
struct Grid1D {
  double start = 0.0;
  double step = 0.0;
  std::size_t count = 0;

  double coord(std::size_t i) const {
    return start + static_cast<double>(i) * step;
  }
  double back() const { return coord(count - 1); }
  std::vector<double> coords() const;
  void validate() const;

  // n samples spanning [a, b] inclusive.
  static Grid1D over(double a, double b, std::size_t n);
};

// Duct radius r(x) [cm] on [0, ell] with explicit end slopes. The end
// slopes are stored rather than re-derived because downstream behavior
// hinges on the sign of the slope at x = ell.
struct RadiusProfile {
  Grid1D grid;
  std::vector<double> values;
  double slope0 = 0.0;  // r'(0)
  double slopeL = 0.0;  // r'(ell)

  double length() const { return grid.back(); }
  double glottis_value() const { return values.front(); }
  double lip_value() const { return values.back(); }
  void validate() const;
};

// Cross-sectional area A(x) = pi r(x)^2 [cm^2].
struct AreaFunction {
  Grid1D grid;
  std::vector<double> values;

  void validate() const;
};

AreaFunction area_from_radius(const RadiusProfile& r);
// Positive square root; end slopes estimated with one-sided second-order
// differences.
RadiusProfile radius_from_area(const AreaFunction& a);

// Sampled |P(k, ell)| on a uniform k-grid over (0, k_max], plus the
// high-frequency plateau p_inf and the fitted tail constant of the model
// |P|^2/p_inf^2 = 1 + C/k^2 used beyond k_max.
struct PressureSpectrum {
  Grid1D kgrid;
  std::vector<double> values;
  double p_inf = 0.0;
  double tail_c = 0.0;

  void validate() const;
};

// Least-squares fit of |P|^2 = p_inf^2 (1 + C/k^2) over the top fraction of
// the k-grid. Used when only spectrum samples are available.
struct TailFit {
  double p_inf = 0.0;
  double c = 0.0;
};
TailFit fit_tail_plateau(const Grid1D& kgrid, const std::vector<double>& abs_p,
                         double top_fraction = 0.05);
// Fit only the tail constant, keeping a known plateau.
double fit_tail_c(const Grid1D& kgrid, const std::vector<double>& abs_p,
                  double p_inf, double top_fraction = 0.05);

// Full tail model including the single-harmonic term carried by ducts whose
// curvature does not vanish at the lips:
// |P|^2/p_inf^2 = 1 + [c + d cos(omega k) + e sin(omega k)] / k^2.
struct TailModel {
  double p_inf = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;
  double omega = 0.0;
};
TailModel fit_tail_harmonics(const Grid1D& kgrid,
                             const std::vector<double>& abs_p, double p_inf);

// Potential q(x) = r''(x)/r(x) [1/cm^2] on [0, ell], implicitly zero for
// x > ell, with the boundary parameter cot(theta) = -r'(0)/r(0).
struct PotentialProfile {
  Grid1D grid;
  std::vector<double> values;
  double cot_theta = 0.0;

  double ell() const { return grid.back(); }
  // Linear interpolation inside the grid, zero beyond it.
  double operator()(double x) const;
  void validate() const;
};

struct BoundState {
  double beta = 0.0;  // bound-state wavenumber, k = i*beta
  double g_sq = 0.0;  // Gel'fand-Levitan norming constant squared
  double m_sq = 0.0;  // Marchenko norming constant squared
};

// Jost function F on a real k-grid plus bound-state data and the potential
// it was computed from (which also serves as the entire-evaluator source).
struct JostData {
  Grid1D kgrid;
  std::vector<std::complex<double>> f_values;  // F(k_j)
  std::vector<BoundState> bound_states;
  PotentialProfile source_potential;
};

enum class Scenario {
  NoBoundPositiveSlope,  // no bound state, r'(ell) > 0
  NoBoundZeroSlope,      // no bound state, r'(ell) = 0
  OneBoundPhiZero,       // one bound state, only phi(0,.) vanishes
  OneBoundBothZero,      // one bound state, phi(0,.) and f(0,.) vanish
};
const char* to_string(Scenario s);

// One bound-state candidate duct. The radius is present only when the
// candidate is admissible (the scaled profile stays positive up to the
// lips); phi0 always carries the normalized shape for diagnostics.
struct Candidate {
  double beta = 0.0;
  bool admissible = false;
  std::vector<double> phi0;  // phi_j(0, x) on the x-grid
  std::optional<RadiusProfile> radius;
};

struct CandidateSet {
  RadiusProfile no_bound;  // the unique r'(ell) >= 0 representative
  std::vector<Candidate> with_bound;
  std::size_t m_count = 0;

  void validate() const;
};

// Second-order one-sided end-slope estimates for sampled profiles.
double end_slope_left(const Grid1D& grid, const std::vector<double>& v);
double end_slope_right(const Grid1D& grid, const std::vector<double>& v);

}  // namespace tract
