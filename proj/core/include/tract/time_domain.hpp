#pragma once

// Time-domain inversion for the r'(ell) >= 0 branch: cosine-transform
// kernel B(t) and downward-continuation layer stripping on a characteristic
// grid.

#include <cstddef>
#include <vector>

#include "tract/types.hpp"

namespace tract {

struct BKernel {
  Grid1D tgrid;  // [0, t_max]
  std::vector<double> values;
};

// B(t) = (2/pi) int_0^inf [|P|^2/p_inf^2 - 1] cos(kt) dk, trapezoid on the
// data grid (endpoint-corrected) plus the analytic 1/k^2 tail.
BKernel b_kernel(const PressureSpectrum& spectrum, double t_max,
                 std::size_t nt);

struct DownwardResult {
  Grid1D xgrid;
  std::vector<double> normalized;  // r(x)/r(0)
  double slope_end = 0.0;          // d/dx [r/r(0)] at x = ell
  bool negative_slope_flag = false;
};

// Layer stripping for [r^2 w_x]_x = r^2 w_tt with w(0,t) = 1 + int_0^t B,
// w_x(0,t) = 0; reads r(0)/r(x) off the characteristic diagonal. Requires
// the kernel on [0, 2 ell] with the same step as the x-grid.
DownwardResult downward_continuation(const BKernel& b, double ell,
                                     std::size_t n_x);

// r(x) = [r(x)/r(0)] sqrt(c mu / (pi p_inf)) / sqrt(r(ell)/r(0)).
RadiusProfile rescale_radius(const DownwardResult& profile, double p_inf,
                             const PhysicalConstants& consts);

// Support detection for unknown duct length: reconstruct on an enlarged
// interval and return the largest x at which |d^2/dx^2 [r/r(0)]| still rises
// above the noise floor.
double estimate_ell(const DownwardResult& profile);

}  // namespace tract
