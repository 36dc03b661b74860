#pragma once

// Small numerical helpers used across the library: trapezoid rules,
// sine/cosine integrals, analytic 1/k^2 Fourier tails, root bracketing.

#include <cstddef>
#include <functional>
#include <vector>

#include "tract/types.hpp"

namespace tract::numeric {

double trapezoid(const std::vector<double>& v, double step);
// Running integral with the trapezoid rule; result[0] = 0.
std::vector<double> cumulative_trapezoid(const std::vector<double>& v,
                                         double step);

// Sine and cosine integrals Si(x), Ci(x). Power series below x = 4,
// a continued fraction for the complex exponential integral above.
double si(double x);
double ci(double x);  // requires x > 0

// Analytic tails of oscillatory 1/k^2 integrands:
//   integral_cos_over_k2(K, t) = int_K^inf cos(k t)/k^2 dk
//   integral_sin_over_k2(K, t) = int_K^inf sin(k t)/k^2 dk
double integral_cos_over_k2(double K, double t);
double integral_sin_over_k2(double K, double t);

// Bisection on a bracketing interval [lo, hi] with f(lo)*f(hi) <= 0.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol, int max_iter = 200);

struct LinearFitResult {
  double intercept = 0.0;
  double slope = 0.0;
};
LinearFitResult linear_fit(const std::vector<double>& x,
                           const std::vector<double>& y);

// Linear interpolation of samples on a uniform grid; clamps outside.
double interp_clamped(const Grid1D& grid, const std::vector<double>& v,
                      double x);

}  // namespace tract::numeric
