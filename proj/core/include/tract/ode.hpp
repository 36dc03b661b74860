#pragma once

// Adaptive Dormand-Prince 5(4) integrator for small complex-valued systems.
// Header-only so the right-hand side can be inlined; state dimension is a
// compile-time constant (2 is all this library needs).

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

#include "tract/types.hpp"

namespace tract::ode {

using cplx = std::complex<double>;

struct Tolerances {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
};

// Integrates y' = rhs(x, y) from x0 to x1 (either direction), updating y in
// place. rhs has signature void(double x, const std::array<cplx,N>&,
// std::array<cplx,N>& dydx). Throws numeric_error on step-size underflow.
template <std::size_t N, typename Rhs>
void integrate(Rhs&& rhs, std::array<cplx, N>& y, double x0, double x1,
               const Tolerances& tol = {}) {
  if (x0 == x1) return;

  // Dormand-Prince coefficients.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                   a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // Embedded 4th-order weights.
  constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                   e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

  const double direction = (x1 > x0) ? 1.0 : -1.0;
  const double span = std::abs(x1 - x0);
  double x = x0;
  double h = direction * span / 64.0;
  const double h_min = span * 1e-15;

  std::array<cplx, N> k1, k2, k3, k4, k5, k6, k7, ytmp, y5;
  rhs(x, y, k1);

  int rejected_in_a_row = 0;
  while (direction * (x1 - x) > 0.0) {
    if (direction * (x + h - x1) > 0.0) h = x1 - x;
    if (std::abs(h) < h_min) {
      throw numeric_error("ode: step size underflow");
    }

    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a21 * k1[i]);
    rhs(x + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(x + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(x + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] =
          y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(x + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    rhs(x + h, ytmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                          b6 * k6[i]);
    rhs(x + h, y5, k7);

    double err_sq = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const cplx y4 = y[i] + h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                  e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale =
          tol.abs_tol + tol.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      const double e = std::abs(y5[i] - y4) / scale;
      err_sq += e * e;
    }
    const double err = std::sqrt(err_sq / static_cast<double>(N));

    if (err <= 1.0) {
      x += h;
      y = y5;
      k1 = k7;  // FSAL
      rejected_in_a_row = 0;
      const double grow =
          (err > 1e-30) ? 0.9 * std::pow(err, -0.2) : 5.0;
      h *= std::min(5.0, std::max(0.2, grow));
    } else {
      ++rejected_in_a_row;
      if (rejected_in_a_row > 60) {
        throw numeric_error("ode: repeated step rejection");
      }
      h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
    }
  }
}

}  // namespace tract::ode
