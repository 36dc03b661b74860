#include "tract/time_domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tract/numeric.hpp"

namespace tract {

BKernel b_kernel(const PressureSpectrum& spectrum, double t_max,
                 std::size_t nt) {
  spectrum.validate();
  if (!(t_max > 0.0) || nt < 3) {
    throw validation_error("b_kernel: need t_max > 0 and nt >= 3");
  }
  const Grid1D& kg = spectrum.kgrid;
  const std::size_t nk = kg.count;
  const double K = kg.back();
  // Tail continuation with the fitted single-harmonic term; the oscillatory
  // part concentrates near t = 2 ell in the transform and cannot be dropped
  // when the duct curvature survives at the lips.
  const TailModel tail =
      fit_tail_harmonics(kg, spectrum.values, spectrum.p_inf);
  const double C = tail.c;
  const double D = tail.d, E = tail.e, W = tail.omega;

  // Integrand samples on [0, K]: the k = 0 node is filled in by even
  // quadratic extrapolation through the first two samples.
  std::vector<double> knots(nk + 1);
  std::vector<double> ivals(nk + 1);
  knots[0] = 0.0;
  for (std::size_t j = 0; j < nk; ++j) {
    knots[j + 1] = kg.coord(j);
    const double ratio = spectrum.values[j] / spectrum.p_inf;
    ivals[j + 1] = ratio * ratio - 1.0;
  }
  {
    const double k1 = knots[1], k2 = knots[2];
    ivals[0] = (k2 * k2 * ivals[1] - k1 * k1 * ivals[2]) / (k2 * k2 - k1 * k1);
  }

  BKernel b;
  b.tgrid = Grid1D::over(0.0, t_max, nt);
  b.values.resize(nt);
  const double dk = kg.step;
  for (std::size_t it = 0; it < nt; ++it) {
    const double t = b.tgrid.coord(it);
    double acc = 0.0;
    double prev = ivals[0];  // cos(0 t) = 1
    for (std::size_t j = 1; j < knots.size(); ++j) {
      const double cur = ivals[j] * std::cos(knots[j] * t);
      acc += 0.5 * (prev + cur) * (knots[j] - knots[j - 1]);
      prev = cur;
    }
    // Euler-Maclaurin end correction at k = K using the tail model
    // f(k) = g(k) cos(kt)/k^2, g = C + D cos(Wk) + E sin(Wk); the k = 0 end
    // term vanishes by evenness.
    {
      const double g = C + D * std::cos(W * K) + E * std::sin(W * K);
      const double gp = -D * W * std::sin(W * K) + E * W * std::cos(W * K);
      const double fprime_K = gp * std::cos(K * t) / (K * K) -
                              g * t * std::sin(K * t) / (K * K) -
                              2.0 * g * std::cos(K * t) / (K * K * K);
      acc -= dk * dk / 12.0 * fprime_K;
    }
    acc += C * numeric::integral_cos_over_k2(K, t);
    // cos(Wk) cos(tk) and sin(Wk) cos(tk) fold into shifted tails.
    acc += 0.5 * D * (numeric::integral_cos_over_k2(K, t + W) +
                      numeric::integral_cos_over_k2(K, t - W));
    acc += 0.5 * E * (numeric::integral_sin_over_k2(K, t + W) +
                      numeric::integral_sin_over_k2(K, t - W));
    b.values[it] = 2.0 / std::numbers::pi * acc;
  }
  return b;
}

DownwardResult downward_continuation(const BKernel& b, double ell,
                                     std::size_t n_x) {
  if (!(ell > 0.0) || n_x < 5) {
    throw validation_error("downward_continuation: need ell > 0 and n_x >= 5");
  }
  const double h = ell / static_cast<double>(n_x - 1);
  const std::size_t nt = 2 * n_x - 1;
  if (b.tgrid.count < nt || std::abs(b.tgrid.step - h) > 1e-12 * ell) {
    throw validation_error(
        "downward_continuation: kernel grid must cover [0, 2 ell] at the x-step");
  }

  // Layer 0: w(0,t) = 1 + int_0^t B, from w_t(0,t) = B(t) and w(0,0) = 1.
  std::vector<double> w_prev(nt), w_cur(nt), w_next(nt, 0.0);
  {
    std::vector<double> bvals(b.values.begin(), b.values.begin() + nt);
    const std::vector<double> cum = numeric::cumulative_trapezoid(bvals, h);
    for (std::size_t j = 0; j < nt; ++j) w_prev[j] = 1.0 + cum[j];
  }

  std::vector<double> diag(n_x);
  diag[0] = w_prev[0];  // = 1
  std::vector<double> rho(n_x, 1.0);  // (r(x)/r(0))^2 per layer

  // First layer by Taylor expansion: w_x(0,.) = 0 and w_xx(0,.) = w_tt(0,.).
  for (std::size_t j = 1; j + 1 < nt; ++j) {
    w_cur[j] = w_prev[j] + 0.5 * (w_prev[j + 1] - 2.0 * w_prev[j] + w_prev[j - 1]);
  }
  diag[1] = w_cur[1];
  if (!(diag[1] > 0.0) || !std::isfinite(diag[1])) {
    throw numeric_error("downward_continuation: nonpositive diagonal value");
  }
  rho[1] = 1.0 / (diag[1] * diag[1]);

  for (std::size_t i = 1; i + 1 < n_x; ++i) {
    const double a_minus = 0.5 * (rho[i - 1] + rho[i]);
    const double a_center = rho[i];
    // Predict the coefficient at the outgoing midpoint, then correct it once
    // with the newly read diagonal.
    double a_plus = std::max(0.5 * (3.0 * rho[i] - rho[i - 1]), 0.25 * rho[i]);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = i + 1; j + i + 1 < nt; ++j) {
        const double wtt = w_cur[j + 1] - 2.0 * w_cur[j] + w_cur[j - 1];
        w_next[j] = w_cur[j] + (a_minus / a_plus) * (w_cur[j] - w_prev[j]) +
                    (a_center / a_plus) * wtt;
      }
      const double v = w_next[i + 1];
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw numeric_error(
            "downward_continuation: reconstruction left the admissible class "
            "(nonpositive radius); data may violate the r'(ell) >= 0 branch");
      }
      a_plus = 0.5 * (rho[i] + 1.0 / (v * v));
    }
    diag[i + 1] = w_next[i + 1];
    rho[i + 1] = 1.0 / (diag[i + 1] * diag[i + 1]);
    std::swap(w_prev, w_cur);
    std::swap(w_cur, w_next);
  }

  DownwardResult out;
  out.xgrid = Grid1D::over(0.0, ell, n_x);
  out.normalized.resize(n_x);
  for (std::size_t i = 0; i < n_x; ++i) out.normalized[i] = 1.0 / diag[i];
  out.slope_end = end_slope_right(out.xgrid, out.normalized);
  out.negative_slope_flag =
      out.slope_end < -1e-6 * out.normalized.back() / h;
  return out;
}

RadiusProfile rescale_radius(const DownwardResult& profile, double p_inf,
                             const PhysicalConstants& consts) {
  consts.validate();
  if (!(p_inf > 0.0)) {
    throw validation_error("rescale_radius: p_inf must be positive");
  }
  const double lip_ratio = profile.normalized.back();
  if (!(lip_ratio > 0.0)) {
    throw validation_error("rescale_radius: nonpositive lip ratio");
  }
  const double scale = std::sqrt(consts.c_mu() / (std::numbers::pi * p_inf)) /
                       std::sqrt(lip_ratio);
  RadiusProfile r;
  r.grid = profile.xgrid;
  r.values.resize(profile.normalized.size());
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    r.values[i] = scale * profile.normalized[i];
  }
  r.slope0 = scale * end_slope_left(profile.xgrid, profile.normalized);
  r.slopeL = scale * profile.slope_end;
  r.validate();
  return r;
}

double estimate_ell(const DownwardResult& profile) {
  const std::size_t n = profile.normalized.size();
  if (n < 8) {
    throw validation_error("estimate_ell: profile too short");
  }
  const double h = profile.xgrid.step;
  // Curvature magnitude, excluding the noisy marching tip.
  std::vector<double> curv(n, 0.0);
  const std::size_t last = n - 4;
  for (std::size_t i = 1; i <= last; ++i) {
    curv[i] = std::abs(profile.normalized[i + 1] - 2.0 * profile.normalized[i] +
                       profile.normalized[i - 1]) /
              (h * h);
  }
  // Reference level from a high percentile rather than the raw maximum, so
  // narrow leakage spikes near the glottis cannot hijack the scale.
  std::vector<double> sorted(curv.begin() + 1, curv.begin() + last + 1);
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() * 95 / 100,
                   sorted.end());
  const double peak = sorted[sorted.size() * 95 / 100];
  if (!(peak > 0.0)) return profile.xgrid.back();
  // Band-limited data smears the support edge symmetrically, so the
  // half-maximum crossing localizes it; interpolate between samples.
  const double threshold = 0.5 * peak;
  for (std::size_t i = last + 1; i-- > 1;) {
    if (curv[i] > threshold) {
      if (i >= last || !(curv[i] > curv[i + 1])) return profile.xgrid.coord(i);
      const double frac = (curv[i] - threshold) / (curv[i] - curv[i + 1]);
      return profile.xgrid.coord(i) + h * std::min(1.0, std::max(0.0, frac));
    }
  }
  return profile.xgrid.coord(1);
}

}  // namespace tract
