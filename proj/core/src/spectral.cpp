#include "tract/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tract/numeric.hpp"
#include "tract/ode.hpp"

namespace tract {

using ode::cplx;

std::vector<double> modulus_of_jost(const PressureSpectrum& spectrum) {
  spectrum.validate();
  std::vector<double> out(spectrum.kgrid.count);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double p = spectrum.values[j];
    if (!(p > 0.0)) {
      throw validation_error(
          "modulus_of_jost: zero pressure sample at k > 0 signals corrupt data");
    }
    out[j] = spectrum.kgrid.coord(j) * spectrum.p_inf / p;
  }
  return out;
}

OuterJost outer_jost(const PressureSpectrum& spectrum) {
  spectrum.validate();
  const Grid1D& kg = spectrum.kgrid;
  const std::size_t nk = kg.count;
  const double dk = kg.step;
  const double K = kg.back();
  const double K2 = 2.0 * K;  // model continuation of the integrand

  // Edge-local tail constant: the continuation must match the data where the
  // principal-value weight is largest, so average the last few percent of the
  // band rather than reusing the wide-window fit.
  double C = 0.0;
  {
    const std::size_t m = std::max<std::size_t>(nk / 20, 8);
    for (std::size_t j = nk - m; j < nk; ++j) {
      const double k = kg.coord(j);
      const double ratio = spectrum.values[j] / spectrum.p_inf;
      C += (ratio * ratio - 1.0) * k * k;
    }
    C /= static_cast<double>(m);
  }

  // log |k / F(k)| = log(|P|/p_inf) on the data grid.
  std::vector<double> labs(nk);
  for (std::size_t j = 0; j < nk; ++j) {
    labs[j] = std::log(spectrum.values[j] / spectrum.p_inf);
    if (!std::isfinite(labs[j])) {
      throw numeric_error("outer_jost: non-integrable log singularity in the data");
    }
  }

  // Below the first sample, |F(k)|^2 is extrapolated as an even quadratic
  // A + B t^2. This covers both small-k regimes: A > 0 gives the integrable
  // log t divergence of the integrand, A = 0 the finite limit.
  const double k1 = kg.coord(0);
  const double k2 = kg.coord(1);
  const double m1_sq = std::pow(k1 * spectrum.p_inf / spectrum.values[0], 2);
  const double m2_sq = std::pow(k2 * spectrum.p_inf / spectrum.values[1], 2);
  double mod_a = (k2 * k2 * m1_sq - k1 * k1 * m2_sq) / (k2 * k2 - k1 * k1);
  double mod_b = (m2_sq - m1_sq) / (k2 * k2 - k1 * k1);
  if (mod_a < 0.0) mod_a = 0.0;
  if (mod_b <= 0.0) {
    mod_a = m1_sq;
    mod_b = 0.0;
  }
  auto l_extrap = [&](double t) {
    return std::log(t) - 0.5 * std::log(mod_a + mod_b * t * t);
  };

  // Quadrature knots: dyadic octaves below k_1 (each refined 8-fold to tame
  // the logarithmic behavior of the integrand near t = 0), the data grid
  // with the low-t panels refined through the smooth |F|^2, then tail-model
  // samples. data_pos[j] records where grid node j lands in the knot list.
  constexpr int n_dyadic = 12;
  constexpr int octave_split = 8;
  std::vector<double> knots;
  std::vector<double> lvals;
  std::vector<std::size_t> data_pos(nk);
  for (int m = n_dyadic; m >= 1; --m) {
    const double lo = k1 * std::ldexp(1.0, -m);
    for (int s = 0; s < octave_split; ++s) {
      const double t = lo * (1.0 + static_cast<double>(s) / octave_split);
      knots.push_back(t);
      lvals.push_back(l_extrap(t));
    }
  }
  std::vector<double> mod_sq(nk);
  for (std::size_t j = 0; j < nk; ++j) {
    const double m = kg.coord(j) * spectrum.p_inf / spectrum.values[j];
    mod_sq[j] = m * m;
  }
  const std::size_t n_refined = std::min<std::size_t>(64, nk - 1);
  for (std::size_t j = 0; j < nk; ++j) {
    data_pos[j] = knots.size();
    knots.push_back(kg.coord(j));
    lvals.push_back(labs[j]);
    if (j < n_refined) {
      // Interpolate |F|^2 linearly in t^2 (it is even in k), which is exact
      // for the local A + B t^2 structure near the origin.
      const double tj = kg.coord(j);
      const double tj1 = kg.coord(j + 1);
      for (int s = 1; s < octave_split; ++s) {
        const double t = tj + (static_cast<double>(s) / octave_split) * dk;
        const double w = (t * t - tj * tj) / (tj1 * tj1 - tj * tj);
        const double msq = mod_sq[j] * (1.0 - w) + mod_sq[j + 1] * w;
        knots.push_back(t);
        lvals.push_back(std::log(t) - 0.5 * std::log(msq));
      }
    }
  }
  // Continuation beyond the grid. The smooth part follows the 1 + C/t^2
  // model; the oscillatory remainder of the data tail (a single harmonic in
  // t at the 1/t^2 level) is fitted and carried along so the integrand stays
  // smooth across the junction.
  double osc_cos = 0.0, osc_sin = 0.0, osc_omega = 0.0;
  {
    const std::size_t n_fit = std::max<std::size_t>(nk / 8, 24);
    std::vector<double> ts(n_fit), res(n_fit);
    for (std::size_t i = 0; i < n_fit; ++i) {
      const std::size_t j = nk - n_fit + i;
      const double t = kg.coord(j);
      ts[i] = t;
      res[i] = (labs[j] - 0.5 * std::log1p(C / (t * t))) * t * t;
    }
    double best_power = 0.0;
    for (double omega = 2.0; omega <= 120.0; omega += 0.02) {
      double pc = 0.0, ps = 0.0;
      for (std::size_t i = 0; i < n_fit; ++i) {
        pc += res[i] * std::cos(omega * ts[i]);
        ps += res[i] * std::sin(omega * ts[i]);
      }
      const double power = pc * pc + ps * ps;
      if (power > best_power) {
        best_power = power;
        osc_omega = omega;
        osc_cos = 2.0 * pc / static_cast<double>(n_fit);
        osc_sin = 2.0 * ps / static_cast<double>(n_fit);
      }
    }
  }
  auto l_model = [&](double t) {
    return 0.5 * std::log1p(C / (t * t)) +
           (osc_cos * std::cos(osc_omega * t) +
            osc_sin * std::sin(osc_omega * t)) /
               (t * t);
  };
  const double junction_offset = labs[nk - 1] - l_model(K);
  const std::size_t n_model = static_cast<std::size_t>(std::ceil((K2 - K) / dk));
  for (std::size_t m = 1; m <= n_model; ++m) {
    const double t = std::min(K + static_cast<double>(m) * dk, K2);
    const double damp = std::pow(K / t, 4.0);
    knots.push_back(t);
    lvals.push_back(l_model(t) + junction_offset * damp);
  }

  // d/dt of the data log, needed at the removable singularity t = k.
  std::vector<double> lprime(nk);
  for (std::size_t j = 1; j + 1 < nk; ++j) {
    lprime[j] = (labs[j + 1] - labs[j - 1]) / (2.0 * dk);
  }
  lprime[0] = (labs[1] - labs[0]) / dk - 0.5 * (labs[2] - 2 * labs[1] + labs[0]) / dk;
  lprime[nk - 1] = (labs[nk - 1] - labs[nk - 2]) / dk +
                   0.5 * (labs[nk - 1] - 2 * labs[nk - 2] + labs[nk - 3]) / dk;

  OuterJost out;
  out.kgrid = kg;
  out.values.resize(nk);

  for (std::size_t j = 0; j < nk; ++j) {
    const double k = kg.coord(j);
    const double lk = labs[j];
    const std::size_t singular = data_pos[j];

    auto integrand = [&](std::size_t idx) {
      if (idx == singular) return lprime[j];
      const double t = knots[idx];
      return 2.0 * k * (lvals[idx] - lk) / (t * t - k * k);
    };

    // Stub [0, t_min] by midpoint with the extrapolated integrand.
    const double t_min = knots.front();
    const double t_mid = 0.5 * t_min;
    const double l_mid = l_extrap(t_mid);
    double acc = t_min * 2.0 * k * (l_mid - lk) / (t_mid * t_mid - k * k);

    double prev = integrand(0);
    for (std::size_t idx = 1; idx < knots.size(); ++idx) {
      const double cur = integrand(idx);
      acc += 0.5 * (prev + cur) * (knots[idx] - knots[idx - 1]);
      prev = cur;
    }

    // Analytic principal value of the subtracted constant, and the 1/t^2
    // model tail beyond the continuation cutoff.
    acc += lk * std::log((K2 - k) / (K2 + k));
    acc += C / (2.0 * k * k) * std::log((K2 + k) / (K2 - k)) - C / (k * K2);

    const double phase = acc / std::numbers::pi;
    const double modulus = k * spectrum.p_inf / spectrum.values[j];
    out.values[j] = modulus * std::exp(cplx(0.0, phase));
  }
  return out;
}

JostEvaluator bound_state_jost(JostEvaluator f0, double beta) {
  if (!(beta >= 0.0)) {
    throw validation_error("bound_state_jost: beta must be nonnegative");
  }
  return [f0 = std::move(f0), beta](cplx k) {
    const cplx pole = k + cplx(0.0, beta);
    const double scale = 1e-6 * (1.0 + beta);
    if (std::abs(pole) < scale) {
      // k sits on the resonance at -i beta, where f0 has a simple zero;
      // replace f0(k)/(k + i beta) by the derivative of f0 there.
      const cplx h(0.0, scale);
      const cplx df = (f0(k + h) - f0(k - h)) / (2.0 * h);
      return (k - cplx(0.0, beta)) * df;
    }
    return (k - cplx(0.0, beta)) / pole * f0(k);
  };
}

namespace {

// Scaled resonance function: u'' = (q + beta^2) u backward from ell with
// u(ell) = 1, u'(ell) = beta; i F(-i beta) = e^{beta ell} (u'(0) + cot u(0)).
double resonance_function_scaled(const PotentialProfile& q, double beta) {
  const double b2 = beta * beta;
  auto rhs = [&](double x, const std::array<cplx, 2>& y,
                 std::array<cplx, 2>& dy) {
    dy[0] = y[1];
    dy[1] = (q(x) + b2) * y[0];
  };
  std::array<cplx, 2> y{cplx(1.0, 0.0), cplx(beta, 0.0)};
  ode::integrate<2>(rhs, y, q.ell(), 0.0);
  return y[1].real() + q.cot_theta * y[0].real();
}

}  // namespace

double resonance_function(const PotentialProfile& q0, double beta) {
  q0.validate();
  if (beta * q0.ell() > 300.0) {
    throw numeric_error("resonance_function: beta too large for the duct length");
  }
  return std::exp(beta * q0.ell()) * resonance_function_scaled(q0, beta);
}

ResonanceReport find_eligible_resonances(const PotentialProfile& q0,
                                         double beta_max,
                                         std::size_t scan_points) {
  q0.validate();
  if (!(beta_max > 0.0) || scan_points < 16) {
    throw validation_error(
        "find_eligible_resonances: need beta_max > 0 and a sensible scan size");
  }
  if (beta_max * q0.ell() > 300.0) {
    throw validation_error(
        "find_eligible_resonances: beta_max too large for the duct length");
  }

  ResonanceReport report;
  report.beta_max = beta_max;
  report.scenario = classify_scenario(q0, 0);

  const double step = beta_max / static_cast<double>(scan_points);
  auto g = [&](double b) { return resonance_function_scaled(q0, b); };

  double prev_b = step;
  double prev_g = g(prev_b);
  std::vector<double> zeros;
  for (std::size_t i = 2; i <= scan_points; ++i) {
    const double b = step * static_cast<double>(i);
    const double gb = g(b);
    if (prev_g == 0.0) {
      zeros.push_back(prev_b);
    } else if (prev_g * gb < 0.0) {
      zeros.push_back(numeric::bisect(g, prev_b, b, 1e-13 * (1.0 + b)));
    }
    prev_b = b;
    prev_g = gb;
  }

  const JostEvaluator f0 = jost_evaluator(q0);
  for (double b : zeros) {
    const double delta = std::max(1e-7, step * 1e-2);
    const double slope = (g(b + delta) - g(b - delta)) / (2.0 * delta);
    if (!(slope > 0.0)) continue;  // not eligible
    report.betas.push_back(b);
    // Norming constants straight from the reconstructed potential; the
    // Gel'fand-Levitan pipeline recomputes g^2 through its own transform.
    const RegularSolution phi = regular_solution(q0, cplx(0.0, b));
    std::vector<double> phi_real(phi.phi.size());
    for (std::size_t i = 0; i < phi_real.size(); ++i) {
      phi_real[i] = phi.phi[i].real();
    }
    report.g_sq.push_back(gl_norming_constant(phi_real, q0.grid, b));
    report.m_sq.push_back(
        marchenko_norming_constant(bound_state_jost(f0, b), b));
  }
  report.m_count = report.betas.size();

  // Unbracketed-zero heuristic at the top of the scan window.
  if (prev_g != 0.0) {
    const double g_end = prev_g;
    const double g_mid = g(0.5 * beta_max);
    const double delta = step;
    const double slope_end = (g(beta_max) - g(beta_max - delta)) / delta;
    if (g_end * slope_end < 0.0 && std::abs(g_end) < 0.5 * std::abs(g_mid)) {
      report.warnings.push_back(
          "resonance scan: g(beta_max) is still heading toward zero; "
          "beta_max may be too small");
    }
  }
  return report;
}

double gl_norming_constant(const std::vector<double>& phi_ibeta,
                           const Grid1D& xgrid, double beta) {
  xgrid.validate();
  if (!(beta > 0.0)) {
    throw validation_error("gl_norming_constant: beta must be positive");
  }
  if (phi_ibeta.size() != xgrid.count) {
    throw validation_error("gl_norming_constant: sample count mismatch");
  }
  std::vector<double> sq(phi_ibeta.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = phi_ibeta[i] * phi_ibeta[i];
  const double denom =
      sq.back() - 2.0 * beta * numeric::trapezoid(sq, xgrid.step);
  if (!(denom > 0.0)) {
    throw numeric_error(
        "gl_norming_constant: nonpositive normalizer; beta is not an eligible "
        "resonance of this potential");
  }
  return 2.0 * beta / denom;
}

double marchenko_norming_constant(const JostEvaluator& f_j, double beta) {
  if (!(beta > 0.0)) {
    throw validation_error("marchenko_norming_constant: beta must be positive");
  }
  const double delta = 1e-5 * (1.0 + beta);
  const cplx f_minus = f_j(cplx(0.0, -beta));
  const cplx df = (f_j(cplx(0.0, beta + delta)) - f_j(cplx(0.0, beta - delta))) /
                  (cplx(0.0, 2.0) * delta);
  if (std::abs(df) < 1e-10 * (1.0 + std::abs(f_minus))) {
    throw numeric_error(
        "marchenko_norming_constant: derivative below tolerance; simple-zero "
        "assumption violated");
  }
  const cplx m_sq = cplx(0.0, 1.0) * f_minus / df;
  if (!(m_sq.real() > 0.0) ||
      std::abs(m_sq.imag()) > 1e-6 * std::abs(m_sq.real())) {
    throw numeric_error("marchenko_norming_constant: result is not positive real");
  }
  return m_sq.real();
}

double gl_from_marchenko(const JostEvaluator& f_j, double beta, double m_sq) {
  const cplx f_minus = f_j(cplx(0.0, -beta));
  const cplx g_sq = -4.0 * beta * beta * m_sq / (f_minus * f_minus);
  if (!(g_sq.real() > 0.0) ||
      std::abs(g_sq.imag()) > 1e-6 * std::abs(g_sq.real())) {
    throw numeric_error("gl_from_marchenko: result is not positive real");
  }
  return g_sq.real();
}

namespace {

std::size_t count_sign_flips(const std::vector<double>& v, std::size_t begin,
                             std::size_t end) {
  std::size_t flips = 0;
  double last = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double x = v[i];
    if (x == 0.0) continue;
    if (last != 0.0 && last * x < 0.0) ++flips;
    last = x;
  }
  return flips;
}

}  // namespace

Scenario classify_scenario(const PotentialProfile& q, std::size_t n_bound) {
  q.validate();
  if (n_bound > 1) {
    throw validation_error("classify_scenario: at most one bound state is supported");
  }

  const RegularSolution reg = regular_solution(q, cplx(0.0, 0.0));
  std::vector<double> phi(reg.phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = reg.phi[i].real();
  const double phi_end = phi.back();
  const double phi_slope_end = reg.phi_prime.back().real();

  const JostSolution js = jost_solution(q, cplx(0.0, 0.0));
  std::vector<double> f0(js.f.size());
  for (std::size_t i = 0; i < f0.size(); ++i) f0[i] = js.f[i].real();
  const std::size_t z_f = count_sign_flips(f0, 0, f0.size() - 1);

  const double h0 = (cplx(0.0, -1.0) * js.F).real();
  const double delta = 1e-4;
  const cplx fdot =
      (jost_function(q, cplx(delta, 0.0)) - jost_function(q, cplx(-delta, 0.0))) /
      (2.0 * delta);
  const double zero_tol = 1e-6 * std::max(1.0, std::abs(fdot));

  std::size_t z_phi = count_sign_flips(phi, 0, phi.size());
  // The linear continuation beyond ell contributes one more zero when the
  // value and slope at the lips genuinely disagree in sign; a slope at the
  // F(0) = 0 noise floor does not count.
  if (phi_end * phi_slope_end < 0.0 && std::abs(h0) > zero_tol) ++z_phi;

  if (z_phi > 1 || z_f > 1) {
    throw numeric_error("classify_scenario: zero counts outside the taxonomy");
  }

  if (n_bound == 0) {
    if (std::abs(h0) <= zero_tol) {
      if (z_phi != 0 || z_f != 0) {
        throw numeric_error("classify_scenario: zero counts contradict F(0) = 0");
      }
      return Scenario::NoBoundZeroSlope;
    }
    if (h0 > 0.0) {
      if (z_phi != 0 || z_f != 0) {
        throw numeric_error("classify_scenario: zero counts contradict -iF(0) > 0");
      }
      return Scenario::NoBoundPositiveSlope;
    }
    throw numeric_error(
        "classify_scenario: -iF(0) < 0 without a bound state contradicts the "
        "taxonomy");
  }

  // One bound state.
  if (h0 > zero_tol) {
    throw numeric_error(
        "classify_scenario: -iF(0) > 0 with a bound state contradicts the "
        "taxonomy");
  }
  if (z_phi != 1) {
    throw numeric_error("classify_scenario: expected exactly one zero of phi(0,.)");
  }
  return (z_f == 0) ? Scenario::OneBoundPhiZero : Scenario::OneBoundBothZero;
}

Scenario classify_scenario(const PotentialProfile& q, const JostData& jost) {
  return classify_scenario(q, jost.bound_states.size());
}

}  // namespace tract
