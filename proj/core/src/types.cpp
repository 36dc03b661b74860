#include "tract/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tract {

void PhysicalConstants::validate() const {
  if (!(sound_speed > 0.0) || !(air_density > 0.0)) {
    throw validation_error("constants: sound speed and air density must be positive");
  }
}

double k_from_frequency(double nu_hz, const PhysicalConstants& consts) {
  consts.validate();
  if (nu_hz < 0.0) {
    throw validation_error("k_from_frequency: frequency must be nonnegative");
  }
  return 2.0 * std::numbers::pi * nu_hz / consts.sound_speed;
}

std::vector<double> Grid1D::coords() const {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = coord(i);
  return out;
}

void Grid1D::validate() const {
  if (!(step > 0.0) || count < 2 || !std::isfinite(start)) {
    throw validation_error("grid: need step > 0 and at least 2 samples");
  }
}

Grid1D Grid1D::over(double a, double b, std::size_t n) {
  if (n < 2 || !(b > a)) {
    throw validation_error("grid: need b > a and at least 2 samples");
  }
  return Grid1D{a, (b - a) / static_cast<double>(n - 1), n};
}

void RadiusProfile::validate() const {
  grid.validate();
  if (values.size() != grid.count) {
    throw validation_error("radius: sample count does not match grid");
  }
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw validation_error("radius: samples must be positive and finite");
    }
  }
  if (!std::isfinite(slope0) || !std::isfinite(slopeL)) {
    throw validation_error("radius: end slopes must be finite");
  }
}

void AreaFunction::validate() const {
  grid.validate();
  if (values.size() != grid.count) {
    throw validation_error("area: sample count does not match grid");
  }
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw validation_error("area: samples must be positive and finite");
    }
  }
}

double end_slope_left(const Grid1D& grid, const std::vector<double>& v) {
  const double h = grid.step;
  if (v.size() >= 3) return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  return (v[1] - v[0]) / h;
}

double end_slope_right(const Grid1D& grid, const std::vector<double>& v) {
  const double h = grid.step;
  const std::size_t n = v.size();
  if (n >= 3) return (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return (v[n - 1] - v[n - 2]) / h;
}

AreaFunction area_from_radius(const RadiusProfile& r) {
  r.validate();
  AreaFunction a;
  a.grid = r.grid;
  a.values.resize(r.values.size());
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    a.values[i] = std::numbers::pi * r.values[i] * r.values[i];
  }
  return a;
}

RadiusProfile radius_from_area(const AreaFunction& a) {
  a.validate();
  RadiusProfile r;
  r.grid = a.grid;
  r.values.resize(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    r.values[i] = std::sqrt(a.values[i] / std::numbers::pi);
  }
  r.slope0 = end_slope_left(r.grid, r.values);
  r.slopeL = end_slope_right(r.grid, r.values);
  return r;
}

void PressureSpectrum::validate() const {
  kgrid.validate();
  if (kgrid.start <= 0.0) {
    throw validation_error("spectrum: k-grid must start above zero");
  }
  if (values.size() != kgrid.count) {
    throw validation_error("spectrum: sample count does not match grid");
  }
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw validation_error("spectrum: pressure samples must be positive");
    }
  }
  if (!(p_inf > 0.0)) {
    throw validation_error("spectrum: plateau p_inf must be positive");
  }
  // The last samples should already sit near the plateau.
  if (std::abs(values.back() / p_inf - 1.0) > 0.5) {
    throw validation_error("spectrum: tail is not near the plateau; k_max too small?");
  }
}

namespace {

// Tail model |P|^2 = alpha [1 + (C + D cos(w k) + E sin(w k)) / k^2]. The
// oscillatory part (present whenever the potential does not vanish at the
// lips) would otherwise bias both the plateau and the smooth constant; its
// frequency is found by scanning the residual of a plain fit.
struct TailModelFit {
  double alpha = 0.0;
  double c = 0.0;
  double d = 0.0;       // cos amplitude, 1/k^2 level
  double e = 0.0;       // sin amplitude, 1/k^2 level
  double omega = 0.0;   // harmonic frequency in k
};

TailModelFit fit_tail_model(const Grid1D& kgrid, const std::vector<double>& abs_p,
                            double top_fraction, const double* fixed_alpha) {
  kgrid.validate();
  if (abs_p.size() != kgrid.count) {
    throw validation_error("tail fit: sample count does not match grid");
  }
  // The harmonic stage needs a window wide enough to hold a few oscillation
  // periods, so widen short requests.
  std::size_t m = static_cast<std::size_t>(
      std::ceil(std::max(top_fraction, 0.2) * static_cast<double>(kgrid.count)));
  m = std::max<std::size_t>(m, 16);
  m = std::min(m, kgrid.count);
  const std::size_t first = kgrid.count - m;

  std::vector<double> ks(m), xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double k = kgrid.coord(first + i);
    ks[i] = k;
    xs[i] = 1.0 / (k * k);
    ys[i] = abs_p[first + i] * abs_p[first + i];
  }

  const bool free_alpha = fixed_alpha == nullptr;
  auto solve_ls = [&](double omega, bool with_harmonic, double* out) {
    // Columns: [alpha], alpha*C, alpha*D, alpha*E against y (or y - alpha).
    const int base = free_alpha ? 1 : 0;
    const int cols = base + (with_harmonic ? 3 : 1);
    std::vector<double> ata(cols * cols, 0.0), atb(cols, 0.0), row(cols);
    for (std::size_t i = 0; i < m; ++i) {
      int c = 0;
      if (free_alpha) row[c++] = 1.0;
      row[c++] = xs[i];
      if (with_harmonic) {
        row[c++] = xs[i] * std::cos(omega * ks[i]);
        row[c++] = xs[i] * std::sin(omega * ks[i]);
      }
      const double rhs = free_alpha ? ys[i] : ys[i] - *fixed_alpha;
      for (int p = 0; p < cols; ++p) {
        for (int q = 0; q < cols; ++q) ata[p * cols + q] += row[p] * row[q];
        atb[p] += row[p] * rhs;
      }
    }
    // Gaussian elimination with partial pivoting on the small normal system.
    for (int p = 0; p < cols; ++p) {
      int pivot = p;
      for (int r = p + 1; r < cols; ++r) {
        if (std::abs(ata[r * cols + p]) > std::abs(ata[pivot * cols + p])) {
          pivot = r;
        }
      }
      for (int q = 0; q < cols; ++q) std::swap(ata[p * cols + q], ata[pivot * cols + q]);
      std::swap(atb[p], atb[pivot]);
      const double d = ata[p * cols + p];
      if (std::abs(d) < 1e-300) return false;
      for (int r = p + 1; r < cols; ++r) {
        const double f = ata[r * cols + p] / d;
        for (int q = p; q < cols; ++q) ata[r * cols + q] -= f * ata[p * cols + q];
        atb[r] -= f * atb[p];
      }
    }
    for (int p = cols - 1; p >= 0; --p) {
      double acc = atb[p];
      for (int q = p + 1; q < cols; ++q) acc -= ata[p * cols + q] * out[q];
      out[p] = acc / ata[p * cols + p];
    }
    return true;
  };

  double plain[2] = {0.0, 0.0};
  if (!solve_ls(0.0, false, plain)) {
    throw validation_error("tail fit: degenerate normal system");
  }
  const double alpha0 = free_alpha ? plain[0] : *fixed_alpha;
  const double gamma0 = free_alpha ? plain[1] : plain[0];

  // Residual of the plain fit, scaled back to the 1/k^2 level.
  std::vector<double> res(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double model = alpha0 + gamma0 * xs[i];
    res[i] = (ys[i] - model) / xs[i];
  }
  double best_power = -1.0, best_omega = 0.0;
  double total_power = 0.0;
  for (std::size_t i = 0; i < m; ++i) total_power += res[i] * res[i];
  for (double omega = 2.0; omega <= 120.0; omega += 0.02) {
    double pc = 0.0, ps = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      pc += res[i] * std::cos(omega * ks[i]);
      ps += res[i] * std::sin(omega * ks[i]);
    }
    const double power = pc * pc + ps * ps;
    if (power > best_power) {
      best_power = power;
      best_omega = omega;
    }
  }

  // Keep the harmonic only when the window can actually pin it down: it has
  // to explain most of the residual and the window must span several
  // periods, otherwise the fitted frequency is too uncertain to help.
  const double window = ks.back() - ks.front();
  const double explained =
      2.0 * best_power / (static_cast<double>(m) * std::max(total_power, 1e-300));
  const bool harmonic_ok =
      explained > 0.5 && best_omega * window > 6.0 * 2.0 * std::numbers::pi;

  double full[4] = {0.0, 0.0, 0.0, 0.0};
  double alpha = alpha0, gamma = gamma0;
  double d = 0.0, e = 0.0;
  if (harmonic_ok && solve_ls(best_omega, true, full)) {
    const int base = free_alpha ? 1 : 0;
    alpha = free_alpha ? full[0] : *fixed_alpha;
    gamma = full[base];
    d = full[base + 1];
    e = full[base + 2];
  }
  if (!(alpha > 0.0)) {
    throw validation_error(
        "tail fit: spectrum tail inconsistent with a positive plateau");
  }
  return TailModelFit{alpha, gamma / alpha, d / alpha, e / alpha, best_omega};
}

}  // namespace

TailFit fit_tail_plateau(const Grid1D& kgrid, const std::vector<double>& abs_p,
                         double top_fraction) {
  const TailModelFit fit = fit_tail_model(kgrid, abs_p, top_fraction, nullptr);
  return TailFit{std::sqrt(fit.alpha), fit.c};
}

double fit_tail_c(const Grid1D& kgrid, const std::vector<double>& abs_p,
                  double p_inf, double top_fraction) {
  if (!(p_inf > 0.0)) {
    throw validation_error("tail fit: p_inf must be positive");
  }
  const double alpha = p_inf * p_inf;
  return fit_tail_model(kgrid, abs_p, top_fraction, &alpha).c;
}

TailModel fit_tail_harmonics(const Grid1D& kgrid,
                             const std::vector<double>& abs_p, double p_inf) {
  if (!(p_inf > 0.0)) {
    throw validation_error("tail fit: p_inf must be positive");
  }
  const double alpha = p_inf * p_inf;
  const TailModelFit fit = fit_tail_model(kgrid, abs_p, 0.2, &alpha);
  return TailModel{p_inf, fit.c, fit.d, fit.e, fit.omega};
}

double PotentialProfile::operator()(double x) const {
  if (x < grid.start || x > grid.back()) return 0.0;
  const double s = (x - grid.start) / grid.step;
  std::size_t i = static_cast<std::size_t>(s);
  if (i >= grid.count - 1) i = grid.count - 2;
  const double t = s - static_cast<double>(i);
  return values[i] * (1.0 - t) + values[i + 1] * t;
}

void PotentialProfile::validate() const {
  grid.validate();
  if (values.size() != grid.count) {
    throw validation_error("potential: sample count does not match grid");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw validation_error("potential: samples must be finite");
    }
  }
  if (!std::isfinite(cot_theta)) {
    throw validation_error("potential: boundary parameter must be finite");
  }
}

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::NoBoundPositiveSlope: return "NoBound-PositiveSlope";
    case Scenario::NoBoundZeroSlope: return "NoBound-ZeroSlope";
    case Scenario::OneBoundPhiZero: return "OneBound-PhiZero";
    case Scenario::OneBoundBothZero: return "OneBound-BothZero";
  }
  return "unknown";
}

void CandidateSet::validate() const {
  no_bound.validate();
  if (m_count != with_bound.size()) {
    throw validation_error("candidates: m_count does not match list length");
  }
  for (const Candidate& c : with_bound) {
    if (!(c.beta > 0.0)) {
      throw validation_error("candidates: bound-state beta must be positive");
    }
    if (c.admissible != c.radius.has_value()) {
      throw validation_error("candidates: radius present iff admissible");
    }
  }
}

}  // namespace tract
