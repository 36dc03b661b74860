#include "tract/direct.hpp"

#include <cmath>
#include <numbers>

#include "tract/numeric.hpp"
#include "tract/ode.hpp"

namespace tract {

using ode::cplx;

PotentialProfile potential_from_radius(const RadiusProfile& r) {
  r.validate();
  const std::size_t n = r.grid.count;
  if (n < 4) {
    throw validation_error("potential_from_radius: need at least 4 samples");
  }
  const double h = r.grid.step;
  const double h2 = h * h;
  const std::vector<double>& v = r.values;

  PotentialProfile q;
  q.grid = r.grid;
  q.values.resize(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    q.values[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2 / v[i];
  }
  // Second-order one-sided second differences at the ends.
  q.values[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2 / v[0];
  q.values[n - 1] =
      (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2 /
      v[n - 1];
  q.cot_theta = -r.slope0 / v[0];
  return q;
}

double extend_radius(const RadiusProfile& r, double x_beyond) {
  if (x_beyond < r.length()) {
    throw validation_error("extend_radius: x must be at or beyond the lips");
  }
  return r.slopeL * (x_beyond - r.length()) + r.lip_value();
}

namespace {

// Scaled Jost solve: integrates u = f e^{-ik ell} backward from ell so the
// carrier e^{ik ell} never enters the state. Returns {u(0), u'(0)}.
struct ScaledJostEnd {
  cplx u;
  cplx u_prime;
};

template <typename Sink>
ScaledJostEnd jost_backward(const PotentialProfile& q, cplx k, Sink&& sink) {
  const double ell = q.ell();
  const cplx k2 = k * k;
  auto rhs = [&](double x, const std::array<cplx, 2>& y,
                 std::array<cplx, 2>& dy) {
    dy[0] = y[1];
    dy[1] = (q(x) - k2) * y[0];
  };
  std::array<cplx, 2> y{cplx(1.0, 0.0), cplx(0.0, 1.0) * k};
  const std::size_t n = q.grid.count;
  sink(n - 1, y);
  for (std::size_t seg = n - 1; seg > 0; --seg) {
    ode::integrate<2>(rhs, y, q.grid.coord(seg), q.grid.coord(seg - 1));
    sink(seg - 1, y);
  }
  (void)ell;
  return ScaledJostEnd{y[0], y[1]};
}

}  // namespace

std::complex<double> jost_function(const PotentialProfile& q,
                                   std::complex<double> k) {
  q.validate();
  const ScaledJostEnd end =
      jost_backward(q, k, [](std::size_t, const std::array<cplx, 2>&) {});
  const cplx carrier = std::exp(cplx(0.0, 1.0) * k * q.ell());
  return cplx(0.0, -1.0) * carrier * (end.u_prime + q.cot_theta * end.u);
}

JostEvaluator jost_evaluator(const PotentialProfile& q) {
  return [q](std::complex<double> k) { return jost_function(q, k); };
}

JostSolution jost_solution(const PotentialProfile& q, std::complex<double> k) {
  q.validate();
  JostSolution out;
  out.f.resize(q.grid.count);
  out.f_prime.resize(q.grid.count);
  const ScaledJostEnd end =
      jost_backward(q, k, [&](std::size_t i, const std::array<cplx, 2>& y) {
        out.f[i] = y[0];
        out.f_prime[i] = y[1];
      });
  const cplx carrier = std::exp(cplx(0.0, 1.0) * k * q.ell());
  for (std::size_t i = 0; i < q.grid.count; ++i) {
    out.f[i] *= carrier;
    out.f_prime[i] *= carrier;
  }
  out.F = cplx(0.0, -1.0) * carrier * (end.u_prime + q.cot_theta * end.u);
  return out;
}

RegularSolution regular_solution(const PotentialProfile& q,
                                 std::complex<double> k) {
  q.validate();
  const cplx k2 = k * k;
  auto rhs = [&](double x, const std::array<cplx, 2>& y,
                 std::array<cplx, 2>& dy) {
    dy[0] = y[1];
    dy[1] = (q(x) - k2) * y[0];
  };
  RegularSolution out;
  out.phi.resize(q.grid.count);
  out.phi_prime.resize(q.grid.count);
  std::array<cplx, 2> y{cplx(1.0, 0.0), cplx(-q.cot_theta, 0.0)};
  out.phi[0] = y[0];
  out.phi_prime[0] = y[1];
  for (std::size_t seg = 0; seg + 1 < q.grid.count; ++seg) {
    ode::integrate<2>(rhs, y, q.grid.coord(seg), q.grid.coord(seg + 1));
    out.phi[seg + 1] = y[0];
    out.phi_prime[seg + 1] = y[1];
  }
  return out;
}

WebsterState forward_webster(const AreaFunction& area, double area_slope_end,
                             double k, const PhysicalConstants& consts) {
  area.validate();
  consts.validate();
  if (!(k > 0.0)) {
    throw validation_error("forward_webster: requires k > 0");
  }
  const double cmu = consts.c_mu();
  auto rhs = [&](double x, const std::array<cplx, 2>& y,
                 std::array<cplx, 2>& dy) {
    const double a = numeric::interp_clamped(area.grid, area.values, x);
    dy[0] = cplx(0.0, -1.0) * (cmu * k) * y[1] / a;
    dy[1] = cplx(0.0, -1.0) * (k * a / cmu) * y[0];
  };
  std::array<cplx, 2> y{
      cplx(1.0, 0.0),
      (area.values.back() + area_slope_end / (cplx(0.0, 2.0) * k)) / cmu};
  ode::integrate<2>(rhs, y, area.grid.back(), area.grid.start);
  return WebsterState{y[0], y[1]};
}

namespace {

PressureSpectrum spectrum_from_webster(const AreaFunction& area,
                                       double area_slope_end, double p_inf,
                                       const Grid1D& kgrid,
                                       const PhysicalConstants& consts) {
  kgrid.validate();
  if (kgrid.start <= 0.0) {
    throw validation_error("pressure_spectrum: k-grid must start above zero");
  }
  PressureSpectrum s;
  s.kgrid = kgrid;
  s.values.resize(kgrid.count);
  for (std::size_t j = 0; j < kgrid.count; ++j) {
    const WebsterState st =
        forward_webster(area, area_slope_end, kgrid.coord(j), consts);
    const double vv = std::abs(st.volume_velocity);
    if (!(vv > 0.0) || !std::isfinite(vv)) {
      throw numeric_error("pressure_spectrum: degenerate volume velocity");
    }
    s.values[j] = 1.0 / vv;
  }
  s.p_inf = p_inf;
  s.tail_c = fit_tail_c(kgrid, s.values, p_inf);
  return s;
}

}  // namespace

PressureSpectrum pressure_spectrum(const RadiusProfile& r, const Grid1D& kgrid,
                                   const PhysicalConstants& consts) {
  const AreaFunction area = area_from_radius(r);
  const double aprime_end =
      2.0 * std::numbers::pi * r.lip_value() * r.slopeL;
  return spectrum_from_webster(area, aprime_end,
                               p_infinity_from_radius(r, consts), kgrid,
                               consts);
}

PressureSpectrum pressure_spectrum(const AreaFunction& area,
                                   const Grid1D& kgrid,
                                   const PhysicalConstants& consts) {
  const RadiusProfile r = radius_from_area(area);
  const double aprime_end =
      2.0 * std::numbers::pi * r.lip_value() * r.slopeL;
  return spectrum_from_webster(area, aprime_end,
                               p_infinity_from_radius(r, consts), kgrid,
                               consts);
}

double pressure_via_jost(const PotentialProfile& q, double r0, double rl,
                         double k, const PhysicalConstants& consts) {
  if (!(k > 0.0)) {
    throw validation_error("pressure_via_jost: requires k > 0");
  }
  const double fabs = std::abs(jost_function(q, cplx(k, 0.0)));
  if (!(fabs > 0.0)) {
    throw numeric_error("pressure_via_jost: Jost function vanished at real k");
  }
  return consts.c_mu() * k / (std::numbers::pi * r0 * rl * fabs);
}

double p_infinity_from_radius(const RadiusProfile& r,
                              const PhysicalConstants& consts) {
  r.validate();
  consts.validate();
  return consts.c_mu() /
         (std::numbers::pi * r.glottis_value() * r.lip_value());
}

double asymptotic_tail(const PotentialProfile& q, double k) {
  q.validate();
  const double ct = q.cot_theta;
  const double q0 = q.values.front();
  const double ql = q.values.back();
  return 1.0 -
         (ct * ct - 0.5 * q0 + 0.5 * ql * std::cos(2.0 * k * q.ell())) /
             (k * k);
}

double asymptotic_tail(const RadiusProfile& r, double k) {
  return asymptotic_tail(potential_from_radius(r), k);
}

JostData jost_sweep(const PotentialProfile& q, const Grid1D& kgrid) {
  kgrid.validate();
  JostData out;
  out.kgrid = kgrid;
  out.f_values.resize(kgrid.count);
  for (std::size_t j = 0; j < kgrid.count; ++j) {
    out.f_values[j] = jost_function(q, cplx(kgrid.coord(j), 0.0));
  }
  out.source_potential = q;
  return out;
}

}  // namespace tract
