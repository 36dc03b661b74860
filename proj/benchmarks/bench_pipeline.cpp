// Microbenchmarks for the hot paths: single-wavenumber solves, kernel
// transforms, the Nystrom inversion, and the layer-stripping march.

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "tract/direct.hpp"
#include "tract/gelfand_levitan.hpp"
#include "tract/time_domain.hpp"

namespace {

using namespace tract;

const PhysicalConstants consts;

RadiusProfile fixture_duct(std::size_t n) {
  RadiusProfile r;
  r.grid = Grid1D::over(0.0, 16.0, n);
  r.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = r.grid.coord(i);
    r.values[i] =
        1.2 + 0.02 * x + 0.25 * std::exp(-0.5 * std::pow((x - 8.0) / 2.5, 2));
  }
  r.slope0 = 0.02;
  r.slopeL =
      0.02 - 0.25 * (8.0 / 6.25) * std::exp(-0.5 * std::pow(8.0 / 2.5, 2));
  return r;
}

const PressureSpectrum& fixture_spectrum() {
  static const PressureSpectrum s =
      pressure_spectrum(fixture_duct(401), Grid1D{0.003, 0.003, 1000}, consts);
  return s;
}

void BM_forward_webster(benchmark::State& state) {
  const RadiusProfile duct = fixture_duct(401);
  const AreaFunction area = area_from_radius(duct);
  const double aprime =
      2.0 * std::numbers::pi * duct.lip_value() * duct.slopeL;
  double k = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_webster(area, aprime, k, consts));
    k = (k < 3.0) ? k + 0.001 : 0.5;
  }
}
BENCHMARK(BM_forward_webster);

void BM_jost_function(benchmark::State& state) {
  const PotentialProfile q = potential_from_radius(fixture_duct(401));
  double k = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(jost_function(q, std::complex<double>(k, 0.0)));
    k = (k < 3.0) ? k + 0.001 : 0.5;
  }
}
BENCHMARK(BM_jost_function);

void BM_b_kernel(benchmark::State& state) {
  const PressureSpectrum& s = fixture_spectrum();
  const std::size_t n_x = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(b_kernel(s, 32.0, 2 * n_x - 1));
  }
}
BENCHMARK(BM_b_kernel)->Arg(201)->Arg(401);

void BM_solve_gl(benchmark::State& state) {
  const PressureSpectrum& s = fixture_spectrum();
  const std::size_t n_x = static_cast<std::size_t>(state.range(0));
  const BKernel b = b_kernel(s, 32.0, 2 * n_x - 1);
  const Grid1D xgrid = Grid1D::over(0.0, 16.0, n_x);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        solve_gl(GLKernelSpec{b.tgrid, b.values, std::nullopt}, xgrid));
  }
}
BENCHMARK(BM_solve_gl)
    ->Arg(101)
    ->Arg(201)
    ->Arg(401)
    ->Unit(benchmark::kMillisecond);

void BM_downward_continuation(benchmark::State& state) {
  const PressureSpectrum& s = fixture_spectrum();
  const std::size_t n_x = static_cast<std::size_t>(state.range(0));
  const BKernel b = b_kernel(s, 32.0, 2 * n_x - 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(downward_continuation(b, 16.0, n_x));
  }
}
BENCHMARK(BM_downward_continuation)->Arg(201)->Arg(401);

void BM_enumerate_candidates(benchmark::State& state) {
  const PressureSpectrum& s = fixture_spectrum();
  InverseOptions options;
  options.n_x = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_candidates(s, 16.0, options, consts));
  }
}
BENCHMARK(BM_enumerate_candidates)->Arg(201)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
