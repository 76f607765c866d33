#include <benchmark/benchmark.h>

#include <cmath>

#include "chldp/integrator.hpp"
#include "chldp/noise.hpp"
#include "chldp/norms.hpp"
#include "chldp/rate.hpp"
#include "chldp/spectral.hpp"

namespace {

using namespace chldp;

GridField wave(const Grid& grid) {
  GridField g(grid);
  for (std::size_t j = 0; j < g.values.size(); ++j) g.values[j] = std::cos(0.37 * static_cast<double>(j));
  return g;
}

void BM_Forward(benchmark::State& state) {
  const Grid grid{1, static_cast<int>(state.range(0))};
  const GridField g = wave(grid);
  for (auto _ : state) benchmark::DoNotOptimize(to_spectral(g));
}
BENCHMARK(BM_Forward)->Arg(16)->Arg(64)->Arg(256);

void BM_Forward2D(benchmark::State& state) {
  const Grid grid{2, static_cast<int>(state.range(0))};
  const GridField g = wave(grid);
  for (auto _ : state) benchmark::DoNotOptimize(to_spectral(g));
}
BENCHMARK(BM_Forward2D)->Arg(16)->Arg(32);

void BM_Integrate(benchmark::State& state) {
  const Grid grid{1, static_cast<int>(state.range(0))};
  const SolverConfig cfg{grid, TimeGrid{1e-4, 1000}};
  const ExponentialEuler scheme(ModelSpec{}, cfg);
  const GridField u0 = wave(grid);
  const NoisePath w = sample_sheet(grid, cfg.time, SeedSpec{1, 0});
  for (auto _ : state) benchmark::DoNotOptimize(scheme.integrate(u0, &w, nullptr, 0.01));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.time.steps));
}
BENCHMARK(BM_Integrate)->Arg(16)->Arg(64);

void BM_SampleSheet(benchmark::State& state) {
  const Grid grid{1, 64};
  const TimeGrid time{1e-4, 1000};
  std::uint64_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_sheet(grid, time, SeedSpec{1, r++}));
}
BENCHMARK(BM_SampleSheet);

void BM_AdjointGradient(benchmark::State& state) {
  const Grid grid{1, 16};
  const SolverConfig cfg{grid, TimeGrid{0.025, 20}};
  GridField g(grid);
  g.values.assign(grid.size(), 0.5);
  const RateProblem prob{wave(grid), ModelSpec{}, cfg, TerminalTarget::ball(g, 0.1)};
  ControlPath v(grid, cfg.time);
  for (auto _ : state) benchmark::DoNotOptimize(adjoint_gradient(prob, v, 0.1));
}
BENCHMARK(BM_AdjointGradient);

void BM_HolderNorm(benchmark::State& state) {
  const Grid grid{1, 64};
  const SolverConfig cfg{grid, TimeGrid{5e-4, static_cast<std::size_t>(state.range(0))}};
  const ExponentialEuler scheme(ModelSpec{}, cfg);
  const NoisePath w = sample_sheet(grid, cfg.time, SeedSpec{2, 0});
  const Trajectory u = scheme.integrate(wave(grid), &w, nullptr, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(holder_norm(u, 0.2, 4.0));
}
BENCHMARK(BM_HolderNorm)->Arg(250)->Arg(1000);

}  // namespace
BENCHMARK_MAIN();
