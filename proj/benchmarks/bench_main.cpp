#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "solitrain/detection.hpp"
#include "solitrain/evolution.hpp"
#include "solitrain/spectral.hpp"

using namespace solitrain;

static void BM_FourierMultiplier(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SpectralTransform fft(n);
  std::vector<Complex> psi(n, Complex(1.0, 0.5)), mult(n, Complex(1.0 / n, 0.0));
  for (auto _ : state) {
    apply_fourier_multiplier(fft, psi, mult);
    benchmark::DoNotOptimize(psi.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_FourierMultiplier)->Arg(1024)->Arg(4096)->Arg(16384);

static void BM_SplitStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto components = static_cast<std::size_t>(state.range(1));
  const Grid grid = make_grid(n, 400.0, -200.0);
  StepSchedule sched(components);
  for (std::size_t i = 0; i < components; ++i) sched.set_self(i, {2.2, 1.0});
  for (std::size_t i = 0; i < components; ++i)
    for (std::size_t j = i + 1; j < components; ++j) sched.set_cross(i, j, {0.5, 0.0});
  auto s = init_uniform(grid, 1.0, components);
  SplitStepPropagator prop(grid, sched, 5e-4);
  for (auto _ : state) prop.advance_steps(s, 20);
  state.SetItemsProcessed(state.iterations() * 20);
}
BENCHMARK(BM_SplitStep)->Args({4096, 1})->Args({4096, 2})->Args({4096, 3})->Unit(benchmark::kMicrosecond);

static void BM_DetectEvents(benchmark::State& state) {
  const Grid grid = make_grid(4096, 400.0, -200.0);
  Trajectory tr{grid, {}, {{}}, {}, {{}}, 10.0, grid.nearest_index(10.0), std::nullopt, init_uniform(grid, 1.0, 1)};
  const double line_dt = 0.01;
  for (std::size_t k = 0; k <= 5000; ++k) {
    const double t = static_cast<double>(k) * line_dt;
    tr.line_times.push_back(t);
    tr.line_samples[0].push_back(1.0 - 0.8 * std::pow(std::cos(0.5 * t), 40));
  }
  for (std::size_t k = 0; k <= 500; ++k) {
    tr.times.push_back(0.1 * static_cast<double>(k));
    tr.density_records[0].insert(tr.density_records[0].end(), grid.size(), 1.0);
  }
  DetectorConfig cfg;
  for (auto _ : state) {
    auto log = detect_events(tr, 0, cfg, 50.0);
    benchmark::DoNotOptimize(log.events.data());
  }
}
BENCHMARK(BM_DetectEvents);
BENCHMARK_MAIN();
