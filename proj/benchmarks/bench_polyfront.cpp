// Microbenchmarks for the solver building blocks and a full run.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "polyfront/config.hpp"
#include "polyfront/flux.hpp"
#include "polyfront/grid.hpp"
#include "polyfront/harness.hpp"
#include "polyfront/profile.hpp"
#include "polyfront/riemann.hpp"
#include "polyfront/tracker.hpp"

namespace {

using namespace polyfront;

RunConfig smooth_config() {
  RunConfig cfg;
  cfg.initial.s = Profile::ramp(-1.0, 0.0, 0.9, 0.1);
  cfg.initial.c = Profile::piecewise({0.5}, {0.2, 0.7});
  cfg.initial.k = Profile::piecewise({1.5}, {0.3, 0.8});
  cfg.T = 2.0;
  cfg.window = 5.0;
  return cfg;
}

// Piecewise linear Corey flux with range(0) uniform kinks.
void BM_ScalarSolver(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  FluxModel model = FluxModel::corey();
  std::vector<double> xs(n + 1);
  for (int i = 0; i <= n; ++i) xs[i] = static_cast<double>(i) / n;
  RegionFlux flux(0.4, 0.6, xs, model);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(0, n);
  std::vector<std::pair<double, double>> pairs(64);
  for (auto& p : pairs) p = {xs[pick(rng)], xs[pick(rng)]};
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& p = pairs[i++ % pairs.size()];
    benchmark::DoNotOptimize(solve_scalar_pl(flux, p.first, p.second));
  }
}
BENCHMARK(BM_ScalarSolver)->RangeMultiplier(8)->Range(64, 32768);

// Lone Riemann problem with a c jump, grids included.
void BM_RiemannCJump(benchmark::State& state) {
  FluxModel model = FluxModel::corey();
  State left{0.7, 0.8, 0.5}, right{0.2, 0.2, 0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_riemann(left, right, 0.05, model));
  }
}
BENCHMARK(BM_RiemannCJump)->Unit(benchmark::kMicrosecond);

void BM_BuildGrids(benchmark::State& state) {
  RunConfig cfg = smooth_config();
  FluxModel model = make_model(cfg.flux);
  DiscretizedData data = discretize(cfg, 0.05);
  for (auto _ : state) {
    ValueGrid grid = build_G0(data, model);
    benchmark::DoNotOptimize(build_S(grid, 0.2, 0.3, model));
  }
}
BENCHMARK(BM_BuildGrids)->Unit(benchmark::kMillisecond);

void BM_Simulation(benchmark::State& state) {
  RunConfig cfg = smooth_config();
  const double eps = 0.1 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    Simulation sim(discretize(cfg, eps), make_model(cfg.flux));
    sim.advance_to(cfg.T);
    benchmark::DoNotOptimize(sim.time());
  }
}
BENCHMARK(BM_Simulation)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
