#include <benchmark/benchmark.h>

#include "mfbai/characteristic_time.hpp"
#include "mfbai/engine.hpp"

namespace {

using namespace mfbai;

const BanditModel kModel(Family::GaussianUnitVariance, {1.5, 1.0, 0.7, 0.5});
const MediatorSet kMediators{{0.1, 0.8, 0.1, 0.0},
                             {0.0, 0.1, 0.8, 0.1},
                             {0.0, 0.1, 0.1, 0.8},
                             {0.2, 0.0, 0.4, 0.4}};

void BM_SolveCold(benchmark::State& state) {
  SolverOptions opts;
  opts.refine = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_characteristic_time(kModel, kMediators, opts));
}
BENCHMARK(BM_SolveCold)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_WarmStart(benchmark::State& state) {
  const MaxMinObjective f(kModel.family(), kModel.means(), kModel.best_arm(), kMediators.policies());
  const auto start = solve_characteristic_time(kModel, kMediators).weights;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mirror_ascent(f, start, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_WarmStart)->Arg(50)->Arg(200);

void BM_EngineStep(benchmark::State& state) {
  EngineConfig cfg;
  cfg.mode = static_cast<SamplingMode>(state.range(0));
  TrackAndStop agent(kModel, kMediators, cfg);
  RngStream rng(1, 0);
  for (int i = 0; i < 100; ++i) agent.step(rng);
  for (auto _ : state) benchmark::DoNotOptimize(agent.step(rng));
}
BENCHMARK(BM_EngineStep)->Arg(0)->Arg(1)->Arg(2);

void BM_Trial(benchmark::State& state) {
  EngineConfig cfg;
  const auto stop = StoppingConfig::with_defaults(0.1, kModel.arms());
  std::uint64_t stream = 0;
  for (auto _ : state) {
    RngStream rng(3, stream++);
    benchmark::DoNotOptimize(run_trial(kModel, kMediators, cfg, stop, rng));
  }
}
BENCHMARK(BM_Trial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
