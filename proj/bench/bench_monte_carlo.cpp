// Serial reference vs OpenMP Monte Carlo on the P1 experiment.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "ttsa/engine.hpp"

using namespace ttsa;

namespace {

Experiment p1() {
  const auto p = ProblemInstance::scalar(0.25, 0.1, -0.1, 0.25, 0.5, 0.25);
  Matrix t(2, 2);
  t << 0.9, 0.1, 0.2, 0.8;
  const FiniteMarkovChain chain(t);
  return Experiment(p, chain, make_spread_table(p, chain, 0.1),
                    StepSchedule::rate_optimal(8.2, 3.5), Vector::Zero(1),
                    Vector::Zero(1));
}

void BM_Serial(benchmark::State& state) {
  const Experiment e = p1();
  const auto grid = geometric_checkpoints(static_cast<std::uint64_t>(state.range(1)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        monte_carlo_mse_serial(e, static_cast<std::size_t>(state.range(0)), 1, grid));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_Parallel(benchmark::State& state) {
  const Experiment e = p1();
  const auto grid = geometric_checkpoints(static_cast<std::uint64_t>(state.range(1)));
  state.counters["workers"] = worker_count();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        monte_carlo_mse(e, static_cast<std::size_t>(state.range(0)), 1, grid));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

}  // namespace

BENCHMARK(BM_Serial)->Args({64, 10000})->Args({200, 100000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->Args({64, 10000})->Args({200, 100000})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
