#include <benchmark/benchmark.h>

#include <vector>

#include "catbound/bounds.hpp"
#include "catbound/generator.hpp"
#include "catbound/model.hpp"
#include "catbound/montecarlo.hpp"
#include "catbound/solver.hpp"

namespace {

using namespace catbound;

void BM_FillGenerator(benchmark::State& state) {
  const auto model = QueueModel::example_corrected();
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  GeneratorAssembler assembler(model, n, Closure::reflecting);
  auto snapshot = assembler.a(0.0);
  double t = 0.0;
  for (auto _ : state) {
    assembler.fill_a(t, snapshot);
    benchmark::DoNotOptimize(snapshot.diagonal(0));
    t += 1e-3;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(snapshot.stored_entries()));
}
BENCHMARK(BM_FillGenerator)->Arg(100)->Arg(200)->Arg(400);

void BM_RhsApply(benchmark::State& state) {
  const auto model = QueueModel::example_corrected();
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  GeneratorAssembler assembler(model, n, Closure::reflecting);
  auto snapshot = assembler.a(0.0);
  std::vector<double> p(n + 1, 1.0 / static_cast<double>(n + 1)), out(n + 1);
  double t = 0.0;
  for (auto _ : state) {
    assembler.fill_a(t, snapshot);
    snapshot.apply(p, out);
    benchmark::DoNotOptimize(out[0]);
    t += 1e-3;
  }
}
BENCHMARK(BM_RhsApply)->Arg(200)->Arg(400);

void BM_ContractionRateSample(benchmark::State& state) {
  const auto model = QueueModel::example_corrected();
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  ContractionRate rate(model, WeightSequence::linear(), n);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rate.sample(t).value);
    t += 1e-2;
  }
}
BENCHMARK(BM_ContractionRateSample)->Arg(100)->Arg(200);

void BM_SolveForward(benchmark::State& state) {
  const auto model = QueueModel::example_corrected();
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto grid = uniform_grid(1.0, 11);
  std::vector<double> p0(n + 1, 0.0);
  p0[0] = 1.0;
  for (auto _ : state) {
    const auto traj = solve_forward(model, n, p0, grid, 1e-8);
    benchmark::DoNotOptimize(traj.mean.back());
  }
}
BENCHMARK(BM_SolveForward)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SimulatePaths(benchmark::State& state) {
  const auto model = QueueModel::example_corrected();
  const double evals[] = {1.0};
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const auto ensemble = simulate_paths(model, 0, 1.0, 1000, seed++, evals);
    benchmark::DoNotOptimize(ensemble.paths.size());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 1000);
}
BENCHMARK(BM_SimulatePaths)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
