#include <benchmark/benchmark.h>

#include <random>

#include "advrisk/duality.hpp"

using namespace advrisk;

namespace {

grid::GridPtr fixture(double h) { return grid::from_gaussian_mixture(0.0, 1.0, 0.5, 2.0, 1.0, 0.5, 6.0, h); }

void BM_MinimizeAdversarialRisk(benchmark::State& state) {
  const auto g = fixture(1.0 / static_cast<double>(state.range(0)));
  const grid::EpsilonRadius r(0.5, *g);
  for (auto _ : state) benchmark::DoNotOptimize(risks::minimize_adversarial_risk(g, r).report.value);
  state.SetComplexityN(static_cast<long>(g->n()));
}
BENCHMARK(BM_MinimizeAdversarialRisk)->Arg(25)->Arg(50)->Arg(100)->Arg(200)->Complexity();

void BM_DualClassificationMax(benchmark::State& state) {
  const auto g = fixture(1.0 / static_cast<double>(state.range(0)));
  const grid::EpsilonRadius r(1.5, *g);
  for (auto _ : state) benchmark::DoNotOptimize(duality::dual_classification_max(g, r).value);
  state.SetComplexityN(static_cast<long>(g->n()));
}
BENCHMARK(BM_DualClassificationMax)->Arg(25)->Arg(50)->Arg(100)->Arg(200)->Complexity();

void BM_SlidingMax(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (auto& x : v) x = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(grid::sliding_max(v, 100));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SlidingMax)->Range(1 << 10, 1 << 18)->Complexity(benchmark::oN);

void BM_SurrogateAscent(benchmark::State& state) {
  const auto g = fixture(0.05);
  const grid::EpsilonRadius r(0.5, *g);
  for (auto _ : state) benchmark::DoNotOptimize(duality::dual_surrogate_ascent(g, r, losses::Loss::hinge(), 200).dual.value);
}
BENCHMARK(BM_SurrogateAscent);

}  // namespace

BENCHMARK_MAIN();
