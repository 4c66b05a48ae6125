// Serial reference scan vs OpenMP scan over agent 0's bundles.

#include <benchmark/benchmark.h>

#include <random>

#include "flipfair/generators.hpp"
#include "flipfair/solvers.hpp"

using namespace flipfair;

namespace {

Instance instance_for(int n, int k) { return generate(FamilySpec{Family::general, n, k, std::nullopt, 1, 12345}); }

SolveOptions options(const benchmark::State& state) {
  return SolveOptions{kDefaultBudget, true, state.range(2) == 0 ? Exec::serial : Exec::parallel};
}

void args(benchmark::internal::Benchmark* b) {
  b->ArgNames({"n", "k", "parallel"});
  for (auto [n, k] : {std::pair{3, 3}, std::pair{3, 4}, std::pair{4, 3}}) {
    b->Args({n, k, 0});
    b->Args({n, k, 1});
  }
  b->Unit(benchmark::kMillisecond);
}

void BM_MaxNashWelfare(benchmark::State& state) {
  const Instance inst = instance_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const SolveOptions opts = options(state);
  for (auto _ : state) benchmark::DoNotOptimize(max_nash_welfare(inst, opts));
}

void BM_Leximin(benchmark::State& state) {
  const Instance inst = instance_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const SolveOptions opts = options(state);
  for (auto _ : state) benchmark::DoNotOptimize(leximin(inst, opts));
}

void BM_EffxExistsExhaustive(benchmark::State& state) {
  const Instance inst = instance_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const SolveOptions opts = options(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(effx_exists(inst, Notion::effx, Rational(1), SearchMode::exhaustive, opts));
  }
}

}  // namespace

BENCHMARK(BM_MaxNashWelfare)->Apply(args);
BENCHMARK(BM_Leximin)->Apply(args);
BENCHMARK(BM_EffxExistsExhaustive)->Apply(args);

BENCHMARK_MAIN();
