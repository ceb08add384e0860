#include <benchmark/benchmark.h>

#include "fairmdp/confidence.hpp"
#include "fairmdp/instances.hpp"
#include "fairmdp/oracle.hpp"
#include "fairmdp/planning.hpp"
#include "fairmdp/ucrl.hpp"

namespace {

using namespace fairmdp;

void BM_PlanScalarized(benchmark::State& state) {
  const int S = static_cast<int>(state.range(0));
  const auto inst = sample_random_instance(S, 4, 10, 1, 1);
  const auto r = ScalarReward::stationary(S, 4, 10, inst.rewards.agent(0));
  for (auto _ : state) benchmark::DoNotOptimize(plan_scalarized(inst.mdp, r).value);
}
BENCHMARK(BM_PlanScalarized)->Arg(4)->Arg(16)->Arg(64);

void BM_PlanWelfare(benchmark::State& state, WelfareSpec spec) {
  const auto inst = sample_random_instance(4, 2, 5, 2, 2024);
  for (auto _ : state)
    benchmark::DoNotOptimize(plan_welfare(inst.mdp, inst.rewards, spec, {1e-4, 2000}).welfare);
}
BENCHMARK_CAPTURE(BM_PlanWelfare, nash, WelfareSpec::nash());
BENCHMARK_CAPTURE(BM_PlanWelfare, min, WelfareSpec::min());
BENCHMARK_CAPTURE(BM_PlanWelfare, gini, WelfareSpec::gini({2.0 / 3.0, 1.0 / 3.0}));

void BM_OptimisticPlan(benchmark::State& state) {
  const auto inst = sample_random_instance(4, 2, 5, 2, 2024);
  const auto cs = ConfidenceSet::fixed(inst.mdp, 0.3);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        optimistic_plan(cs, inst.mdp.initial(), 5, inst.rewards, WelfareSpec::nash(), {1e-4, 2000}).welfare);
}
BENCHMARK(BM_OptimisticPlan);

}  // namespace

BENCHMARK_MAIN();
