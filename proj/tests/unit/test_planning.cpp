#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fairmdp/errors.hpp"
#include "fairmdp/instances.hpp"
#include "fairmdp/oracle.hpp"
#include "fairmdp/planning.hpp"
#include "fairmdp/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace fairmdp;

namespace {

double ascending_gini(double a, double b, double w1, double w2) {
  return w1 * std::min(a, b) + w2 * std::max(a, b);
}

void expect_consistent(const PlanResult& r, const TabularMDP& mdp, const RewardSet& rewards,
                       const WelfareSpec& spec) {
  EXPECT_NEAR(r.welfare, welfare_of_values(spec, r.per_agent_values), 1e-9);
  EXPECT_LE(flow_residual(mdp, r.occupancy), 1e-9);
  const auto v = evaluate_values(mdp, rewards, r.policy);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(v[i], r.per_agent_values[i], 1e-9);
  EXPECT_GE(r.upper_bound, r.welfare - 1e-9 * std::max(1.0, std::abs(r.welfare)));
}

}  // namespace

TEST(PlanScalarized, SingleStatePicksBestAction) {
  const auto mdp = single_state_mdp(2, 4);
  const std::vector<double> r = {1.0, 0.0};
  const auto p = plan_scalarized(mdp, ScalarReward::stationary(1, 2, 4, r));
  EXPECT_DOUBLE_EQ(p.value, 4.0);
  for (int h = 0; h < 4; ++h) EXPECT_EQ(p.policy(h, 0, 0), 1.0);
}

TEST(PlanScalarized, ConstantRewardTiesGoToLowestAction) {
  Rng rng(1);
  const auto mdp = testing_helpers::random_kernel(3, 3, 4, rng);
  const std::vector<double> r(9, 0.7);
  const auto p = plan_scalarized(mdp, ScalarReward::stationary(3, 3, 4, r));
  EXPECT_NEAR(p.value, 0.7 * 4, 1e-12);
  for (int h = 0; h < 4; ++h)
    for (int s = 0; s < 3; ++s) EXPECT_EQ(p.policy(h, s, 0), 1.0);
}

TEST(PlanScalarized, MatchesExhaustiveEnumeration) {
  for (int k = 0; k < 10; ++k) {
    const auto inst = sample_random_instance(3, 2, 3, 1, 200 + k);
    const auto sr = ScalarReward::stationary(3, 2, 3, inst.rewards.agent(0));
    const auto p = plan_scalarized(inst.mdp, sr);
    double best = -1.0;
    for (const auto& t : oracle::deterministic_tables(3, 2, 3))
      best = std::max(best, oracle::path_values(inst.mdp, inst.rewards,
                                                oracle::table_policy(3, 2, 3, t))[0]);
    EXPECT_NEAR(p.value, best, 1e-12);
    EXPECT_NEAR(evaluate_values(inst.mdp, inst.rewards, p.policy)[0], best, 1e-12);
  }
}

TEST(PlanScalarized, HandlesNegativeStepDependentRewards) {
  Rng rng(2);
  const auto mdp = testing_helpers::random_kernel(2, 2, 3, rng);
  ScalarReward sr(2, 2, 3);
  for (int h = 0; h < 3; ++h)
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) sr(h, s, a) = rng.uniform(-1.0, 1.0);
  const auto p = plan_scalarized(mdp, sr);
  double best = -1e9;
  for (const auto& t : oracle::deterministic_tables(2, 2, 3)) {
    const auto pi = oracle::table_policy(2, 2, 3, t);
    const auto q = oracle::path_occupancy(mdp, pi);
    double v = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) v += q[j] * sr.data()[j];
    best = std::max(best, v);
  }
  EXPECT_NEAR(p.value, best, 1e-12);
}

TEST(PlanNash, SingleAgentReducesToScalarPlan) {
  const auto inst = sample_random_instance(3, 2, 4, 1, 7);
  const auto r = plan_nash(inst.mdp, inst.rewards, 1e-9, 5000);
  const auto p = plan_scalarized(inst.mdp, ScalarReward::stationary(3, 2, 4, inst.rewards.agent(0)));
  EXPECT_NEAR(r.welfare, p.value, 1e-7);
  expect_consistent(r, inst.mdp, inst.rewards, WelfareSpec::nash());
}

TEST(PlanNash, TightnessInstanceMatchesGridOverMixingProbability) {
  const double d = 0.01;
  const auto inst = make_nw_tightness_instance(2, d);
  const auto r = plan_nash(inst.mdp, inst.rewards, 1e-12, 5000);
  // NW(x) = (x d^2 + (1-x) d)(x + (1-x) d), x = P(action a).
  double best_x = 0.0, best = -1.0;
  for (int g = 0; g <= 10000; ++g) {
    const double x = g / 10000.0;
    const double w = (x * d * d + (1 - x) * d) * (x + (1 - x) * d);
    if (w > best) {
      best = w;
      best_x = x;
    }
  }
  EXPECT_NEAR(r.policy(0, 0, 0), best_x, 1e-4);
  EXPECT_NEAR(r.welfare, best, 1e-9);
  EXPECT_NEAR(r.policy(0, 0, 0), 0.5, 0.01);
}

TEST(PlanNash, MatchesPairwiseMixtureGridOnSmallInstances) {
  for (int k = 0; k < 10; ++k) {
    const auto inst = sample_random_instance(2, 2, 2, 2, 300 + k);
    const auto r = plan_nash(inst.mdp, inst.rewards, 1e-10, 5000);
    ASSERT_TRUE(r.converged);
    const auto front = oracle::pareto_front(oracle::deterministic_value_vectors(inst.mdp, inst.rewards));
    const double ref = oracle::pairwise_grid_max(Measure::Nash, {}, front, 1e-3);
    EXPECT_NEAR(r.welfare, ref, 1e-4);
    EXPECT_GE(r.welfare, ref - 1e-9);
    expect_consistent(r, inst.mdp, inst.rewards, WelfareSpec::nash());
  }
}

TEST(PlanNash, ParetoSanityAgainstDeterministicPolicies) {
  for (int k = 0; k < 10; ++k) {
    const auto inst = sample_random_instance(3, 2, 3, 3, 400 + k);
    const auto r = plan_nash(inst.mdp, inst.rewards, 1e-9, 5000);
    for (const auto& v : oracle::deterministic_value_vectors(inst.mdp, inst.rewards)) {
      bool ge = true, gt = false;
      for (int i = 0; i < 3; ++i) {
        ge = ge && v[i] >= r.per_agent_values[i] - 1e-12;
        gt = gt || v[i] > r.per_agent_values[i] + 1e-6;
      }
      EXPECT_FALSE(ge && gt);
    }
  }
}

TEST(PlanNash, ClassicStepAlsoConverges) {
  const auto inst = sample_random_instance(3, 2, 3, 2, 11);
  PlanOptions o;
  o.tol = 1e-3;
  o.max_iters = 100000;
  o.nash_step = NashStep::Classic;
  const auto classic = plan_welfare(inst.mdp, inst.rewards, WelfareSpec::nash(), o);
  const auto away = plan_nash(inst.mdp, inst.rewards, 1e-10, 5000);
  EXPECT_TRUE(classic.converged);
  // Gap tol on sum log V bounds the relative welfare loss.
  EXPECT_GE(classic.welfare, away.welfare * std::exp(-1e-3) - 1e-12);
  EXPECT_LE(classic.welfare, away.upper_bound + 1e-12);
}

TEST(PlanNash, DegenerateAgentIsReported) {
  const auto mdp = single_state_mdp(2, 3);
  const RewardSet r(2, 1, 2, {0.5, 0.2, 0.0, 0.0});
  try {
    plan_nash(mdp, r, 1e-6, 100);
    FAIL() << "expected DegenerateInstance";
  } catch (const DegenerateInstance& e) {
    EXPECT_EQ(e.agent(), 1);
  }
}

TEST(PlanNash, RejectsNonPositiveTol) {
  const auto inst = sample_random_instance(2, 2, 2, 2, 1);
  EXPECT_THROW(plan_nash(inst.mdp, inst.rewards, 0.0, 10), InvalidInput);
}

TEST(PlanMin, ParetoInstanceOptimumIsH) {
  const auto po = make_po_counterexample(4);
  const auto r = plan_minwelfare(po.mdp, po.rewards, 1e-9, 1000);
  EXPECT_NEAR(r.welfare, 4.0, 1e-9);
}

TEST(PlanMin, IdenticalAgentsReduceToScalarPlan) {
  const auto base = sample_random_instance(3, 2, 3, 1, 21);
  std::vector<double> data;
  for (int k = 0; k < 3; ++k) data.insert(data.end(), base.rewards.data().begin(), base.rewards.data().end());
  const RewardSet r(3, 3, 2, data);
  const auto res = plan_minwelfare(base.mdp, r, 1e-10, 1000);
  const auto p = plan_scalarized(base.mdp, ScalarReward::stationary(3, 2, 3, base.rewards.agent(0)));
  EXPECT_NEAR(res.welfare, p.value, 1e-9);
}

TEST(PlanMin, OpposedAgentsMixFiftyFifty) {
  const auto mdp = single_state_mdp(2, 1);
  const RewardSet r(2, 1, 2, {1.0, 0.0, 0.0, 1.0});
  const auto res = plan_minwelfare(mdp, r, 1e-10, 1000);
  double best = 0.0;
  for (int g = 0; g <= 1000; ++g) best = std::max(best, std::min(g / 1000.0, 1 - g / 1000.0));
  EXPECT_NEAR(res.welfare, best, 1e-9);
  EXPECT_NEAR(res.policy(0, 0, 0), 0.5, 1e-9);
}

TEST(PlanMin, SaddleSandwichAndOracleGrid) {
  for (int k = 0; k < 10; ++k) {
    const auto inst = sample_random_instance(2, 2, 2, 2, 500 + k);
    const auto r = plan_minwelfare(inst.mdp, inst.rewards, 1e-9, 1000);
    ASSERT_TRUE(r.converged);
    const auto front = oracle::pareto_front(oracle::deterministic_value_vectors(inst.mdp, inst.rewards));
    const double ref = oracle::pairwise_grid_max(Measure::Min, {}, front, 1e-3);
    EXPECT_LE(r.welfare, r.upper_bound + 1e-12);
    EXPECT_GE(r.upper_bound, ref - 1e-12);
    EXPECT_NEAR(r.welfare, ref, 2e-3);
    EXPECT_GE(r.welfare, ref - 1e-9);
    expect_consistent(r, inst.mdp, inst.rewards, WelfareSpec::min());
  }
}

TEST(PlanMin, HedgeSolverReachesLooseTolerance) {
  const auto inst = sample_random_instance(3, 2, 3, 3, 31);
  PlanOptions o;
  o.tol = 5e-2;
  o.max_iters = 200000;
  o.saddle = SaddleMethod::NoRegret;
  const auto hedge = plan_welfare(inst.mdp, inst.rewards, WelfareSpec::min(), o);
  const auto exact = plan_minwelfare(inst.mdp, inst.rewards, 1e-10, 1000);
  EXPECT_TRUE(hedge.converged);
  EXPECT_NEAR(hedge.welfare, exact.welfare, 5e-2);
  EXPECT_GE(hedge.upper_bound, exact.welfare - 1e-9);
}

TEST(PlanGini, OpposedAgentsGrid) {
  const auto mdp = single_state_mdp(2, 1);
  const RewardSet r(2, 1, 2, {1.0, 0.0, 0.0, 1.0});
  const auto spec = WelfareSpec::gini({0.7, 0.3});
  const auto res = plan_gini(mdp, r, spec, 1e-10, 1000);
  double best = 0.0;
  for (int g = 0; g <= 1000; ++g) best = std::max(best, ascending_gini(g / 1000.0, 1 - g / 1000.0, 0.7, 0.3));
  EXPECT_NEAR(res.welfare, best, 1e-9);
  EXPECT_NEAR(best, 0.5, 1e-12);
}

TEST(PlanGini, UnitFirstWeightCoincidesWithMin) {
  for (int k = 0; k < 20; ++k) {
    const auto inst = sample_random_instance(3, 2, 3, 3, 600 + k);
    const double tol = 1e-8;
    const auto g = plan_gini(inst.mdp, inst.rewards, WelfareSpec::gini({1.0, 0.0, 0.0}), tol, 2000);
    const auto m = plan_minwelfare(inst.mdp, inst.rewards, tol, 2000);
    EXPECT_NEAR(g.welfare, m.welfare, 2 * tol);
  }
}

TEST(PlanGini, UniformWeightsCoincideWithUtilitarianOverN) {
  for (int k = 0; k < 10; ++k) {
    const auto inst = sample_random_instance(3, 2, 3, 3, 700 + k);
    const auto g = plan_gini(inst.mdp, inst.rewards, WelfareSpec::gini({1.0 / 3, 1.0 / 3, 1.0 / 3}), 1e-10, 2000);
    const auto u = plan_utilitarian(inst.mdp, inst.rewards);
    EXPECT_NEAR(g.welfare, u.welfare / 3, 1e-9);
  }
}

TEST(PlanGini, OracleGridAndPerturbedLeader) {
  const auto spec = WelfareSpec::gini({0.6, 0.4});
  for (int k = 0; k < 8; ++k) {
    const auto inst = sample_random_instance(2, 2, 2, 2, 800 + k);
    const auto r = plan_gini(inst.mdp, inst.rewards, spec, 1e-9, 1000);
    const auto front = oracle::pareto_front(oracle::deterministic_value_vectors(inst.mdp, inst.rewards));
    const double ref = oracle::pairwise_grid_max(Measure::Gini, spec.weights, front, 1e-3);
    EXPECT_NEAR(r.welfare, ref, 2e-3);
    EXPECT_GE(r.welfare, ref - 1e-9);
    expect_consistent(r, inst.mdp, inst.rewards, spec);

    PlanOptions o;
    o.tol = 5e-2;
    o.max_iters = 200000;
    o.saddle = SaddleMethod::NoRegret;
    o.seed = 3;
    const auto fpl = plan_welfare(inst.mdp, inst.rewards, spec, o);
    EXPECT_GE(fpl.welfare, r.welfare - 5e-2);
    EXPECT_GE(fpl.upper_bound, r.welfare - 1e-9);
  }
}

TEST(PlanGini, RejectsNonGiniSpec) {
  const auto inst = sample_random_instance(2, 2, 2, 2, 1);
  EXPECT_THROW(plan_gini(inst.mdp, inst.rewards, WelfareSpec::min(), 1e-6, 10), InvalidInput);
}

TEST(PlanUtilitarian, ParetoInstancePicksB) {
  const auto po = make_po_counterexample(4);
  const auto r = plan_utilitarian(po.mdp, po.rewards);
  EXPECT_DOUBLE_EQ(r.welfare, 12.0);
  EXPECT_EQ(r.policy(0, 0, 1), 1.0);
}

TEST(PlanUtilitarian, MatchesEnumeration) {
  for (int k = 0; k < 5; ++k) {
    const auto inst = sample_random_instance(3, 2, 3, 2, 900 + k);
    const auto r = plan_utilitarian(inst.mdp, inst.rewards);
    double best = 0.0;
    for (const auto& v : oracle::deterministic_value_vectors(inst.mdp, inst.rewards))
      best = std::max(best, v[0] + v[1]);
    EXPECT_NEAR(r.welfare, best, 1e-12);
  }
}

TEST(PlanProperties, NashKeepsOneOverNOfMaxMinValue) {
  const double tol = 1e-6;
  for (int k = 0; k < 30; ++k) {
    const auto inst = sample_random_instance(3, 2, 3, 3, 1000 + k);
    const auto nw = plan_nash(inst.mdp, inst.rewards, tol, 5000);
    const auto mw = plan_minwelfare(inst.mdp, inst.rewards, tol, 5000);
    ASSERT_GT(mw.welfare, tol);
    for (int i = 0; i < 3; ++i)
      EXPECT_GE(nw.per_agent_values[i], mw.per_agent_values[i] / 3 - 2 * tol);
  }
}

TEST(PlanProperties, UpperBoundsDominateEveryDeterministicPolicy) {
  const auto spec = WelfareSpec::gini({0.5, 0.3, 0.2});
  for (int k = 0; k < 5; ++k) {
    const auto inst = sample_random_instance(3, 2, 3, 3, 1100 + k);
    const auto vecs = oracle::deterministic_value_vectors(inst.mdp, inst.rewards);
    for (const auto& s : {WelfareSpec::nash(), WelfareSpec::min(), spec}) {
      const auto r = plan_welfare(inst.mdp, inst.rewards, s, {1e-9, 5000});
      for (const auto& v : vecs) ASSERT_LE(welfare_of_values(s, v), r.upper_bound + 1e-9);
    }
  }
}
