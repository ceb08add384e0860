#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fairmdp/errors.hpp"
#include "fairmdp/instances.hpp"
#include "fairmdp/rng.hpp"
#include "fairmdp/welfare.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace fairmdp;

namespace {

std::vector<WelfareSpec> all_specs(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  double t = 0.0;
  for (int j = 0; j < n; ++j) t += w[j] = n - j;
  for (auto& x : w) x /= t;
  return {WelfareSpec::nash(), WelfareSpec::min(), WelfareSpec::gini(w),
          WelfareSpec::utilitarian()};
}

std::vector<double> random_values(Rng& rng, int n, double H) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = rng.uniform(0.0, H);
  return v;
}

}  // namespace

TEST(Welfare, MinOnTextbookValues) {
  const double H = 4;
  const std::vector<double> a = {H / 2, 3 * H / 8}, b = {H / 2, H / 2};
  EXPECT_DOUBLE_EQ(welfare_of_values(WelfareSpec::min(), a), 1.5);
  EXPECT_DOUBLE_EQ(welfare_of_values(WelfareSpec::min(), b), 2.0);
}

TEST(Welfare, GiniSortsAscendingAgainstDescendingWeights) {
  const double H = 4;
  for (double w2 : {0.1, 0.25, 0.4}) {
    const auto spec = WelfareSpec::gini({1 - w2, w2});
    const std::vector<double> v = {3 * H / 4, 3 * H / 8};
    EXPECT_NEAR(welfare_of_values(spec, v), 3 * H / 8 * (1 + w2), 1e-12);
  }
}

TEST(Welfare, NashOfEqualValues) {
  const std::vector<double> v = {2, 2, 2};
  EXPECT_DOUBLE_EQ(welfare_of_values(WelfareSpec::nash(), v), 8.0);
}

TEST(Welfare, NashZeroAndNegative) {
  const std::vector<double> z = {0.0, 5.0};
  EXPECT_EQ(welfare_of_values(WelfareSpec::nash(), z), 0.0);
  const std::vector<double> neg = {-1.0, 5.0};
  EXPECT_THROW(welfare_of_values(WelfareSpec::nash(), neg), InvalidInput);
}

TEST(Welfare, NashSurvivesIntermediateOverflow) {
  const std::vector<double> v = {1e200, 1e200, 1e-200, 1e-200};
  EXPECT_NEAR(welfare_of_values(WelfareSpec::nash(), v), 1.0, 1e-9);
  const std::vector<double> u = {1e-200, 1e-200, 1e200, 1e200};
  EXPECT_NEAR(welfare_of_values(WelfareSpec::nash(), u), 1.0, 1e-9);
}

TEST(Welfare, GiniWeightValidation) {
  EXPECT_THROW(WelfareSpec::gini({0.3, 0.7}), InvalidInput);
  EXPECT_THROW(WelfareSpec::gini({0.6, 0.6}), InvalidInput);
  EXPECT_THROW(WelfareSpec::gini({1.2, -0.2}), InvalidInput);
  EXPECT_NO_THROW(WelfareSpec::gini({1.0, 0.0}));
  const auto spec = WelfareSpec::gini({0.5, 0.5});
  const std::vector<double> three = {1, 2, 3};
  EXPECT_THROW(welfare_of_values(spec, three), InvalidInput);
}

TEST(Welfare, ParseMeasure) {
  EXPECT_EQ(parse_measure("nash"), Measure::Nash);
  EXPECT_EQ(parse_measure("min"), Measure::Min);
  EXPECT_EQ(parse_measure("gini"), Measure::Gini);
  EXPECT_EQ(parse_measure("util"), Measure::Utilitarian);
  EXPECT_THROW(parse_measure("median"), InvalidInput);
  for (auto m : {Measure::Nash, Measure::Min, Measure::Gini, Measure::Utilitarian})
    EXPECT_EQ(parse_measure(to_string(m)), m);
}

TEST(Welfare, OfPolicyOnParetoInstance) {
  const auto po = make_po_counterexample(4);
  EXPECT_DOUBLE_EQ(welfare_of_policy(WelfareSpec::min(), po.mdp, po.rewards, po.pi_b), 4.0);
  EXPECT_DOUBLE_EQ(welfare_of_policy(WelfareSpec::nash(), po.mdp, po.rewards, po.pi_b), 32.0);
}

TEST(Welfare, ZeroRewardsGiveZeroWelfare) {
  const auto mdp = single_state_mdp(2, 3);
  const RewardSet r(2, 1, 2, std::vector<double>(4, 0.0));
  for (const auto& spec : all_specs(2))
    EXPECT_EQ(welfare_of_policy(spec, mdp, r, NonStationaryPolicy::uniform(1, 2, 3)), 0.0);
}

TEST(Welfare, NashOfPolicyMatchesPathEnumerationProduct) {
  Rng rng(1);
  for (int k = 0; k < 10; ++k) {
    const auto inst = sample_random_instance(2, 2, 3, 3, 50 + k);
    const auto pi = testing_helpers::random_policy(2, 2, 3, rng);
    const auto ref = oracle::path_values(inst.mdp, inst.rewards, pi);
    EXPECT_NEAR(welfare_of_policy(WelfareSpec::nash(), inst.mdp, inst.rewards, pi),
                ref[0] * ref[1] * ref[2], 1e-12);
  }
}

TEST(GgwSupergradient, Examples) {
  const auto spec = WelfareSpec::gini({0.7, 0.3});
  const std::vector<double> a = {1, 3}, b = {3, 1}, tie = {2, 2};
  EXPECT_EQ(ggw_supergradient(spec, a), (std::vector<double>{0.7, 0.3}));
  EXPECT_EQ(ggw_supergradient(spec, b), (std::vector<double>{0.3, 0.7}));
  EXPECT_EQ(ggw_supergradient(spec, tie), (std::vector<double>{0.7, 0.3}));
  EXPECT_THROW(ggw_supergradient(WelfareSpec::min(), a), InvalidInput);
}

TEST(GgwSupergradient, IsSupergradientOfConcaveMap) {
  Rng rng(2);
  const auto spec = all_specs(4)[2];
  for (int k = 0; k < 1000; ++k) {
    const auto v = random_values(rng, 4, 5.0), u = random_values(rng, 4, 5.0);
    const auto c = ggw_supergradient(spec, v);
    double lin = 0.0;
    for (int i = 0; i < 4; ++i) lin += c[i] * (u[i] - v[i]);
    ASSERT_LE(welfare_of_values(spec, u), welfare_of_values(spec, v) + lin + 1e-12);
  }
}

TEST(WelfareProperties, SortedAssignmentMinimisesOverPermutations) {
  Rng rng(3);
  for (int n = 1; n <= 5; ++n) {
    const auto spec = all_specs(n)[2];
    for (int k = 0; k < 50; ++k) {
      const auto v = random_values(rng, n, 3.0);
      const double g = welfare_of_values(spec, v);
      std::vector<int> sigma(static_cast<std::size_t>(n));
      std::iota(sigma.begin(), sigma.end(), 0);
      do {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += spec.weights[j] * v[sigma[j]];
        ASSERT_LE(g, s + 1e-12);
      } while (std::next_permutation(sigma.begin(), sigma.end()));
    }
  }
}

TEST(WelfareProperties, MonotoneInEachCoordinate) {
  Rng rng(4);
  for (int k = 0; k < 500; ++k) {
    const int n = 1 + rng.uniform_int(5);
    for (const auto& spec : all_specs(n)) {
      auto v = random_values(rng, n, 4.0);
      const double before = welfare_of_values(spec, v);
      v[rng.uniform_int(n)] += rng.uniform(0.0, 1.0);
      const double after = welfare_of_values(spec, v);
      ASSERT_GE(after, before - 1e-12);
      if (spec.measure == Measure::Nash) {
        ASSERT_GT(after, before);
      }
    }
  }
}

TEST(WelfareProperties, PermutationInvariance) {
  Rng rng(5);
  for (int k = 0; k < 500; ++k) {
    const int n = 2 + rng.uniform_int(4);
    for (const auto& spec : all_specs(n)) {
      auto v = random_values(rng, n, 4.0);
      const double w = welfare_of_values(spec, v);
      std::shuffle(v.begin(), v.end(), rng.engine());
      ASSERT_NEAR(welfare_of_values(spec, v), w, 1e-12 * std::max(1.0, std::abs(w)));
    }
  }
}

TEST(WelfareProperties, NashScaleCovariance) {
  Rng rng(6);
  for (int k = 0; k < 500; ++k) {
    const int n = 1 + rng.uniform_int(6);
    auto v = random_values(rng, n, 4.0);
    const double c = rng.uniform(0.1, 3.0);
    const double w = welfare_of_values(WelfareSpec::nash(), v);
    for (auto& x : v) x *= c;
    ASSERT_NEAR(welfare_of_values(WelfareSpec::nash(), v), std::pow(c, n) * w,
                1e-12 * std::pow(c, n) * std::max(1.0, w));
  }
}

TEST(WelfareProperties, AgreesWithDirectFormulas) {
  Rng rng(7);
  for (int k = 0; k < 500; ++k) {
    const int n = 1 + rng.uniform_int(6);
    for (const auto& spec : all_specs(n)) {
      const auto v = random_values(rng, n, 4.0);
      const double ref = oracle::welfare(spec.measure, spec.weights, v);
      ASSERT_NEAR(welfare_of_values(spec, v), ref, 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }
}
