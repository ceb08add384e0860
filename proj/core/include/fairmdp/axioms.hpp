#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fairmdp/instances.hpp"
#include "fairmdp/mdp.hpp"
#include "fairmdp/planning.hpp"
#include "fairmdp/welfare.hpp"

namespace fairmdp {

enum class Verdict { Satisfied, Violated, Inconclusive };

std::string to_string(Verdict v);

struct AxiomCheck {
  Verdict verdict = Verdict::Inconclusive;
  std::string witness;  // human-readable reason, set for every verdict
  std::vector<double> values_1;
  std::vector<double> values_2;
  double alpha = 0.0;     // continuity only
  double residual = 0.0;  // continuity only: |W(mix) - W(pi_2)|
};

/// If one policy's value vector dominates the other's (>= everywhere, > by
/// 1e-9 somewhere), the dominating policy must have strictly larger welfare.
AxiomCheck check_pareto(const WelfareSpec& spec, const TabularMDP& mdp,
                        const RewardSet& rewards, const NonStationaryPolicy& pi,
                        const NonStationaryPolicy& pi_tilde);

/// When V^pi1(r_i) / V^pi2(r_i) = V^pi1(r~_i) / V^pi2(r~_i) for every agent,
/// the welfare comparison of pi1 and pi2 must agree under r and r~.
AxiomCheck check_iian(const WelfareSpec& spec, const TabularMDP& mdp, const RewardSet& r,
                      const RewardSet& r_tilde, const NonStationaryPolicy& pi_1,
                      const NonStationaryPolicy& pi_2);

/// Welfare must not change when agents are relabelled (agent i takes the
/// reward of agent sigma[i]).
AxiomCheck check_anonymity(const WelfareSpec& spec, const TabularMDP& mdp,
                           const RewardSet& rewards, const NonStationaryPolicy& pi,
                           std::span<const int> sigma);

/// For W(pi_1) >= W(pi_2) >= W(pi_3), finds the smallest alpha with
/// W(pi^{alpha q_1 + (1 - alpha) q_3}) = W(pi_2) (scan at 1e-4, then bisection).
AxiomCheck check_continuity(const WelfareSpec& spec, const TabularMDP& mdp,
                            const RewardSet& rewards, const NonStationaryPolicy& pi_1,
                            const NonStationaryPolicy& pi_2, const NonStationaryPolicy& pi_3);

struct BoundCheck {
  std::vector<double> ratios;  // V^{pi_NW}(r_i) / V^{pi_MW}(r_i)
  double min_ratio = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  PlanResult nash;
  PlanResult maxmin;
};

/// Every agent keeps at least a 1/n fraction of her max-min value under the
/// Nash-optimal policy (minus solver slack 10 tol / V^{pi_MW}(r_i)).
BoundCheck check_nw_maxmin_bound(const TabularMDP& mdp, const RewardSet& rewards, double tol);

/// One row of the axiom table: 'Y' when no violation was found, 'N' otherwise.
struct AxiomRow {
  std::string measure;
  char pareto = 'Y';
  char anonymity = 'Y';
  char iian = 'Y';
  char continuity = 'Y';
  int checks = 0;
  std::vector<std::string> violations;
};

struct BatteryOptions {
  int random_instances = 100;
  std::uint64_t seed = 1;
  /// Gini weights for two agents; other sizes use w_j proportional to n - j.
  std::vector<double> gini_weights_2 = {2.0 / 3.0, 1.0 / 3.0};
  /// Further instances run through the same generic checks as the random ones.
  std::vector<Instance> extra_instances;
  std::vector<std::string> extra_labels;
};

/// Decreasing Gini weights w_j = (n - j) / (n (n + 1) / 2).
std::vector<double> linear_gini_weights(int n);

/// Runs the four checks on the textbook counterexamples plus random instances.
AxiomRow run_axiom_battery(Measure measure, const BatteryOptions& options = {});

}  // namespace fairmdp
