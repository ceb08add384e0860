#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fairmdp/confidence.hpp"
#include "fairmdp/mdp.hpp"
#include "fairmdp/ucrl.hpp"

namespace fairmdp {

/// r~(s,a) = sum_i lambda_i r_i(s,a) + (v_star / H)(1 - sum_i lambda_i), as an
/// S*A table.
std::vector<double> lagrangian_reward(std::span<const double> lambda,
                                      const RewardSet& rewards, double v_star, int H);

/// Euclidean projection onto { lambda >= 0, sum_i lambda_i <= B }.
std::vector<double> project_lambda(std::span<const double> lambda, double B);

/// Mutable state of one Lagrange-Maximin learner.
struct LagrangeState {
  std::vector<double> lambda;
  double B = 1.0;
  double v_star = 1.0;
  int horizon = 1;
  std::int64_t lambda_updates = 0;
  std::int64_t policy_updates = 0;
  /// Multiplies the policy player's step size.
  double eta_scale = 1.0;
  ConfidenceSet cs;
  std::vector<double> initial;
  /// log pi_h(a|s), laid out like NonStationaryPolicy.
  std::vector<double> log_policy;
  /// sum_u V^{pi_u}(r_i) so far.
  std::vector<double> cumulative_values;

  NonStationaryPolicy policy() const;
};

/// Fresh state: lambda = 0, uniform policy.
LagrangeState make_lagrange_state(ConfidenceSet cs, std::span<const double> initial,
                                  int horizon, int num_agents, double B, double v_star);

/// Projected online gradient step on lambda -> sum_i lambda_i (returns_i - v_star)
/// with step B / (H sqrt(n t)).
void lambda_player_update(LagrangeState& state, std::span<const double> returns);

/// Online mirror descent with the conditional-entropy regularizer over the
/// optimistic occupancy set, fed the (already known) reward of the episode
/// just played. The trajectory refreshes the confidence set first.
void oreps_policy_update(LagrangeState& state, std::span<const double> sa_reward,
                         const Trajectory& traj);

struct LagrangeOptions {
  double B = 0.0;        // 0: H times the reward bound
  double v_star = -1.0;  // negative: H times the reward bound
  double delta = 0.1;
  double eta_scale = 1.0;
  bool known_model = false;
  /// Play this policy every episode instead of the learner's (the lambda
  /// player still runs).
  std::optional<NonStationaryPolicy> fixed_policy;
  double comparator_tol = 1e-6;
};

/// Episode records carry the weak regret t MW* - min_i sum_u V_i(pi_u), the
/// strong min-welfare regret (regret_cum) and lambda before each update.
RegretLog run_lagrange_maximin(const TabularMDP& mdp_true, const RewardSet& rewards,
                               std::int64_t T, const LagrangeOptions& options,
                               std::uint64_t seed);

RegretLog run_lagrange_maximin(const TabularMDP& mdp_true, const RewardSet& rewards,
                               double v_star, double B, std::int64_t T, std::uint64_t seed);

}  // namespace fairmdp
