#include "fairmdp/oracle.hpp"

#include <cmath>

#include "fairmdp/errors.hpp"

namespace fairmdp {

ScalarPlan plan_scalarized(const TabularMDP& mdp, const ScalarReward& reward) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  if (reward.num_states() != S || reward.num_actions() != A || reward.horizon() != H)
    throw InvalidInput("scalar reward shape does not match the MDP");
  for (double x : reward.data())
    if (!std::isfinite(x)) throw InvalidInput("scalar reward must be finite");

  std::vector<int> actions(static_cast<std::size_t>(H) * S, 0);
  std::vector<double> next(static_cast<std::size_t>(S), 0.0), cur(next.size());
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      int best_a = 0;
      double best = 0.0;
      for (int a = 0; a < A; ++a) {
        double q = reward(h, s, a);
        if (h + 1 < H) {
          const auto row = mdp.transition(s, a);
          for (int t = 0; t < S; ++t)
            q += row[static_cast<std::size_t>(t)] * next[static_cast<std::size_t>(t)];
        }
        if (a == 0 || q > best + 1e-12 * std::max(1.0, std::abs(best))) {
          best = q;
          best_a = a;
        }
      }
      cur[static_cast<std::size_t>(s)] = best;
      actions[static_cast<std::size_t>(h) * S + s] = best_a;
    }
    std::swap(cur, next);
  }
  double value = 0.0;
  for (int s = 0; s < S; ++s) value += mdp.initial(s) * next[static_cast<std::size_t>(s)];
  return {NonStationaryPolicy::deterministic(S, A, H, actions), value};
}

Vertex OccupancyOracle::best_response_weighted(std::span<const double> weights) {
  return best_response(ScalarReward::weighted(rewards(), horizon(), weights));
}

Vertex OccupancyOracle::make_vertex(OccupancyMeasure q, NonStationaryPolicy policy,
                                    const ScalarReward* reward) const {
  Vertex v;
  v.values = q.values(rewards());
  v.objective = reward != nullptr ? reward->dot(q) : 0.0;
  v.occupancy = std::move(q);
  v.policy = std::move(policy);
  return v;
}

KnownModelOracle::KnownModelOracle(const TabularMDP& mdp, const RewardSet& rewards)
    : OccupancyOracle(rewards), mdp_(mdp) {
  check_compatible(mdp_, rewards);
}

Vertex KnownModelOracle::best_response(const ScalarReward& reward) {
  ++calls_;
  auto plan = plan_scalarized(mdp_, reward);
  auto q = policy_to_occupancy(mdp_, plan.policy);
  return make_vertex(std::move(q), std::move(plan.policy), &reward);
}

Vertex KnownModelOracle::interior_point() {
  auto pi = NonStationaryPolicy::uniform(mdp_.num_states(), mdp_.num_actions(),
                                         mdp_.horizon());
  auto q = policy_to_occupancy(mdp_, pi);
  return make_vertex(std::move(q), std::move(pi), nullptr);
}

}  // namespace fairmdp
