#pragma once

#include <span>
#include <vector>

#include "fairmdp/mdp.hpp"

namespace fairmdp {

struct ScalarPlan {
  NonStationaryPolicy policy;  // deterministic
  double value = 0.0;
};

/// Deterministic policy maximizing <q, reward> over the occupancy polytope of
/// (rho, P), by backward induction. Ties go to the lowest action index
/// (relative tolerance 1e-12).
ScalarPlan plan_scalarized(const TabularMDP& mdp, const ScalarReward& reward);

/// An extreme point of the feasible occupancy set together with its
/// per-agent values.
struct Vertex {
  OccupancyMeasure occupancy;
  NonStationaryPolicy policy;
  std::vector<double> values;
  double objective = 0.0;
};

/// Linear maximization over a convex set of occupancy measures. The fair
/// planners only talk to the feasible set through this interface, so the same
/// solvers run on a known model and on an optimistic confidence set.
///
/// The oracle keeps a reference to the reward set; it must outlive the oracle.
class OccupancyOracle {
 public:
  explicit OccupancyOracle(const RewardSet& rewards) : rewards_(&rewards) {}
  virtual ~OccupancyOracle() = default;

  virtual int num_states() const = 0;
  virtual int num_actions() const = 0;
  virtual int horizon() const = 0;

  /// argmax over the feasible set of <q, reward>.
  virtual Vertex best_response(const ScalarReward& reward) = 0;

  /// A feasible point with (when possible) every state-action reachable: the
  /// uniform policy's occupancy.
  virtual Vertex interior_point() = 0;

  /// best_response for sum_i weights[i] * r_i.
  Vertex best_response_weighted(std::span<const double> weights);

  const RewardSet& rewards() const noexcept { return *rewards_; }
  int num_agents() const noexcept { return rewards_->num_agents(); }

  /// Calls to best_response() so far.
  long calls() const noexcept { return calls_; }

 protected:
  Vertex make_vertex(OccupancyMeasure q, NonStationaryPolicy policy,
                     const ScalarReward* reward) const;
  long calls_ = 0;

 private:
  const RewardSet* rewards_;
};

/// Feasible set Q(rho, P) of a known model.
class KnownModelOracle final : public OccupancyOracle {
 public:
  KnownModelOracle(const TabularMDP& mdp, const RewardSet& rewards);

  int num_states() const override { return mdp_.num_states(); }
  int num_actions() const override { return mdp_.num_actions(); }
  int horizon() const override { return mdp_.horizon(); }

  Vertex best_response(const ScalarReward& reward) override;
  Vertex interior_point() override;

  const TabularMDP& mdp() const noexcept { return mdp_; }

 private:
  TabularMDP mdp_;
};

}  // namespace fairmdp
