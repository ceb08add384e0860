#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fairmdp {

inline constexpr double kProbabilityTolerance = 1e-12;
inline constexpr double kDerivedTolerance = 1e-9;

/// Finite-horizon tabular MDP with initial distribution and a stationary
/// transition kernel. Kernel rows are stored densely as P[(s*A + a)*S + s'].
class TabularMDP {
 public:
  TabularMDP() = default;

  /// Validates shapes, row sums and nonnegativity; throws InvalidInput.
  TabularMDP(int num_states, int num_actions, int horizon,
             std::vector<double> initial, std::vector<double> transition);

  int num_states() const noexcept { return S_; }
  int num_actions() const noexcept { return A_; }
  int horizon() const noexcept { return H_; }

  std::span<const double> initial() const noexcept { return rho_; }
  double initial(int s) const { return rho_[static_cast<std::size_t>(s)]; }

  std::span<const double> transition(int s, int a) const {
    return {P_.data() + (static_cast<std::size_t>(s) * A_ + a) * S_,
            static_cast<std::size_t>(S_)};
  }
  double transition(int s, int a, int next) const {
    return P_[(static_cast<std::size_t>(s) * A_ + a) * S_ + next];
  }
  const std::vector<double>& transition_data() const noexcept { return P_; }

  /// Same (rho, P) with a different horizon.
  TabularMDP with_horizon(int horizon) const;

  friend bool operator==(const TabularMDP&, const TabularMDP&) = default;

 private:
  int S_ = 0;
  int A_ = 0;
  int H_ = 0;
  std::vector<double> rho_;
  std::vector<double> P_;
};

/// n per-agent reward tables r_i(s, a), stored as r[(i*S + s)*A + a].
///
/// Entries must lie in [0, upper_bound]. The bound defaults to 1; a few
/// textbook counterexamples use larger rewards and carry their true maximum.
class RewardSet {
 public:
  RewardSet() = default;
  RewardSet(int num_agents, int num_states, int num_actions,
            std::vector<double> rewards, double upper_bound = 1.0);

  int num_agents() const noexcept { return n_; }
  int num_states() const noexcept { return S_; }
  int num_actions() const noexcept { return A_; }
  double upper_bound() const noexcept { return upper_bound_; }

  double operator()(int agent, int s, int a) const {
    return r_[(static_cast<std::size_t>(agent) * S_ + s) * A_ + a];
  }
  std::span<const double> agent(int i) const {
    return {r_.data() + static_cast<std::size_t>(i) * S_ * A_,
            static_cast<std::size_t>(S_) * A_};
  }
  const std::vector<double>& data() const noexcept { return r_; }

  /// Agents reordered so that agent i of the result is agent order[i] here.
  RewardSet permuted(std::span<const int> order) const;

  /// Agent i's table multiplied by scale[i]; the upper bound grows to match.
  RewardSet scaled(std::span<const double> scale) const;

  friend bool operator==(const RewardSet&, const RewardSet&) = default;

 private:
  int n_ = 0;
  int S_ = 0;
  int A_ = 0;
  double upper_bound_ = 1.0;
  std::vector<double> r_;
};

/// pi_h(a | s) for h = 0..H-1, stored as p[(h*S + s)*A + a].
class NonStationaryPolicy {
 public:
  NonStationaryPolicy() = default;
  NonStationaryPolicy(int num_states, int num_actions, int horizon,
                      std::vector<double> probabilities);

  static NonStationaryPolicy uniform(int num_states, int num_actions, int horizon);
  /// actions[h*S + s] is the action taken at (h, s).
  static NonStationaryPolicy deterministic(int num_states, int num_actions,
                                           int horizon, std::span<const int> actions);

  int num_states() const noexcept { return S_; }
  int num_actions() const noexcept { return A_; }
  int horizon() const noexcept { return H_; }

  double operator()(int h, int s, int a) const {
    return p_[(static_cast<std::size_t>(h) * S_ + s) * A_ + a];
  }
  std::span<const double> distribution(int h, int s) const {
    return {p_.data() + (static_cast<std::size_t>(h) * S_ + s) * A_,
            static_cast<std::size_t>(A_)};
  }
  const std::vector<double>& data() const noexcept { return p_; }

  friend bool operator==(const NonStationaryPolicy&, const NonStationaryPolicy&) = default;

 private:
  int S_ = 0;
  int A_ = 0;
  int H_ = 0;
  std::vector<double> p_;
};

/// q_h(s, a) for h = 0..H-1, stored as q[(h*S + s)*A + a].
class OccupancyMeasure {
 public:
  OccupancyMeasure() = default;
  OccupancyMeasure(int num_states, int num_actions, int horizon);
  OccupancyMeasure(int num_states, int num_actions, int horizon,
                   std::vector<double> values);

  int num_states() const noexcept { return S_; }
  int num_actions() const noexcept { return A_; }
  int horizon() const noexcept { return H_; }

  double operator()(int h, int s, int a) const {
    return q_[(static_cast<std::size_t>(h) * S_ + s) * A_ + a];
  }
  double& operator()(int h, int s, int a) {
    return q_[(static_cast<std::size_t>(h) * S_ + s) * A_ + a];
  }
  std::span<const double> layer(int h) const {
    return {q_.data() + static_cast<std::size_t>(h) * S_ * A_,
            static_cast<std::size_t>(S_) * A_};
  }
  const std::vector<double>& data() const noexcept { return q_; }
  std::vector<double>& data() noexcept { return q_; }

  /// <q, r_i> for every agent.
  std::vector<double> values(const RewardSet& rewards) const;
  double value(const RewardSet& rewards, int agent) const;

  friend bool operator==(const OccupancyMeasure&, const OccupancyMeasure&) = default;

 private:
  int S_ = 0;
  int A_ = 0;
  int H_ = 0;
  std::vector<double> q_;
};

/// Step-dependent scalar reward r_h(s, a), stored like an occupancy measure.
/// Used as the linear objective handed to the planning oracles.
class ScalarReward {
 public:
  ScalarReward() = default;
  ScalarReward(int num_states, int num_actions, int horizon);
  ScalarReward(int num_states, int num_actions, int horizon, std::vector<double> values);

  /// r_h(s,a) = sa[s*A + a] for every h.
  static ScalarReward stationary(int num_states, int num_actions, int horizon,
                                 std::span<const double> sa);
  /// r_h(s,a) = sum_i weights[i] * r_i(s,a).
  static ScalarReward weighted(const RewardSet& rewards, int horizon,
                               std::span<const double> weights);

  int num_states() const noexcept { return S_; }
  int num_actions() const noexcept { return A_; }
  int horizon() const noexcept { return H_; }

  double operator()(int h, int s, int a) const {
    return r_[(static_cast<std::size_t>(h) * S_ + s) * A_ + a];
  }
  double& operator()(int h, int s, int a) {
    return r_[(static_cast<std::size_t>(h) * S_ + s) * A_ + a];
  }
  const std::vector<double>& data() const noexcept { return r_; }

  double dot(const OccupancyMeasure& q) const;

 private:
  int S_ = 0;
  int A_ = 0;
  int H_ = 0;
  std::vector<double> r_;
};

/// One episode: states[h], actions[h] and rewards[h*n + i] for h = 0..H-1.
struct Trajectory {
  std::int64_t episode = 0;
  int num_agents = 0;
  std::vector<int> states;
  std::vector<int> actions;
  std::vector<double> rewards;

  int length() const noexcept { return static_cast<int>(states.size()); }
  double reward(int h, int agent) const {
    return rewards[static_cast<std::size_t>(h) * num_agents + agent];
  }
  /// Realised episodic return of each agent.
  std::vector<double> returns() const;
};

void check_compatible(const TabularMDP& mdp, const RewardSet& rewards);
void check_compatible(const TabularMDP& mdp, const NonStationaryPolicy& policy);

/// Exact per-agent values V^pi(rho; r_i) by backward induction.
std::vector<double> evaluate_values(const TabularMDP& mdp, const RewardSet& rewards,
                                    const NonStationaryPolicy& policy);

/// Expected return of a step-dependent scalar reward under pi.
double evaluate_scalar(const TabularMDP& mdp, const ScalarReward& reward,
                       const NonStationaryPolicy& policy);

OccupancyMeasure policy_to_occupancy(const TabularMDP& mdp,
                                     const NonStationaryPolicy& policy);

/// Forward pass under a step-dependent kernel laid out as in mixture_kernel().
OccupancyMeasure policy_to_occupancy(std::span<const double> initial,
                                     std::span<const double> step_kernel,
                                     const NonStationaryPolicy& policy);

/// pi_h(a|s) = q_h(s,a) / sum_b q_h(s,b), uniform where the state has no mass.
NonStationaryPolicy occupancy_to_policy(const OccupancyMeasure& q);

/// alpha * q1 + (1 - alpha) * q2.
OccupancyMeasure mix_occupancies(const OccupancyMeasure& q1, const OccupancyMeasure& q2,
                                 double alpha);

/// Step-dependent kernel under which mix_occupancies(q1, q2, alpha) satisfies
/// Bellman flow when q1 flows under P1 and q2 under P2. Entry layout is
/// [((h*S + s)*A + a)*S + s'] for h = 0..H-2. Where neither measure visits
/// (s,a) at step h the row is alpha*P1 + (1-alpha)*P2.
std::vector<double> mixture_kernel(const OccupancyMeasure& q1, const TabularMDP& P1,
                                   const OccupancyMeasure& q2, const TabularMDP& P2,
                                   double alpha);

/// Largest absolute violation of the Bellman flow equations of q under
/// (rho, P), including nonnegativity.
double flow_residual(const TabularMDP& mdp, const OccupancyMeasure& q);

/// Same, for a step-dependent kernel laid out as in mixture_kernel().
double flow_residual(std::span<const double> initial, std::span<const double> step_kernel,
                     const OccupancyMeasure& q);

Trajectory simulate_episode(const TabularMDP& mdp, const RewardSet& rewards,
                            const NonStationaryPolicy& policy, std::uint64_t seed);

class Rng;
/// Variant drawing from a caller-owned stream (used inside learners).
Trajectory simulate_episode(const TabularMDP& mdp, const RewardSet& rewards,
                            const NonStationaryPolicy& policy, Rng& rng);

}  // namespace fairmdp
