#include "fairmdp/mdp.hpp"

#include <cmath>
#include <string>

#include "fairmdp/errors.hpp"
#include "fairmdp/rng.hpp"

namespace fairmdp {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidInput(message);
}

void check_distribution(std::span<const double> p, double tol, const std::string& what) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    require(std::isfinite(p[i]) && p[i] >= 0.0,
            what + ": entry " + std::to_string(i) + " is negative or not finite");
    total += p[i];
  }
  require(std::abs(total - 1.0) <= tol,
          what + ": sums to " + std::to_string(total) + ", expected 1");
}

std::size_t sized(int a, int b, int c) {
  return static_cast<std::size_t>(a) * static_cast<std::size_t>(b) *
         static_cast<std::size_t>(c);
}

}  // namespace

TabularMDP::TabularMDP(int num_states, int num_actions, int horizon,
                       std::vector<double> initial, std::vector<double> kernel)
    : S_(num_states), A_(num_actions), H_(horizon),
      rho_(std::move(initial)), P_(std::move(kernel)) {
  require(S_ > 0, "S must be positive");
  require(A_ > 0, "A must be positive");
  require(H_ > 0, "H must be positive");
  require(rho_.size() == static_cast<std::size_t>(S_), "rho must have S entries");
  require(P_.size() == sized(S_, A_, S_), "P must have S*A*S entries");
  check_distribution(rho_, kProbabilityTolerance, "rho");
  for (int s = 0; s < S_; ++s)
    for (int a = 0; a < A_; ++a)
      check_distribution(this->transition(s, a), kProbabilityTolerance,
                         "P[" + std::to_string(s) + "][" + std::to_string(a) + "]");
}

TabularMDP TabularMDP::with_horizon(int horizon) const {
  return TabularMDP(S_, A_, horizon, rho_, P_);
}

RewardSet::RewardSet(int num_agents, int num_states, int num_actions,
                     std::vector<double> rewards, double upper_bound)
    : n_(num_agents), S_(num_states), A_(num_actions),
      upper_bound_(upper_bound), r_(std::move(rewards)) {
  require(n_ > 0, "n must be positive");
  require(S_ > 0 && A_ > 0, "reward table needs positive S and A");
  require(std::isfinite(upper_bound_) && upper_bound_ > 0.0,
          "reward upper bound must be positive");
  require(r_.size() == sized(n_, S_, A_), "rewards must have n*S*A entries");
  for (std::size_t k = 0; k < r_.size(); ++k) {
    require(std::isfinite(r_[k]) && r_[k] >= 0.0 && r_[k] <= upper_bound_,
            "reward entry " + std::to_string(k) + " = " + std::to_string(r_[k]) +
                " outside [0, " + std::to_string(upper_bound_) + "]");
  }
}

RewardSet RewardSet::permuted(std::span<const int> order) const {
  require(order.size() == static_cast<std::size_t>(n_), "permutation length must be n");
  std::vector<bool> seen(static_cast<std::size_t>(n_), false);
  std::vector<double> out(r_.size());
  const std::size_t block = static_cast<std::size_t>(S_) * A_;
  for (int i = 0; i < n_; ++i) {
    const int src = order[static_cast<std::size_t>(i)];
    require(src >= 0 && src < n_ && !seen[static_cast<std::size_t>(src)],
            "not a permutation");
    seen[static_cast<std::size_t>(src)] = true;
    std::copy_n(r_.begin() + static_cast<std::ptrdiff_t>(src * block), block,
                out.begin() + static_cast<std::ptrdiff_t>(i * block));
  }
  return RewardSet(n_, S_, A_, std::move(out), upper_bound_);
}

RewardSet RewardSet::scaled(std::span<const double> scale) const {
  require(scale.size() == static_cast<std::size_t>(n_), "scale length must be n");
  std::vector<double> out(r_);
  double bound = upper_bound_;
  const std::size_t block = static_cast<std::size_t>(S_) * A_;
  for (int i = 0; i < n_; ++i) {
    const double c = scale[static_cast<std::size_t>(i)];
    require(std::isfinite(c) && c > 0.0, "scale factors must be positive");
    for (std::size_t k = 0; k < block; ++k) out[i * block + k] *= c;
    bound = std::max(bound, c * upper_bound_);
  }
  return RewardSet(n_, S_, A_, std::move(out), bound);
}

NonStationaryPolicy::NonStationaryPolicy(int num_states, int num_actions, int horizon,
                                         std::vector<double> probabilities)
    : S_(num_states), A_(num_actions), H_(horizon), p_(std::move(probabilities)) {
  require(S_ > 0 && A_ > 0 && H_ > 0, "policy needs positive S, A, H");
  require(p_.size() == sized(H_, S_, A_), "policy must have H*S*A entries");
  for (int h = 0; h < H_; ++h)
    for (int s = 0; s < S_; ++s)
      check_distribution(distribution(h, s), kProbabilityTolerance,
                         "pi[" + std::to_string(h) + "][" + std::to_string(s) + "]");
}

NonStationaryPolicy NonStationaryPolicy::uniform(int num_states, int num_actions,
                                                 int horizon) {
  return NonStationaryPolicy(num_states, num_actions, horizon,
                             std::vector<double>(sized(horizon, num_states, num_actions),
                                                 1.0 / num_actions));
}

NonStationaryPolicy NonStationaryPolicy::deterministic(int num_states, int num_actions,
                                                       int horizon,
                                                       std::span<const int> actions) {
  require(actions.size() == static_cast<std::size_t>(horizon) * num_states,
          "deterministic policy needs H*S actions");
  std::vector<double> p(sized(horizon, num_states, num_actions), 0.0);
  for (std::size_t k = 0; k < actions.size(); ++k) {
    require(actions[k] >= 0 && actions[k] < num_actions, "action index out of range");
    p[k * num_actions + actions[k]] = 1.0;
  }
  return NonStationaryPolicy(num_states, num_actions, horizon, std::move(p));
}

OccupancyMeasure::OccupancyMeasure(int num_states, int num_actions, int horizon)
    : S_(num_states), A_(num_actions), H_(horizon),
      q_(sized(horizon, num_states, num_actions), 0.0) {}

OccupancyMeasure::OccupancyMeasure(int num_states, int num_actions, int horizon,
                                   std::vector<double> values)
    : S_(num_states), A_(num_actions), H_(horizon), q_(std::move(values)) {
  require(q_.size() == sized(H_, S_, A_), "occupancy must have H*S*A entries");
}

double OccupancyMeasure::value(const RewardSet& rewards, int agent) const {
  const auto r = rewards.agent(agent);
  const std::size_t block = static_cast<std::size_t>(S_) * A_;
  double v = 0.0;
  for (int h = 0; h < H_; ++h) {
    const double* layer = q_.data() + h * block;
    for (std::size_t k = 0; k < block; ++k) v += layer[k] * r[k];
  }
  return v;
}

std::vector<double> OccupancyMeasure::values(const RewardSet& rewards) const {
  require(rewards.num_states() == S_ && rewards.num_actions() == A_,
          "reward/occupancy shape mismatch");
  std::vector<double> v(static_cast<std::size_t>(rewards.num_agents()));
  for (int i = 0; i < rewards.num_agents(); ++i) v[static_cast<std::size_t>(i)] = value(rewards, i);
  return v;
}

ScalarReward::ScalarReward(int num_states, int num_actions, int horizon)
    : S_(num_states), A_(num_actions), H_(horizon),
      r_(sized(horizon, num_states, num_actions), 0.0) {}

ScalarReward::ScalarReward(int num_states, int num_actions, int horizon,
                           std::vector<double> values)
    : S_(num_states), A_(num_actions), H_(horizon), r_(std::move(values)) {
  require(r_.size() == sized(H_, S_, A_), "scalar reward must have H*S*A entries");
}

ScalarReward ScalarReward::stationary(int num_states, int num_actions, int horizon,
                                      std::span<const double> sa) {
  require(sa.size() == static_cast<std::size_t>(num_states) * num_actions,
          "state-action reward must have S*A entries");
  ScalarReward out(num_states, num_actions, horizon);
  for (int h = 0; h < horizon; ++h)
    std::copy(sa.begin(), sa.end(),
              out.r_.begin() + static_cast<std::ptrdiff_t>(h * sa.size()));
  return out;
}

ScalarReward ScalarReward::weighted(const RewardSet& rewards, int horizon,
                                    std::span<const double> weights) {
  require(weights.size() == static_cast<std::size_t>(rewards.num_agents()),
          "weight vector length must equal number of agents");
  const std::size_t block = static_cast<std::size_t>(rewards.num_states()) *
                            rewards.num_actions();
  std::vector<double> sa(block, 0.0);
  for (int i = 0; i < rewards.num_agents(); ++i) {
    const double w = weights[static_cast<std::size_t>(i)];
    if (w == 0.0) continue;
    const auto r = rewards.agent(i);
    for (std::size_t k = 0; k < block; ++k) sa[k] += w * r[k];
  }
  return stationary(rewards.num_states(), rewards.num_actions(), horizon, sa);
}

double ScalarReward::dot(const OccupancyMeasure& q) const {
  require(q.data().size() == r_.size(), "occupancy/reward shape mismatch");
  double v = 0.0;
  for (std::size_t k = 0; k < r_.size(); ++k) v += q.data()[k] * r_[k];
  return v;
}

std::vector<double> Trajectory::returns() const {
  std::vector<double> out(static_cast<std::size_t>(num_agents), 0.0);
  for (int h = 0; h < length(); ++h)
    for (int i = 0; i < num_agents; ++i) out[static_cast<std::size_t>(i)] += reward(h, i);
  return out;
}

void check_compatible(const TabularMDP& mdp, const RewardSet& rewards) {
  require(mdp.num_states() == rewards.num_states() &&
              mdp.num_actions() == rewards.num_actions(),
          "reward table shape does not match the MDP");
}

void check_compatible(const TabularMDP& mdp, const NonStationaryPolicy& policy) {
  require(mdp.num_states() == policy.num_states() &&
              mdp.num_actions() == policy.num_actions() &&
              mdp.horizon() == policy.horizon(),
          "policy shape does not match the MDP");
}

double evaluate_scalar(const TabularMDP& mdp, const ScalarReward& reward,
                       const NonStationaryPolicy& policy) {
  check_compatible(mdp, policy);
  require(reward.num_states() == mdp.num_states() &&
              reward.num_actions() == mdp.num_actions() &&
              reward.horizon() == mdp.horizon(),
          "scalar reward shape does not match the MDP");
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  std::vector<double> next(static_cast<std::size_t>(S), 0.0), cur(next.size());
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      double v = 0.0;
      for (int a = 0; a < A; ++a) {
        const double p = policy(h, s, a);
        if (p == 0.0) continue;
        double q = reward(h, s, a);
        if (h + 1 < H) {
          const auto row = mdp.transition(s, a);
          for (int t = 0; t < S; ++t) q += row[static_cast<std::size_t>(t)] * next[static_cast<std::size_t>(t)];
        }
        v += p * q;
      }
      cur[static_cast<std::size_t>(s)] = v;
    }
    std::swap(cur, next);
  }
  double total = 0.0;
  for (int s = 0; s < S; ++s) total += mdp.initial(s) * next[static_cast<std::size_t>(s)];
  return total;
}

std::vector<double> evaluate_values(const TabularMDP& mdp, const RewardSet& rewards,
                                    const NonStationaryPolicy& policy) {
  check_compatible(mdp, rewards);
  check_compatible(mdp, policy);
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  const int n = rewards.num_agents();
  // next[s*n + i] holds agent i's value-to-go from step h+1.
  std::vector<double> next(static_cast<std::size_t>(S) * n, 0.0), cur(next.size());
  std::vector<double> q(static_cast<std::size_t>(n));
  for (int h = H - 1; h >= 0; --h) {
    std::fill(cur.begin(), cur.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const double p = policy(h, s, a);
        if (p == 0.0) continue;
        for (int i = 0; i < n; ++i) q[static_cast<std::size_t>(i)] = rewards(i, s, a);
        if (h + 1 < H) {
          const auto row = mdp.transition(s, a);
          for (int t = 0; t < S; ++t) {
            const double pt = row[static_cast<std::size_t>(t)];
            if (pt == 0.0) continue;
            for (int i = 0; i < n; ++i)
              q[static_cast<std::size_t>(i)] += pt * next[static_cast<std::size_t>(t) * n + i];
          }
        }
        for (int i = 0; i < n; ++i)
          cur[static_cast<std::size_t>(s) * n + i] += p * q[static_cast<std::size_t>(i)];
      }
    }
    std::swap(cur, next);
  }
  std::vector<double> values(static_cast<std::size_t>(n), 0.0);
  for (int s = 0; s < S; ++s)
    for (int i = 0; i < n; ++i)
      values[static_cast<std::size_t>(i)] += mdp.initial(s) * next[static_cast<std::size_t>(s) * n + i];
  return values;
}

OccupancyMeasure policy_to_occupancy(const TabularMDP& mdp,
                                     const NonStationaryPolicy& policy) {
  check_compatible(mdp, policy);
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  OccupancyMeasure q(S, A, H);
  std::vector<double> d(mdp.initial().begin(), mdp.initial().end());
  std::vector<double> next(static_cast<std::size_t>(S));
  for (int h = 0; h < H; ++h) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      const double ds = d[static_cast<std::size_t>(s)];
      for (int a = 0; a < A; ++a) {
        const double mass = ds * policy(h, s, a);
        q(h, s, a) = mass;
        if (mass == 0.0 || h + 1 == H) continue;
        const auto row = mdp.transition(s, a);
        for (int t = 0; t < S; ++t) next[static_cast<std::size_t>(t)] += mass * row[static_cast<std::size_t>(t)];
      }
    }
    std::swap(d, next);
  }
  return q;
}

OccupancyMeasure policy_to_occupancy(std::span<const double> initial,
                                     std::span<const double> step_kernel,
                                     const NonStationaryPolicy& policy) {
  const int S = policy.num_states(), A = policy.num_actions(), H = policy.horizon();
  require(initial.size() == static_cast<std::size_t>(S), "initial distribution size");
  require(step_kernel.size() >= sized(std::max(H - 1, 0), S, A) * S, "step kernel size");
  OccupancyMeasure q(S, A, H);
  std::vector<double> d(initial.begin(), initial.end());
  std::vector<double> next(static_cast<std::size_t>(S));
  for (int h = 0; h < H; ++h) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      const double ds = d[static_cast<std::size_t>(s)];
      for (int a = 0; a < A; ++a) {
        const double mass = ds * policy(h, s, a);
        q(h, s, a) = mass;
        if (mass == 0.0 || h + 1 == H) continue;
        const double* row =
            step_kernel.data() + ((static_cast<std::size_t>(h) * S + s) * A + a) * S;
        for (int t = 0; t < S; ++t) next[static_cast<std::size_t>(t)] += mass * row[t];
      }
    }
    std::swap(d, next);
  }
  return q;
}

NonStationaryPolicy occupancy_to_policy(const OccupancyMeasure& q) {
  const int S = q.num_states(), A = q.num_actions(), H = q.horizon();
  for (double x : q.data())
    require(std::isfinite(x) && x >= 0.0, "occupancy has a negative or non-finite entry");
  std::vector<double> p(q.data().size());
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      double total = 0.0;
      for (int a = 0; a < A; ++a) total += q(h, s, a);
      const std::size_t base = (static_cast<std::size_t>(h) * S + s) * A;
      for (int a = 0; a < A; ++a)
        p[base + a] = total > 0.0 ? q(h, s, a) / total : 1.0 / A;
    }
  }
  return NonStationaryPolicy(S, A, H, std::move(p));
}

OccupancyMeasure mix_occupancies(const OccupancyMeasure& q1, const OccupancyMeasure& q2,
                                 double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0, "mixing weight must lie in [0, 1]");
  require(q1.num_states() == q2.num_states() && q1.num_actions() == q2.num_actions() &&
              q1.horizon() == q2.horizon(),
          "occupancy shapes differ");
  if (alpha == 1.0) return q1;
  if (alpha == 0.0) return q2;
  std::vector<double> out(q1.data().size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = alpha * q1.data()[k] + (1.0 - alpha) * q2.data()[k];
  return OccupancyMeasure(q1.num_states(), q1.num_actions(), q1.horizon(), std::move(out));
}

std::vector<double> mixture_kernel(const OccupancyMeasure& q1, const TabularMDP& P1,
                                   const OccupancyMeasure& q2, const TabularMDP& P2,
                                   double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0, "mixing weight must lie in [0, 1]");
  const int S = q1.num_states(), A = q1.num_actions(), H = q1.horizon();
  require(P1.num_states() == S && P2.num_states() == S && P1.num_actions() == A &&
              P2.num_actions() == A,
          "kernel shapes differ");
  std::vector<double> kernel(sized(std::max(H - 1, 0), S, A) * S, 0.0);
  for (int h = 0; h + 1 < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const double w1 = alpha * q1(h, s, a);
        const double w2 = (1.0 - alpha) * q2(h, s, a);
        const double total = w1 + w2;
        const double c1 = total > 0.0 ? w1 / total : alpha;
        const double c2 = total > 0.0 ? w2 / total : 1.0 - alpha;
        const auto r1 = P1.transition(s, a);
        const auto r2 = P2.transition(s, a);
        double* row = kernel.data() + ((static_cast<std::size_t>(h) * S + s) * A + a) * S;
        for (int t = 0; t < S; ++t)
          row[t] = c1 * r1[static_cast<std::size_t>(t)] + c2 * r2[static_cast<std::size_t>(t)];
      }
    }
  }
  return kernel;
}

double flow_residual(std::span<const double> initial, std::span<const double> step_kernel,
                     const OccupancyMeasure& q) {
  const int S = q.num_states(), A = q.num_actions(), H = q.horizon();
  double worst = 0.0;
  for (double x : q.data()) worst = std::max(worst, -x);
  std::vector<double> inflow(initial.begin(), initial.end());
  std::vector<double> next(static_cast<std::size_t>(S));
  for (int h = 0; h < H; ++h) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      double out = 0.0;
      for (int a = 0; a < A; ++a) {
        const double mass = q(h, s, a);
        out += mass;
        if (h + 1 == H) continue;
        const double* row =
            step_kernel.data() + ((static_cast<std::size_t>(h) * S + s) * A + a) * S;
        for (int t = 0; t < S; ++t) next[static_cast<std::size_t>(t)] += mass * row[t];
      }
      worst = std::max(worst, std::abs(out - inflow[static_cast<std::size_t>(s)]));
    }
    std::swap(inflow, next);
  }
  return worst;
}

double flow_residual(const TabularMDP& mdp, const OccupancyMeasure& q) {
  require(q.num_states() == mdp.num_states() && q.num_actions() == mdp.num_actions() &&
              q.horizon() == mdp.horizon(),
          "occupancy shape does not match the MDP");
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  std::vector<double> kernel;
  kernel.reserve(sized(std::max(H - 1, 0), S, A) * S);
  for (int h = 0; h + 1 < H; ++h)
    kernel.insert(kernel.end(), mdp.transition_data().begin(), mdp.transition_data().end());
  return flow_residual(mdp.initial(), kernel, q);
}

Trajectory simulate_episode(const TabularMDP& mdp, const RewardSet& rewards,
                            const NonStationaryPolicy& policy, Rng& rng) {
  check_compatible(mdp, rewards);
  check_compatible(mdp, policy);
  const int H = mdp.horizon(), n = rewards.num_agents();
  Trajectory traj;
  traj.num_agents = n;
  traj.states.resize(static_cast<std::size_t>(H));
  traj.actions.resize(static_cast<std::size_t>(H));
  traj.rewards.resize(static_cast<std::size_t>(H) * n);
  int s = rng.categorical(mdp.initial());
  for (int h = 0; h < H; ++h) {
    const int a = rng.categorical(policy.distribution(h, s));
    traj.states[static_cast<std::size_t>(h)] = s;
    traj.actions[static_cast<std::size_t>(h)] = a;
    for (int i = 0; i < n; ++i) traj.rewards[static_cast<std::size_t>(h) * n + i] = rewards(i, s, a);
    if (h + 1 < H) s = rng.categorical(mdp.transition(s, a));
  }
  return traj;
}

Trajectory simulate_episode(const TabularMDP& mdp, const RewardSet& rewards,
                            const NonStationaryPolicy& policy, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_episode(mdp, rewards, policy, rng);
}

}  // namespace fairmdp
