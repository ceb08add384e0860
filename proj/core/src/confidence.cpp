#include "fairmdp/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairmdp/errors.hpp"

namespace fairmdp {

ConfidenceSet::ConfidenceSet(int num_states, int num_actions, double delta)
    : S_(num_states), A_(num_actions), delta_(delta) {
  if (S_ <= 0 || A_ <= 0) throw InvalidInput("confidence set needs positive S and A");
  if (!(delta_ > 0.0 && delta_ < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
  const std::size_t sa = static_cast<std::size_t>(S_) * A_;
  N_.assign(sa, 0);
  Nsas_.assign(sa * S_, 0);
  phat_.assign(sa * S_, 1.0 / S_);
}

ConfidenceSet ConfidenceSet::fixed(const TabularMDP& kernel, double radius) {
  if (!(radius >= 0.0)) throw InvalidInput("radius must be nonnegative");
  ConfidenceSet cs(kernel.num_states(), kernel.num_actions(), 0.1);
  cs.fixed_ = true;
  cs.fixed_radius_ = radius;
  cs.phat_ = kernel.transition_data();
  return cs;
}

double ConfidenceSet::radius(int s, int a) const {
  if (fixed_) return fixed_radius_;
  const double t = static_cast<double>(episodes_ + 1);
  const double n = std::max<double>(1.0, static_cast<double>(visits(s, a)));
  return std::sqrt(4.0 * S_ * std::log(S_ * A_ * t / delta_) / n);
}

void ConfidenceSet::absorb(const Trajectory& traj) {
  const int H = traj.length();
  for (int h = 0; h < H; ++h) {
    const int s = traj.states[static_cast<std::size_t>(h)];
    const int a = traj.actions[static_cast<std::size_t>(h)];
    if (s < 0 || s >= S_ || a < 0 || a >= A_) throw InvalidInput("trajectory outside the state-action space");
    ++N_[index(s, a)];
  }
  for (int h = 0; h + 1 < H; ++h) {
    const int s = traj.states[static_cast<std::size_t>(h)];
    const int a = traj.actions[static_cast<std::size_t>(h)];
    ++Nsas_[index(s, a) * S_ + traj.states[static_cast<std::size_t>(h + 1)]];
  }
  ++episodes_;
  if (fixed_) return;
  for (int h = 0; h + 1 < H; ++h) {
    const std::size_t row = index(traj.states[static_cast<std::size_t>(h)],
                                  traj.actions[static_cast<std::size_t>(h)]);
    std::int64_t total = 0;
    for (int t = 0; t < S_; ++t) total += Nsas_[row * S_ + t];
    for (int t = 0; t < S_; ++t)
      phat_[row * S_ + t] = static_cast<double>(Nsas_[row * S_ + t]) / static_cast<double>(total);
  }
}

bool ConfidenceSet::contains(const TabularMDP& mdp) const {
  if (mdp.num_states() != S_ || mdp.num_actions() != A_)
    throw InvalidInput("kernel shape does not match the confidence set");
  for (int s = 0; s < S_; ++s) {
    for (int a = 0; a < A_; ++a) {
      const auto p = mdp.transition(s, a);
      const auto q = empirical(s, a);
      double l1 = 0.0;
      for (int t = 0; t < S_; ++t) l1 += std::abs(p[static_cast<std::size_t>(t)] - q[static_cast<std::size_t>(t)]);
      if (l1 > radius(s, a) + 1e-12) return false;
    }
  }
  return true;
}

ConfidenceSet update_counts(ConfidenceSet cs, const Trajectory& traj) {
  cs.absorb(traj);
  return cs;
}

double optimistic_row(std::span<const double> phat, double eps, std::span<const double> w,
                      std::span<const int> order, std::span<double> out) {
  const std::size_t S = phat.size();
  std::copy(phat.begin(), phat.end(), out.begin());
  const auto best = static_cast<std::size_t>(order[0]);
  double excess = std::min(eps / 2.0, 1.0 - phat[best]);
  if (excess > 0.0) {
    out[best] += excess;
    for (std::size_t k = S; k-- > 1 && excess > 0.0;) {
      const auto j = static_cast<std::size_t>(order[k]);
      const double take = std::min(out[j], excess);
      out[j] -= take;
      excess -= take;
    }
  }
  double v = 0.0;
  for (std::size_t t = 0; t < S; ++t) v += out[t] * w[t];
  return v;
}

OptimisticPlan optimistic_scalarized(const ConfidenceSet& cs,
                                     std::span<const double> initial,
                                     const ScalarReward& reward) {
  const int S = cs.num_states(), A = cs.num_actions(), H = reward.horizon();
  if (reward.num_states() != S || reward.num_actions() != A)
    throw InvalidInput("scalar reward shape does not match the confidence set");
  if (initial.size() != static_cast<std::size_t>(S)) throw InvalidInput("initial distribution size");

  OptimisticPlan plan;
  plan.kernel.assign(static_cast<std::size_t>(std::max(H - 1, 0)) * S * A * S, 0.0);
  std::vector<int> actions(static_cast<std::size_t>(H) * S, 0);
  std::vector<double> next(static_cast<std::size_t>(S), 0.0), cur(next.size());
  std::vector<int> order(static_cast<std::size_t>(S));
  for (int h = H - 1; h >= 0; --h) {
    const bool last = h + 1 == H;
    if (!last) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return next[static_cast<std::size_t>(x)] > next[static_cast<std::size_t>(y)];
      });
    }
    for (int s = 0; s < S; ++s) {
      int best_a = 0;
      double best = 0.0;
      for (int a = 0; a < A; ++a) {
        double q = reward(h, s, a);
        if (!last) {
          std::span<double> row(plan.kernel.data() +
                                    ((static_cast<std::size_t>(h) * S + s) * A + a) * S,
                                static_cast<std::size_t>(S));
          q += optimistic_row(cs.empirical(s, a), cs.radius(s, a), next, order, row);
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
  for (int s = 0; s < S; ++s) plan.value += initial[static_cast<std::size_t>(s)] * next[static_cast<std::size_t>(s)];
  plan.policy = NonStationaryPolicy::deterministic(S, A, H, actions);
  return plan;
}

OptimisticOracle::OptimisticOracle(const ConfidenceSet& cs, std::vector<double> initial,
                                   int horizon, const RewardSet& rewards)
    : OccupancyOracle(rewards), cs_(&cs), rho_(std::move(initial)), H_(horizon) {
  if (rewards.num_states() != cs.num_states() || rewards.num_actions() != cs.num_actions())
    throw InvalidInput("reward shape does not match the confidence set");
  if (rho_.size() != static_cast<std::size_t>(cs.num_states()))
    throw InvalidInput("initial distribution size");
  if (horizon <= 0) throw InvalidInput("H must be positive");
}

Vertex OptimisticOracle::best_response(const ScalarReward& reward) {
  ++calls_;
  auto plan = optimistic_scalarized(*cs_, rho_, reward);
  auto q = policy_to_occupancy(rho_, plan.kernel, plan.policy);
  return make_vertex(std::move(q), std::move(plan.policy), &reward);
}

Vertex OptimisticOracle::interior_point() {
  const int S = num_states(), A = num_actions();
  std::vector<double> kernel;
  kernel.reserve(static_cast<std::size_t>(std::max(H_ - 1, 0)) * S * A * S);
  for (int h = 0; h + 1 < H_; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const auto row = cs_->empirical(s, a);
        kernel.insert(kernel.end(), row.begin(), row.end());
      }
  auto pi = NonStationaryPolicy::uniform(S, A, H_);
  auto q = policy_to_occupancy(rho_, kernel, pi);
  return make_vertex(std::move(q), std::move(pi), nullptr);
}

}  // namespace fairmdp
