#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fairmdp/mdp.hpp"
#include "fairmdp/oracle.hpp"

namespace fairmdp {

/// Counts, empirical kernel and L1 radii of the transition confidence set
///   C_t = { P : ||P(s,a,.) - Phat(s,a,.)||_1 <= eps_t(s,a) for all (s,a) },
///   eps_t(s,a) = sqrt(4 S ln(S A t / delta) / max(1, N_t(s,a))),
/// with t = episodes absorbed + 1 (the index of the episode about to start).
class ConfidenceSet {
 public:
  ConfidenceSet() = default;
  ConfidenceSet(int num_states, int num_actions, double delta);

  /// Fixed set around a given kernel with a constant radius; absorbing
  /// trajectories updates the counts but leaves the kernel and radius alone.
  /// Radius 0 around the true kernel is the known-model learner.
  static ConfidenceSet fixed(const TabularMDP& kernel, double radius);

  int num_states() const noexcept { return S_; }
  int num_actions() const noexcept { return A_; }
  double delta() const noexcept { return delta_; }
  std::int64_t episodes() const noexcept { return episodes_; }
  bool is_fixed() const noexcept { return fixed_; }

  std::int64_t visits(int s, int a) const { return N_[index(s, a)]; }
  std::int64_t transitions(int s, int a, int next) const {
    return Nsas_[index(s, a) * S_ + next];
  }
  std::span<const double> empirical(int s, int a) const {
    return {phat_.data() + index(s, a) * S_, static_cast<std::size_t>(S_)};
  }
  double radius(int s, int a) const;

  /// State-action counts over every step, transition counts over steps
  /// 1..H-1; refreshes the empirical rows that changed.
  void absorb(const Trajectory& traj);

  /// Whether every row of the kernel lies in its ball (slack 1e-12).
  bool contains(const TabularMDP& mdp) const;

 private:
  std::size_t index(int s, int a) const {
    return static_cast<std::size_t>(s) * A_ + a;
  }

  int S_ = 0;
  int A_ = 0;
  double delta_ = 0.1;
  std::int64_t episodes_ = 0;
  bool fixed_ = false;
  double fixed_radius_ = 0.0;
  std::vector<std::int64_t> N_;
  std::vector<std::int64_t> Nsas_;
  std::vector<double> phat_;
};

/// Functional form of ConfidenceSet::absorb.
ConfidenceSet update_counts(ConfidenceSet cs, const Trajectory& traj);

/// Best kernel row within the L1 ball of radius eps around phat for the
/// next-state values w: up to eps/2 mass moves onto the best state, taken
/// from the worst states first. `order` ranks states by w, best first.
double optimistic_row(std::span<const double> phat, double eps, std::span<const double> w,
                      std::span<const int> order, std::span<double> out);

struct OptimisticPlan {
  NonStationaryPolicy policy;  // deterministic
  /// Chosen kernel, step-dependent, laid out as [((h*S+s)*A+a)*S + s'].
  std::vector<double> kernel;
  double value = 0.0;
};

/// Extended backward induction: max over P in the confidence set and over
/// policies of <q, reward>. Ties go to the lowest action index.
OptimisticPlan optimistic_scalarized(const ConfidenceSet& cs,
                                     std::span<const double> initial,
                                     const ScalarReward& reward);

/// Feasible set: union of Q(rho, P) over P in the confidence set, relaxed
/// to step-dependent kernels (which makes it convex).
///
/// Keeps references to the confidence set and rewards.
class OptimisticOracle final : public OccupancyOracle {
 public:
  OptimisticOracle(const ConfidenceSet& cs, std::vector<double> initial, int horizon,
                   const RewardSet& rewards);

  int num_states() const override { return cs_->num_states(); }
  int num_actions() const override { return cs_->num_actions(); }
  int horizon() const override { return H_; }

  Vertex best_response(const ScalarReward& reward) override;
  /// Uniform policy under the empirical kernel.
  Vertex interior_point() override;

 private:
  const ConfidenceSet* cs_;
  std::vector<double> rho_;
  int H_;
};

}  // namespace fairmdp
