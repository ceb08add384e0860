#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fairmdp/confidence.hpp"
#include "fairmdp/mdp.hpp"
#include "fairmdp/planning.hpp"
#include "fairmdp/welfare.hpp"

namespace fairmdp {

struct EpisodeRecord {
  std::int64_t t = 0;                 // 1-based episode index
  double welfare_opt = 0.0;           // comparator welfare under the true model
  double welfare_exec = 0.0;          // executed policy's welfare under the true model
  double welfare_optimistic = 0.0;    // planner's welfare under its chosen kernel (NaN if none)
  double regret_cum = 0.0;            // sum over u <= t of welfare_opt - welfare_exec
  std::vector<double> values;         // executed policy's exact per-agent values
  bool covered = true;                // true kernel inside the confidence set at episode start
  // Lagrange-Maximin only.
  double weak_regret_cum = 0.0;
  std::vector<double> lambda;
};

struct RegretLog {
  std::string algorithm;  // "ucrl" or "lagrange"
  WelfareSpec spec;
  double optimal_welfare = 0.0;
  std::vector<double> optimal_values;
  std::vector<EpisodeRecord> episodes;
  std::vector<std::string> notes;

  double final_regret() const { return episodes.empty() ? 0.0 : episodes.back().regret_cum; }
};

struct UcrlOptions {
  double delta = 0.1;
  PlanOptions plan{1e-4, 2000};
  /// Plan on the true kernel with radius 0 instead of learning it.
  bool known_model = false;
};

/// Optimistic fair plan over the confidence set: the fair solvers run on an
/// extended-DP oracle; the policy is read off the optimistic occupancy.
PlanResult optimistic_plan(const ConfidenceSet& cs, std::span<const double> initial,
                           int horizon, const RewardSet& rewards, const WelfareSpec& spec,
                           const PlanOptions& options);

RegretLog run_ucrl_f(const TabularMDP& mdp_true, const RewardSet& rewards,
                     const WelfareSpec& spec, std::int64_t T, const UcrlOptions& options,
                     std::uint64_t seed);

RegretLog run_ucrl_f(const TabularMDP& mdp_true, const RewardSet& rewards,
                     const WelfareSpec& spec, std::int64_t T, double delta, double tol,
                     std::uint64_t seed);

/// Both sides of NW(v1) - NW(v2) <= H^(n-1) sum_i |v1_i - v2_i| for values in [0, H].
std::pair<double, double> nsw_linearization_gap(std::span<const double> values_p1,
                                                std::span<const double> values_p2, int H);

/// H^2 sqrt(sum_{s,a} ||P1(s,a,.) - P2(s,a,.)||_1^2): the bound on how far one
/// policy's value under a [0,1] reward can move between the two kernels.
double diff_in_value_bound(const TabularMDP& p1, const TabularMDP& p2);

}  // namespace fairmdp
