#pragma once

#include <cstdint>
#include <vector>

#include "fairmdp/mdp.hpp"
#include "fairmdp/oracle.hpp"
#include "fairmdp/welfare.hpp"

namespace fairmdp {

/// Step rule of the Nash-welfare Frank-Wolfe solver.
enum class NashStep {
  AwayStep,  // away steps plus exact line search on sum_i log V_i
  Classic,   // gamma_k = 2 / (k + 2), no line search
};

/// Saddle-point solver for min and Gini welfare.
enum class SaddleMethod {
  DoubleOracle,  // column generation, restricted games solved exactly
  NoRegret,      // Hedge (min) or follow-the-perturbed-leader (Gini), averaged iterate
};

struct PlanOptions {
  double tol = 1e-6;
  int max_iters = 5000;
  NashStep nash_step = NashStep::AwayStep;
  SaddleMethod saddle = SaddleMethod::DoubleOracle;
  std::uint64_t seed = 0;  // perturbations of the no-regret Gini solver
};

struct PlanResult {
  OccupancyMeasure occupancy;
  NonStationaryPolicy policy;  // occupancy_to_policy(occupancy)
  double welfare = 0.0;
  std::vector<double> per_agent_values;
  int iterations = 0;
  /// Frank-Wolfe gap of sum_i log V_i (Nash), or upper minus lower bound on
  /// the optimal welfare (min, Gini). Zero for utilitarian.
  double residual = 0.0;
  /// Certified upper bound on the optimal welfare over the oracle's set.
  double upper_bound = 0.0;
  bool converged = false;
};

/// Lower clamp on V_i inside the Nash gradient, as a multiple of H.
inline constexpr double kNashFloor = 1e-8;

PlanResult maximize_nash(OccupancyOracle& oracle, const PlanOptions& options);
/// Min welfare, or Gini welfare when spec says so.
PlanResult maximize_saddle(OccupancyOracle& oracle, const WelfareSpec& spec,
                           const PlanOptions& options);
PlanResult maximize_utilitarian(OccupancyOracle& oracle);
PlanResult maximize_welfare(OccupancyOracle& oracle, const WelfareSpec& spec,
                            const PlanOptions& options);

PlanResult plan_nash(const TabularMDP& mdp, const RewardSet& rewards, double tol,
                     int max_iters);
PlanResult plan_minwelfare(const TabularMDP& mdp, const RewardSet& rewards, double tol,
                           int max_iters);
PlanResult plan_gini(const TabularMDP& mdp, const RewardSet& rewards,
                     const WelfareSpec& spec, double tol, int max_iters);
PlanResult plan_utilitarian(const TabularMDP& mdp, const RewardSet& rewards);

/// Dispatches on spec.measure with a known-model oracle.
PlanResult plan_welfare(const TabularMDP& mdp, const RewardSet& rewards,
                        const WelfareSpec& spec, const PlanOptions& options = {});

}  // namespace fairmdp
