#include "fairmdp/ucrl.hpp"

#include <cmath>
#include <string>

#include "fairmdp/errors.hpp"
#include "fairmdp/rng.hpp"

namespace fairmdp {

PlanResult optimistic_plan(const ConfidenceSet& cs, std::span<const double> initial,
                           int horizon, const RewardSet& rewards, const WelfareSpec& spec,
                           const PlanOptions& options) {
  if (spec.measure == Measure::Utilitarian)
    throw InvalidInput("optimistic planning supports nash, min and gini welfare");
  OptimisticOracle oracle(cs, std::vector<double>(initial.begin(), initial.end()), horizon,
                          rewards);
  return maximize_welfare(oracle, spec, options);
}

RegretLog run_ucrl_f(const TabularMDP& mdp_true, const RewardSet& rewards,
                     const WelfareSpec& spec, std::int64_t T, const UcrlOptions& options,
                     std::uint64_t seed) {
  if (T < 1) throw InvalidInput("T must be at least 1");
  check_compatible(mdp_true, rewards);
  spec.validate(rewards.num_agents());

  RegretLog log;
  log.algorithm = "ucrl";
  log.spec = spec;
  log.notes.push_back("executed policy is read off the optimistic occupancy measure");
  if (options.known_model) log.notes.push_back("known model: radius 0 around the true kernel");

  PlanOptions comparator = options.plan;
  comparator.tol = options.plan.tol / 10.0;
  comparator.max_iters = std::max(options.plan.max_iters, 20000);
  const auto best = plan_welfare(mdp_true, rewards, spec, comparator);
  log.optimal_welfare = best.welfare;
  log.optimal_values = best.per_agent_values;

  ConfidenceSet cs = options.known_model
                         ? ConfidenceSet::fixed(mdp_true, 0.0)
                         : ConfidenceSet(mdp_true.num_states(), mdp_true.num_actions(),
                                         options.delta);
  Rng rng(seed);
  const std::vector<double> rho(mdp_true.initial().begin(), mdp_true.initial().end());
  log.episodes.reserve(static_cast<std::size_t>(T));
  double regret = 0.0;
  for (std::int64_t t = 1; t <= T; ++t) {
    EpisodeRecord rec;
    rec.t = t;
    rec.covered = cs.contains(mdp_true);
    PlanResult plan;
    try {
      plan = optimistic_plan(cs, rho, mdp_true.horizon(), rewards, spec, options.plan);
    } catch (const DegenerateInstance& e) {
      throw DegenerateInstance(std::string(e.what()) + " (episode " + std::to_string(t) + ")",
                               e.agent());
    }
    rec.welfare_optimistic = plan.welfare;
    rec.values = evaluate_values(mdp_true, rewards, plan.policy);
    rec.welfare_exec = welfare_of_values(spec, rec.values);
    rec.welfare_opt = log.optimal_welfare;
    regret += rec.welfare_opt - rec.welfare_exec;
    rec.regret_cum = regret;
    auto traj = simulate_episode(mdp_true, rewards, plan.policy, rng);
    traj.episode = t;
    cs.absorb(traj);
    log.episodes.push_back(std::move(rec));
  }
  return log;
}

RegretLog run_ucrl_f(const TabularMDP& mdp_true, const RewardSet& rewards,
                     const WelfareSpec& spec, std::int64_t T, double delta, double tol,
                     std::uint64_t seed) {
  UcrlOptions options;
  options.delta = delta;
  options.plan.tol = tol;
  return run_ucrl_f(mdp_true, rewards, spec, T, options, seed);
}

std::pair<double, double> nsw_linearization_gap(std::span<const double> values_p1,
                                                std::span<const double> values_p2, int H) {
  if (values_p1.size() != values_p2.size() || values_p1.empty())
    throw InvalidInput("value vectors must be nonempty and of equal length");
  const auto spec = WelfareSpec::nash();
  const double lhs = welfare_of_values(spec, values_p1) - welfare_of_values(spec, values_p2);
  double l1 = 0.0;
  for (std::size_t i = 0; i < values_p1.size(); ++i) l1 += std::abs(values_p1[i] - values_p2[i]);
  const double rhs = std::pow(static_cast<double>(H), static_cast<double>(values_p1.size()) - 1.0) * l1;
  return {lhs, rhs};
}

double diff_in_value_bound(const TabularMDP& p1, const TabularMDP& p2) {
  if (p1.num_states() != p2.num_states() || p1.num_actions() != p2.num_actions())
    throw InvalidInput("kernel shapes differ");
  double sum = 0.0;
  for (int s = 0; s < p1.num_states(); ++s)
    for (int a = 0; a < p1.num_actions(); ++a) {
      double l1 = 0.0;
      for (int t = 0; t < p1.num_states(); ++t) l1 += std::abs(p1.transition(s, a, t) - p2.transition(s, a, t));
      sum += l1 * l1;
    }
  const double H = std::max(p1.horizon(), p2.horizon());
  return H * H * std::sqrt(sum);
}

}  // namespace fairmdp
