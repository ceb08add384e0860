#include "fairmdp/lagrange.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "fairmdp/errors.hpp"
#include "fairmdp/planning.hpp"
#include "fairmdp/rng.hpp"

namespace fairmdp {

std::vector<double> lagrangian_reward(std::span<const double> lambda,
                                      const RewardSet& rewards, double v_star, int H) {
  const int n = rewards.num_agents();
  if (lambda.size() != static_cast<std::size_t>(n)) throw InvalidInput("lambda length must equal n");
  if (H <= 0) throw InvalidInput("H must be positive");
  const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
  const std::size_t block = static_cast<std::size_t>(rewards.num_states()) * rewards.num_actions();
  std::vector<double> r(block, v_star / H * (1.0 - total));
  for (int i = 0; i < n; ++i) {
    const double l = lambda[static_cast<std::size_t>(i)];
    if (l == 0.0) continue;
    const auto ri = rewards.agent(i);
    for (std::size_t k = 0; k < block; ++k) r[k] += l * ri[k];
  }
  return r;
}

std::vector<double> project_lambda(std::span<const double> lambda, double B) {
  if (!(B > 0.0)) throw InvalidInput("B must be positive");
  std::vector<double> x(lambda.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::max(0.0, lambda[i]);
    total += x[i];
  }
  if (total <= B) return x;
  // Projection onto the face sum = B of the scaled simplex.
  std::vector<double> sorted(lambda.begin(), lambda.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cum += sorted[j];
    const double candidate = (cum - B) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) theta = candidate;
  }
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::max(0.0, lambda[i] - theta);
  return x;
}

NonStationaryPolicy LagrangeState::policy() const {
  const int S = cs.num_states(), A = cs.num_actions(), H = horizon;
  std::vector<double> p(log_policy.size());
  for (std::size_t base = 0; base < p.size(); base += static_cast<std::size_t>(A)) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < A; ++a) mx = std::max(mx, log_policy[base + a]);
    double z = 0.0;
    for (int a = 0; a < A; ++a) z += p[base + a] = std::exp(log_policy[base + a] - mx);
    for (int a = 0; a < A; ++a) p[base + a] /= z;
  }
  return NonStationaryPolicy(S, A, H, std::move(p));
}

LagrangeState make_lagrange_state(ConfidenceSet cs, std::span<const double> initial,
                                  int horizon, int num_agents, double B, double v_star) {
  if (!(B >= 1.0)) throw InvalidInput("B must be at least 1");
  if (horizon <= 0 || num_agents <= 0) throw InvalidInput("H and n must be positive");
  if (initial.size() != static_cast<std::size_t>(cs.num_states()))
    throw InvalidInput("initial distribution size");
  LagrangeState st;
  st.lambda.assign(static_cast<std::size_t>(num_agents), 0.0);
  st.B = B;
  st.v_star = v_star;
  st.horizon = horizon;
  st.initial.assign(initial.begin(), initial.end());
  st.log_policy.assign(static_cast<std::size_t>(horizon) * cs.num_states() * cs.num_actions(),
                       -std::log(static_cast<double>(cs.num_actions())));
  st.cumulative_values.assign(static_cast<std::size_t>(num_agents), 0.0);
  st.cs = std::move(cs);
  return st;
}

void lambda_player_update(LagrangeState& state, std::span<const double> returns) {
  const std::size_t n = state.lambda.size();
  if (returns.size() != n) throw InvalidInput("returns length must equal n");
  ++state.lambda_updates;
  const double step = state.B / (state.horizon *
                                 std::sqrt(static_cast<double>(n) *
                                           static_cast<double>(state.lambda_updates)));
  std::vector<double> next(n);
  for (std::size_t i = 0; i < n; ++i)
    next[i] = state.lambda[i] - step * (returns[i] - state.v_star);
  state.lambda = project_lambda(next, state.B);
}

void oreps_policy_update(LagrangeState& state, std::span<const double> sa_reward,
                         const Trajectory& traj) {
  const auto& cs = state.cs;
  const int S = cs.num_states(), A = cs.num_actions(), H = state.horizon;
  if (sa_reward.size() != static_cast<std::size_t>(S) * A) throw InvalidInput("reward table size");
  state.cs.absorb(traj);
  ++state.policy_updates;
  const double t = static_cast<double>(state.policy_updates);
  const double eta = state.eta_scale *
                     std::sqrt(8.0 * H * std::log(std::max(2, A)) / t) / (state.B * H);

  // Soft backward induction: the closed-form mirror step for the
  // conditional-entropy Bregman divergence, with optimistic next-state values.
  std::vector<double> next(static_cast<std::size_t>(S), 0.0), cur(next.size());
  std::vector<int> order(static_cast<std::size_t>(S));
  std::vector<double> row(static_cast<std::size_t>(S)), q(static_cast<std::size_t>(A));
  for (int h = H - 1; h >= 0; --h) {
    const bool last = h + 1 == H;
    if (!last) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return next[static_cast<std::size_t>(x)] > next[static_cast<std::size_t>(y)];
      });
    }
    for (int s = 0; s < S; ++s) {
      double* logp = state.log_policy.data() + (static_cast<std::size_t>(h) * S + s) * A;
      double mx = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a) {
        double v = eta * sa_reward[static_cast<std::size_t>(s) * A + a];
        if (!last) v += optimistic_row(cs.empirical(s, a), cs.radius(s, a), next, order, row);
        q[static_cast<std::size_t>(a)] = v;
        mx = std::max(mx, logp[a] + v);
      }
      double z = 0.0;
      for (int a = 0; a < A; ++a) z += std::exp(logp[a] + q[static_cast<std::size_t>(a)] - mx);
      const double w = mx + std::log(z);
      for (int a = 0; a < A; ++a) logp[a] += q[static_cast<std::size_t>(a)] - w;
      cur[static_cast<std::size_t>(s)] = w;
    }
    std::swap(cur, next);
  }
}

RegretLog run_lagrange_maximin(const TabularMDP& mdp_true, const RewardSet& rewards,
                               std::int64_t T, const LagrangeOptions& options,
                               std::uint64_t seed) {
  if (T < 1) throw InvalidInput("T must be at least 1");
  check_compatible(mdp_true, rewards);
  const int H = mdp_true.horizon(), n = rewards.num_agents();
  const double value_bound = H * rewards.upper_bound();
  const double B = options.B > 0.0 ? options.B : value_bound;
  const double v_star = options.v_star >= 0.0 ? options.v_star : value_bound;
  if (options.fixed_policy) check_compatible(mdp_true, *options.fixed_policy);

  RegretLog log;
  log.algorithm = "lagrange";
  log.spec = WelfareSpec::min();
  if (n > 1 && std::log(static_cast<double>(mdp_true.num_actions())) > 0.0 &&
      n > mdp_true.num_states() * mdp_true.num_states() * mdp_true.num_actions() /
              std::log(static_cast<double>(mdp_true.num_actions())))
    log.notes.push_back("n exceeds S^2 A / ln A");
  PlanOptions comparator;
  comparator.tol = options.comparator_tol;
  comparator.max_iters = 20000;
  const auto best = plan_minwelfare(mdp_true, rewards, comparator.tol, comparator.max_iters);
  log.optimal_welfare = best.welfare;
  log.optimal_values = best.per_agent_values;

  ConfidenceSet cs = options.known_model
                         ? ConfidenceSet::fixed(mdp_true, 0.0)
                         : ConfidenceSet(mdp_true.num_states(), mdp_true.num_actions(),
                                         options.delta);
  auto state = make_lagrange_state(std::move(cs), mdp_true.initial(), H, n, B, v_star);
  state.eta_scale = options.eta_scale;

  Rng rng(seed);
  log.episodes.reserve(static_cast<std::size_t>(T));
  double strong = 0.0;
  for (std::int64_t t = 1; t <= T; ++t) {
    EpisodeRecord rec;
    rec.t = t;
    rec.covered = state.cs.contains(mdp_true);
    rec.lambda = state.lambda;
    rec.welfare_optimistic = std::numeric_limits<double>::quiet_NaN();
    const auto reward = lagrangian_reward(state.lambda, rewards, v_star, H);
    const auto pi = options.fixed_policy ? *options.fixed_policy : state.policy();
    rec.values = evaluate_values(mdp_true, rewards, pi);
    rec.welfare_exec = *std::min_element(rec.values.begin(), rec.values.end());
    rec.welfare_opt = log.optimal_welfare;
    strong += rec.welfare_opt - rec.welfare_exec;
    rec.regret_cum = strong;
    for (int i = 0; i < n; ++i)
      state.cumulative_values[static_cast<std::size_t>(i)] += rec.values[static_cast<std::size_t>(i)];
    rec.weak_regret_cum =
        static_cast<double>(t) * log.optimal_welfare -
        *std::min_element(state.cumulative_values.begin(), state.cumulative_values.end());

    auto traj = simulate_episode(mdp_true, rewards, pi, rng);
    traj.episode = t;
    lambda_player_update(state, traj.returns());
    oreps_policy_update(state, reward, traj);
    log.episodes.push_back(std::move(rec));
  }
  return log;
}

RegretLog run_lagrange_maximin(const TabularMDP& mdp_true, const RewardSet& rewards,
                               double v_star, double B, std::int64_t T, std::uint64_t seed) {
  LagrangeOptions options;
  options.v_star = v_star;
  options.B = B;
  return run_lagrange_maximin(mdp_true, rewards, T, options, seed);
}

}  // namespace fairmdp
