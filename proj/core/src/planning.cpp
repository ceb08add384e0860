#include "fairmdp/planning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fairmdp/errors.hpp"
#include "fairmdp/matrix_game.hpp"
#include "fairmdp/rng.hpp"

namespace fairmdp {

namespace {

struct Atom {
  Vertex vertex;
  double weight = 0.0;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Index of an atom with the same occupancy, or -1.
int find_atom(const std::vector<Atom>& atoms, const Vertex& v) {
  for (std::size_t j = 0; j < atoms.size(); ++j)
    if (atoms[j].vertex.occupancy == v.occupancy) return static_cast<int>(j);
  return -1;
}

OccupancyMeasure combine(const std::vector<Atom>& atoms) {
  const auto& first = atoms.front().vertex.occupancy;
  OccupancyMeasure q(first.num_states(), first.num_actions(), first.horizon());
  auto& out = q.data();
  for (const auto& atom : atoms) {
    if (atom.weight == 0.0) continue;
    const auto& src = atom.vertex.occupancy.data();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += atom.weight * src[k];
  }
  return q;
}

std::vector<double> combined_values(const std::vector<Atom>& atoms, int n) {
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  for (const auto& atom : atoms)
    for (int i = 0; i < n; ++i)
      v[static_cast<std::size_t>(i)] += atom.weight * atom.vertex.values[static_cast<std::size_t>(i)];
  return v;
}

PlanResult finish(const std::vector<Atom>& atoms, const WelfareSpec& spec) {
  PlanResult r;
  r.occupancy = combine(atoms);
  r.policy = occupancy_to_policy(r.occupancy);
  r.per_agent_values = combined_values(atoms, static_cast<int>(atoms.front().vertex.values.size()));
  for (double& v : r.per_agent_values) v = std::max(v, 0.0);
  r.welfare = welfare_of_values(spec, r.per_agent_values);
  return r;
}

// argmax over gamma in [0, gamma_max] of sum_i log(V_i + gamma d_i); the
// objective is concave so bisection on its derivative suffices.
double nash_line_search(std::span<const double> V, std::span<const double> d,
                        double gamma_max) {
  auto slope = [&](double g) {
    double s = 0.0;
    for (std::size_t i = 0; i < V.size(); ++i) {
      const double x = V[i] + g * d[i];
      if (x <= 0.0) return d[i] < 0.0 ? -std::numeric_limits<double>::infinity()
                                      : std::numeric_limits<double>::infinity();
      s += d[i] / x;
    }
    return s;
  };
  if (slope(0.0) <= 0.0) return 0.0;
  if (slope(gamma_max) >= 0.0) return gamma_max;
  double lo = 0.0, hi = gamma_max;
  for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, gamma_max); ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Linear minimizer of c . v over the min-welfare simplex or the Gini
// permutohedron.
std::vector<double> separation(const WelfareSpec& spec, std::span<const double> v) {
  if (spec.measure == Measure::Gini) return ggw_supergradient(spec, v);
  std::vector<double> c(v.size(), 0.0);
  c[static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin())] = 1.0;
  return c;
}

PlanResult saddle_double_oracle(OccupancyOracle& oracle, const WelfareSpec& spec,
                                const PlanOptions& options) {
  const int n = oracle.num_agents();
  std::vector<Atom> atoms;
  atoms.push_back({oracle.interior_point(), 1.0});
  std::vector<std::vector<double>> duals;
  if (spec.measure == Measure::Min) {
    for (int i = 0; i < n; ++i) {
      std::vector<double> e(static_cast<std::size_t>(n), 0.0);
      e[static_cast<std::size_t>(i)] = 1.0;
      duals.push_back(std::move(e));
    }
  } else {
    duals.push_back(separation(spec, atoms.front().vertex.values));
  }

  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  int iter = 0;
  bool converged = false;
  std::vector<double> payoff;
  while (iter < options.max_iters) {
    ++iter;
    const int m = static_cast<int>(atoms.size());
    const int k = static_cast<int>(duals.size());
    payoff.assign(static_cast<std::size_t>(m) * k, 0.0);
    for (int j = 0; j < m; ++j)
      for (int c = 0; c < k; ++c)
        payoff[static_cast<std::size_t>(j) * k + c] =
            dot(duals[static_cast<std::size_t>(c)], atoms[static_cast<std::size_t>(j)].vertex.values);
    const auto game = solve_matrix_game(payoff, m, k);
    for (int j = 0; j < m; ++j) atoms[static_cast<std::size_t>(j)].weight = game.row[static_cast<std::size_t>(j)];

    const auto vbar = combined_values(atoms, n);
    lower = welfare_of_values(spec, vbar);
    std::vector<double> cbar(static_cast<std::size_t>(n), 0.0);
    for (int c = 0; c < k; ++c)
      for (int i = 0; i < n; ++i)
        cbar[static_cast<std::size_t>(i)] += game.col[static_cast<std::size_t>(c)] *
                                             duals[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
    auto response = oracle.best_response_weighted(cbar);
    upper = std::min(upper, dot(cbar, response.values));
    if (upper - lower <= options.tol) {
      converged = true;
      break;
    }
    bool grew = false;
    if (find_atom(atoms, response) < 0) {
      atoms.push_back({std::move(response), 0.0});
      grew = true;
    }
    auto c_new = separation(spec, vbar);
    if (std::find(duals.begin(), duals.end(), c_new) == duals.end()) {
      duals.push_back(std::move(c_new));
      grew = true;
    }
    if (!grew) {
      // Restricted game already closed: remaining gap is round-off.
      converged = upper - lower <= std::max(options.tol, 1e-9 * std::max(1.0, std::abs(upper)));
      break;
    }
  }
  std::erase_if(atoms, [](const Atom& a) { return a.weight <= 0.0; });
  auto result = finish(atoms, spec);
  result.iterations = iter;
  result.upper_bound = upper;
  result.residual = std::max(0.0, upper - result.welfare);
  result.converged = converged;
  return result;
}

PlanResult saddle_no_regret(OccupancyOracle& oracle, const WelfareSpec& spec,
                            const PlanOptions& options) {
  const int n = oracle.num_agents();
  const double scale = oracle.horizon() * oracle.rewards().upper_bound();
  Rng rng(options.seed);
  std::vector<double> cumulative(static_cast<std::size_t>(n), 0.0);
  std::vector<double> c(static_cast<std::size_t>(n));
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<Atom> atoms;
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  int iter = 0;
  bool converged = false;
  while (iter < options.max_iters) {
    ++iter;
    const double k = iter;
    if (spec.measure == Measure::Min) {
      // Hedge on losses V_i / (H * bound).
      const double eta = std::sqrt(8.0 * std::log(static_cast<double>(n)) / k);
      const double lmin = *std::min_element(cumulative.begin(), cumulative.end());
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        c[static_cast<std::size_t>(i)] = std::exp(-eta * (cumulative[static_cast<std::size_t>(i)] - lmin));
        total += c[static_cast<std::size_t>(i)];
      }
      for (double& ci : c) ci /= total;
    } else {
      // Follow the perturbed leader on the average loss.
      const double noise = std::sqrt(1.0 / k);
      for (int i = 0; i < n; ++i)
        x[static_cast<std::size_t>(i)] =
            (iter > 1 ? cumulative[static_cast<std::size_t>(i)] / (k - 1.0) : 0.0) + noise * rng.uniform();
      c = ggw_supergradient(spec, x);
    }
    auto response = oracle.best_response_weighted(c);
    upper = std::min(upper, dot(c, response.values));
    for (int i = 0; i < n; ++i)
      cumulative[static_cast<std::size_t>(i)] += response.values[static_cast<std::size_t>(i)] / scale;
    const int j = find_atom(atoms, response);
    if (j >= 0)
      atoms[static_cast<std::size_t>(j)].weight += 1.0;
    else
      atoms.push_back({std::move(response), 1.0});
    std::vector<double> vbar(static_cast<std::size_t>(n), 0.0);
    for (const auto& a : atoms)
      for (int i = 0; i < n; ++i)
        vbar[static_cast<std::size_t>(i)] += a.weight / k * a.vertex.values[static_cast<std::size_t>(i)];
    lower = welfare_of_values(spec, vbar);
    if (upper - lower <= options.tol) {
      converged = true;
      break;
    }
  }
  for (auto& a : atoms) a.weight /= iter;
  auto result = finish(atoms, spec);
  result.iterations = iter;
  result.upper_bound = upper;
  result.residual = std::max(0.0, upper - result.welfare);
  result.converged = converged;
  return result;
}

}  // namespace

PlanResult maximize_nash(OccupancyOracle& oracle, const PlanOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidInput("tol must be positive");
  const int n = oracle.num_agents();
  const double floor = kNashFloor * oracle.horizon();
  const auto spec = WelfareSpec::nash();

  std::vector<Atom> atoms;
  atoms.push_back({oracle.interior_point(), 1.0});
  {
    // Agents starved at the start point get their own best response mixed in.
    std::vector<Vertex> extra;
    for (int i = 0; i < n; ++i) {
      if (atoms.front().vertex.values[static_cast<std::size_t>(i)] > floor) continue;
      std::vector<double> e(static_cast<std::size_t>(n), 0.0);
      e[static_cast<std::size_t>(i)] = 1.0;
      auto v = oracle.best_response_weighted(e);
      if (v.values[static_cast<std::size_t>(i)] <= floor)
        throw DegenerateInstance("agent " + std::to_string(i) +
                                     " has zero value under every feasible policy",
                                 i);
      extra.push_back(std::move(v));
    }
    for (auto& v : extra) atoms.push_back({std::move(v), 0.0});
    for (auto& a : atoms) a.weight = 1.0 / static_cast<double>(atoms.size());
  }

  std::vector<double> g(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n));
  double gap = std::numeric_limits<double>::infinity();
  int iter = 0;
  bool converged = false;
  while (true) {
    const auto V = combined_values(atoms, n);
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = 1.0 / std::max(V[static_cast<std::size_t>(i)], floor);
    auto s = oracle.best_response_weighted(g);
    double gap_fw = 0.0;
    for (int i = 0; i < n; ++i)
      gap_fw += g[static_cast<std::size_t>(i)] * (s.values[static_cast<std::size_t>(i)] - V[static_cast<std::size_t>(i)]);
    gap = std::max(0.0, gap_fw);
    if (gap <= options.tol) {
      converged = true;
      break;
    }
    if (iter >= options.max_iters) break;
    ++iter;

    if (options.nash_step == NashStep::Classic) {
      const double gamma = 2.0 / (iter + 2.0);
      for (auto& a : atoms) a.weight *= 1.0 - gamma;
      const int j = find_atom(atoms, s);
      if (j >= 0)
        atoms[static_cast<std::size_t>(j)].weight += gamma;
      else
        atoms.push_back({std::move(s), gamma});
      continue;
    }

    // Away candidate: active atom that is worst along the gradient.
    int away = -1;
    double away_score = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      if (atoms[j].weight <= 0.0) continue;
      const double score = dot(g, atoms[j].vertex.values);
      if (score < away_score) {
        away_score = score;
        away = static_cast<int>(j);
      }
    }
    const double gap_away = dot(g, V) - away_score;
    if (gap_fw >= gap_away || atoms.size() == 1) {
      for (int i = 0; i < n; ++i)
        d[static_cast<std::size_t>(i)] = s.values[static_cast<std::size_t>(i)] - V[static_cast<std::size_t>(i)];
      const double gamma = nash_line_search(V, d, 1.0);
      if (gamma <= 0.0) {
        // No progress possible along the Frank-Wolfe direction.
        converged = gap <= options.tol;
        break;
      }
      for (auto& a : atoms) a.weight *= 1.0 - gamma;
      const int j = find_atom(atoms, s);
      if (j >= 0)
        atoms[static_cast<std::size_t>(j)].weight += gamma;
      else
        atoms.push_back({std::move(s), gamma});
    } else {
      auto& a = atoms[static_cast<std::size_t>(away)];
      const double wa = a.weight;
      const double gamma_max = wa < 1.0 ? wa / (1.0 - wa) : 0.0;
      for (int i = 0; i < n; ++i)
        d[static_cast<std::size_t>(i)] = V[static_cast<std::size_t>(i)] - a.vertex.values[static_cast<std::size_t>(i)];
      const double gamma = nash_line_search(V, d, gamma_max);
      for (auto& b : atoms) b.weight *= 1.0 + gamma;
      a.weight -= gamma;
      if (gamma >= gamma_max || a.weight <= 1e-15) a.weight = 0.0;
    }
    std::erase_if(atoms, [](const Atom& a) { return a.weight <= 0.0; });
    const double total = std::accumulate(atoms.begin(), atoms.end(), 0.0,
                                         [](double acc, const Atom& a) { return acc + a.weight; });
    for (auto& a : atoms) a.weight /= total;
  }

  auto result = finish(atoms, spec);
  result.iterations = iter;
  result.residual = gap;
  result.upper_bound = result.welfare * std::exp(gap);
  result.converged = converged;
  return result;
}

PlanResult maximize_saddle(OccupancyOracle& oracle, const WelfareSpec& spec,
                           const PlanOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidInput("tol must be positive");
  if (spec.measure != Measure::Min && spec.measure != Measure::Gini)
    throw InvalidInput("saddle solver handles min and gini welfare only");
  spec.validate(oracle.num_agents());
  return options.saddle == SaddleMethod::DoubleOracle
             ? saddle_double_oracle(oracle, spec, options)
             : saddle_no_regret(oracle, spec, options);
}

PlanResult maximize_utilitarian(OccupancyOracle& oracle) {
  std::vector<double> ones(static_cast<std::size_t>(oracle.num_agents()), 1.0);
  std::vector<Atom> atoms;
  atoms.push_back({oracle.best_response_weighted(ones), 1.0});
  auto result = finish(atoms, WelfareSpec::utilitarian());
  result.iterations = 1;
  result.upper_bound = result.welfare;
  result.converged = true;
  return result;
}

PlanResult maximize_welfare(OccupancyOracle& oracle, const WelfareSpec& spec,
                            const PlanOptions& options) {
  spec.validate(oracle.num_agents());
  switch (spec.measure) {
    case Measure::Nash: return maximize_nash(oracle, options);
    case Measure::Min:
    case Measure::Gini: return maximize_saddle(oracle, spec, options);
    case Measure::Utilitarian: return maximize_utilitarian(oracle);
  }
  throw InvalidInput("unknown measure");
}

PlanResult plan_welfare(const TabularMDP& mdp, const RewardSet& rewards,
                        const WelfareSpec& spec, const PlanOptions& options) {
  KnownModelOracle oracle(mdp, rewards);
  return maximize_welfare(oracle, spec, options);
}

PlanResult plan_nash(const TabularMDP& mdp, const RewardSet& rewards, double tol,
                     int max_iters) {
  PlanOptions o;
  o.tol = tol;
  o.max_iters = max_iters;
  return plan_welfare(mdp, rewards, WelfareSpec::nash(), o);
}

PlanResult plan_minwelfare(const TabularMDP& mdp, const RewardSet& rewards, double tol,
                           int max_iters) {
  PlanOptions o;
  o.tol = tol;
  o.max_iters = max_iters;
  return plan_welfare(mdp, rewards, WelfareSpec::min(), o);
}

PlanResult plan_gini(const TabularMDP& mdp, const RewardSet& rewards,
                     const WelfareSpec& spec, double tol, int max_iters) {
  if (spec.measure != Measure::Gini) throw InvalidInput("plan_gini needs a gini spec");
  PlanOptions o;
  o.tol = tol;
  o.max_iters = max_iters;
  return plan_welfare(mdp, rewards, spec, o);
}

PlanResult plan_utilitarian(const TabularMDP& mdp, const RewardSet& rewards) {
  return plan_welfare(mdp, rewards, WelfareSpec::utilitarian());
}

}  // namespace fairmdp
