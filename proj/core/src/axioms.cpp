#include "fairmdp/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fairmdp/errors.hpp"
#include "fairmdp/instances.hpp"
#include "fairmdp/rng.hpp"

namespace fairmdp {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Satisfied: return "satisfied";
    case Verdict::Violated: return "violated";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

std::string format_vector(std::span<const double> v) {
  std::ostringstream os;
  os.precision(6);
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

// +1 / -1 / 0 with a tie band scaled by the magnitudes compared.
int compare(double a, double b) {
  const double tie = 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  if (a - b > tie) return 1;
  if (b - a > tie) return -1;
  return 0;
}

bool dominates(std::span<const double> x, std::span<const double> y) {
  bool strict = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < y[i] - 1e-9) return false;
    if (x[i] > y[i] + 1e-9) strict = true;
  }
  return strict;
}

}  // namespace

AxiomCheck check_pareto(const WelfareSpec& spec, const TabularMDP& mdp,
                        const RewardSet& rewards, const NonStationaryPolicy& pi,
                        const NonStationaryPolicy& pi_tilde) {
  AxiomCheck out;
  out.values_1 = evaluate_values(mdp, rewards, pi);
  out.values_2 = evaluate_values(mdp, rewards, pi_tilde);
  const bool forward = dominates(out.values_1, out.values_2);
  const bool backward = dominates(out.values_2, out.values_1);
  if (!forward && !backward) {
    out.witness = "no Pareto domination between the two value vectors";
    return out;
  }
  const auto& hi = forward ? out.values_1 : out.values_2;
  const auto& lo = forward ? out.values_2 : out.values_1;
  const double w_hi = welfare_of_values(spec, hi);
  const double w_lo = welfare_of_values(spec, lo);
  std::ostringstream os;
  os.precision(10);
  os << format_vector(hi) << " dominates " << format_vector(lo) << ", welfare " << w_hi
     << " vs " << w_lo;
  out.witness = os.str();
  out.verdict = compare(w_hi, w_lo) > 0 ? Verdict::Satisfied : Verdict::Violated;
  return out;
}

AxiomCheck check_iian(const WelfareSpec& spec, const TabularMDP& mdp, const RewardSet& r,
                      const RewardSet& r_tilde, const NonStationaryPolicy& pi_1,
                      const NonStationaryPolicy& pi_2) {
  if (r.num_agents() != r_tilde.num_agents()) throw InvalidInput("reward sets differ in n");
  AxiomCheck out;
  const auto v1 = evaluate_values(mdp, r, pi_1);
  const auto v2 = evaluate_values(mdp, r, pi_2);
  const auto t1 = evaluate_values(mdp, r_tilde, pi_1);
  const auto t2 = evaluate_values(mdp, r_tilde, pi_2);
  out.values_1 = v1;
  out.values_2 = v2;
  for (std::size_t i = 0; i < v1.size(); ++i) {
    // v1/v2 = t1/t2, cross-multiplied so zero values need no special case.
    const double scale = std::max({1.0, std::abs(v1[i] * t2[i]), std::abs(t1[i] * v2[i])});
    if (std::abs(v1[i] * t2[i] - t1[i] * v2[i]) > 1e-9 * scale) {
      out.witness = "value ratios differ for agent " + std::to_string(i);
      return out;
    }
  }
  const double a = welfare_of_values(spec, v1), b = welfare_of_values(spec, v2);
  const double c = welfare_of_values(spec, t1), d = welfare_of_values(spec, t2);
  const int before = compare(a, b), after = compare(c, d);
  std::ostringstream os;
  os.precision(10);
  os << "W(pi1;r) - W(pi2;r) = " << a - b << ", W(pi1;r~) - W(pi2;r~) = " << c - d;
  out.witness = os.str();
  out.verdict = before == after ? Verdict::Satisfied : Verdict::Violated;
  return out;
}

AxiomCheck check_anonymity(const WelfareSpec& spec, const TabularMDP& mdp,
                           const RewardSet& rewards, const NonStationaryPolicy& pi,
                           std::span<const int> sigma) {
  AxiomCheck out;
  out.values_1 = evaluate_values(mdp, rewards, pi);
  out.values_2 = evaluate_values(mdp, rewards.permuted(sigma), pi);
  const double a = welfare_of_values(spec, out.values_1);
  const double b = welfare_of_values(spec, out.values_2);
  std::ostringstream os;
  os.precision(17);
  os << "W = " << a << " before, " << b << " after relabelling";
  out.witness = os.str();
  out.verdict = compare(a, b) == 0 ? Verdict::Satisfied : Verdict::Violated;
  return out;
}

AxiomCheck check_continuity(const WelfareSpec& spec, const TabularMDP& mdp,
                            const RewardSet& rewards, const NonStationaryPolicy& pi_1,
                            const NonStationaryPolicy& pi_2, const NonStationaryPolicy& pi_3) {
  AxiomCheck out;
  const auto q1 = policy_to_occupancy(mdp, pi_1);
  const auto q3 = policy_to_occupancy(mdp, pi_3);
  const auto v1 = q1.values(rewards), v3 = q3.values(rewards);
  const double w1 = welfare_of_values(spec, v1);
  const double w2 = welfare_of_policy(spec, mdp, rewards, pi_2);
  const double w3 = welfare_of_values(spec, v3);
  out.values_1 = v1;
  out.values_2 = v3;
  if (compare(w1, w2) < 0 || compare(w2, w3) < 0) {
    out.witness = "welfare of the three policies is not ordered";
    return out;
  }
  const double tol = 1e-6 * std::max(1.0, std::abs(w1));
  std::vector<double> v(v1.size());
  // Values are linear along the occupancy segment.
  auto g = [&](double alpha) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(0.0, alpha * v1[i] + (1.0 - alpha) * v3[i]);
    return welfare_of_values(spec, v) - w2;
  };
  constexpr int kSteps = 10000;
  double alpha = -1.0;
  double prev_alpha = 0.0, prev_g = g(0.0);
  if (std::abs(prev_g) <= tol) alpha = 0.0;
  for (int k = 1; k <= kSteps && alpha < 0.0; ++k) {
    const double a = static_cast<double>(k) / kSteps;
    const double ga = g(a);
    if (std::abs(ga) <= tol) {
      alpha = a;
    } else if ((prev_g < 0.0) != (ga < 0.0)) {
      double lo = prev_alpha, hi = a, glo = prev_g;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (std::abs(gm) <= tol * 1e-3 || hi - lo < 1e-16) {
          lo = hi = mid;
          break;
        }
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      alpha = 0.5 * (lo + hi);
    }
    prev_alpha = a;
    prev_g = ga;
  }
  if (alpha < 0.0) {
    out.verdict = Verdict::Violated;
    out.witness = "no alpha in [0, 1] reaches W(pi_2)";
    return out;
  }
  // Confirm through the mixed policy itself.
  const auto mixed = occupancy_to_policy(mix_occupancies(q1, q3, alpha));
  out.alpha = alpha;
  out.residual = std::abs(welfare_of_policy(spec, mdp, rewards, mixed) - w2);
  std::ostringstream os;
  os.precision(10);
  os << "alpha = " << alpha << ", residual " << out.residual;
  out.witness = os.str();
  out.verdict = out.residual <= tol ? Verdict::Satisfied : Verdict::Violated;
  return out;
}

BoundCheck check_nw_maxmin_bound(const TabularMDP& mdp, const RewardSet& rewards, double tol) {
  BoundCheck out;
  PlanOptions options;
  options.tol = tol;
  options.max_iters = 100000;
  KnownModelOracle oracle(mdp, rewards);
  out.maxmin = maximize_saddle(oracle, WelfareSpec::min(), options);
  if (!(out.maxmin.welfare > 10.0 * tol)) return out;
  out.nash = maximize_nash(oracle, options);
  const int n = rewards.num_agents();
  bool ok = true;
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double base = out.maxmin.per_agent_values[static_cast<std::size_t>(i)];
    const double ratio = out.nash.per_agent_values[static_cast<std::size_t>(i)] / base;
    out.ratios.push_back(ratio);
    out.min_ratio = std::min(out.min_ratio, ratio);
    if (ratio < 1.0 / n - 10.0 * tol / base) ok = false;
  }
  out.verdict = ok ? Verdict::Satisfied : Verdict::Violated;
  return out;
}

std::vector<double> linear_gini_weights(int n) {
  if (n < 1) throw InvalidInput("n must be positive");
  std::vector<double> w(static_cast<std::size_t>(n));
  const double total = n * (n + 1) / 2.0;
  for (int j = 0; j < n; ++j) w[static_cast<std::size_t>(j)] = (n - j) / total;
  return w;
}

namespace {

WelfareSpec spec_for(Measure m, int n, const BatteryOptions& options) {
  if (m != Measure::Gini) return {m, {}};
  if (n == 2 && options.gini_weights_2.size() == 2) return WelfareSpec::gini(options.gini_weights_2);
  return WelfareSpec::gini(linear_gini_weights(n));
}

NonStationaryPolicy random_policy(int S, int A, int H, Rng& rng) {
  std::vector<double> p(static_cast<std::size_t>(H) * S * A);
  for (std::size_t base = 0; base < p.size(); base += static_cast<std::size_t>(A)) {
    double total = 0.0;
    for (int a = 0; a < A; ++a) total += p[base + a] = rng.gamma(1.0);
    for (int a = 0; a < A; ++a) p[base + a] /= total;
  }
  return NonStationaryPolicy(S, A, H, std::move(p));
}

std::vector<NonStationaryPolicy> deterministic_policies(int S, int A, int H) {
  const int slots = S * H;
  std::vector<NonStationaryPolicy> out;
  std::vector<int> actions(static_cast<std::size_t>(slots), 0);
  while (true) {
    out.push_back(NonStationaryPolicy::deterministic(S, A, H, actions));
    int k = 0;
    while (k < slots && ++actions[static_cast<std::size_t>(k)] == A) actions[static_cast<std::size_t>(k++)] = 0;
    if (k == slots) break;
  }
  return out;
}

void record(AxiomRow& row, char& cell, const AxiomCheck& check, const std::string& label) {
  ++row.checks;
  if (check.verdict != Verdict::Violated) return;
  cell = 'N';
  if (row.violations.size() < 20) row.violations.push_back(label + ": " + check.witness);
}

// Pareto over dominated deterministic-policy pairs (small instances only),
// anonymity under a random relabelling, continuity on three random policies,
// and independence under a random per-agent rescaling r~_i = c_i r_i (values
// scale linearly, so the ratio hypothesis holds on any MDP).
void check_instance(AxiomRow& row, const WelfareSpec& spec, const Instance& inst, Rng& rng,
                    const std::string& label) {
  const auto& mdp = inst.mdp;
  const auto& rewards = inst.rewards;
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  const int n = rewards.num_agents();

  if (std::pow(static_cast<double>(A), S * H) <= 256.0) {
    const auto pis = deterministic_policies(S, A, H);
    std::vector<std::vector<double>> values;
    for (const auto& p : pis) values.push_back(evaluate_values(mdp, rewards, p));
    for (std::size_t a = 0; a < pis.size(); ++a)
      for (std::size_t b = 0; b < pis.size(); ++b)
        if (dominates(values[a], values[b]))
          record(row, row.pareto, check_pareto(spec, mdp, rewards, pis[a], pis[b]), label);
  }

  std::vector<int> sigma(static_cast<std::size_t>(n));
  std::iota(sigma.begin(), sigma.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(sigma[static_cast<std::size_t>(i)], sigma[static_cast<std::size_t>(rng.uniform_int(i + 1))]);
  record(row, row.anonymity, check_anonymity(spec, mdp, rewards, random_policy(S, A, H, rng), sigma),
         label);

  std::vector<NonStationaryPolicy> three;
  for (int j = 0; j < 3; ++j) three.push_back(random_policy(S, A, H, rng));
  std::sort(three.begin(), three.end(), [&](const auto& x, const auto& y) {
    return welfare_of_policy(spec, mdp, rewards, x) > welfare_of_policy(spec, mdp, rewards, y);
  });
  record(row, row.continuity, check_continuity(spec, mdp, rewards, three[0], three[1], three[2]),
         label);

  std::vector<double> scale(static_cast<std::size_t>(n));
  for (double& c : scale) c = rng.uniform(0.2, 3.0);
  const auto r_tilde = rewards.scaled(scale);
  const auto p1 = random_policy(S, A, H, rng), p2 = random_policy(S, A, H, rng);
  record(row, row.iian, check_iian(spec, mdp, rewards, r_tilde, p1, p2), label);
}

}  // namespace

AxiomRow run_axiom_battery(Measure measure, const BatteryOptions& options) {
  AxiomRow row;
  row.measure = to_string(measure);
  const int H = 4;
  Rng rng(options.seed);

  // Textbook instances.
  {
    const auto po = make_po_counterexample(H);
    const auto spec = spec_for(measure, 2, options);
    record(row, row.pareto, check_pareto(spec, po.mdp, po.rewards, po.pi_b, po.pi_a), "po");
    const std::vector<int> swap = {1, 0};
    record(row, row.anonymity, check_anonymity(spec, po.mdp, po.rewards, po.pi_b, swap), "po");
  }
  {
    const std::vector<std::pair<std::string, IianInstance>> family = {
        {"iian", make_iian_counterexample(H)},
        {"ggw-w2-third", make_ggw_w2_third_counterexample(H)},
        {"ggw-w2-third-corrected", make_ggw_w2_third_corrected(H)}};
    const auto spec = spec_for(measure, 2, options);
    for (const auto& [name, inst] : family) {
      record(row, row.iian,
             check_iian(spec, inst.mdp, inst.r, inst.r_tilde, inst.pi_1, inst.pi_2), name);
      const std::vector<int> swap = {1, 0};
      record(row, row.anonymity, check_anonymity(spec, inst.mdp, inst.r, inst.pi_1, swap), name);
      // Continuity along the line between the two policies.
      std::vector<NonStationaryPolicy> pis = {inst.pi_1, inst.pi_2,
                                              single_state_policy({0.6, 0.4}, H)};
      std::sort(pis.begin(), pis.end(), [&](const auto& x, const auto& y) {
        return welfare_of_policy(spec, inst.mdp, inst.r, x) >
               welfare_of_policy(spec, inst.mdp, inst.r, y);
      });
      record(row, row.continuity,
             check_continuity(spec, inst.mdp, inst.r, pis[0], pis[1], pis[2]), name);
    }
  }
  {
    const auto tight = make_nw_tightness_instance(2, 0.01, H);
    const auto spec = spec_for(measure, 2, options);
    const auto pa = single_state_policy({1.0, 0.0}, H), pb = single_state_policy({0.0, 1.0}, H);
    record(row, row.pareto, check_pareto(spec, tight.mdp, tight.rewards, pa, pb), "tightness");
  }

  for (int k = 0; k < options.random_instances; ++k) {
    const int n = 2 + k % 2;
    const auto inst = sample_random_instance(2, 2, 2, n, rng.next_u64());
    check_instance(row, spec_for(measure, n, options), inst, rng, "random#" + std::to_string(k));
    // Independence on a single-state instance as well.
    const auto single = sample_random_instance(1, 2, H, n, rng.next_u64());
    check_instance(row, spec_for(measure, n, options), single, rng,
                   "random-single#" + std::to_string(k));
  }
  for (std::size_t k = 0; k < options.extra_instances.size(); ++k) {
    const auto& inst = options.extra_instances[k];
    check_instance(row, spec_for(measure, inst.rewards.num_agents(), options), inst, rng,
                   k < options.extra_labels.size() ? options.extra_labels[k]
                                                   : "instance#" + std::to_string(k));
  }
  return row;
}

}  // namespace fairmdp
