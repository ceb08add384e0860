#include "fairmdp/instances.hpp"

#include <cmath>

#include "fairmdp/errors.hpp"
#include "fairmdp/rng.hpp"

namespace fairmdp {

TabularMDP single_state_mdp(int num_actions, int horizon) {
  return TabularMDP(1, num_actions, horizon, {1.0},
                    std::vector<double>(static_cast<std::size_t>(num_actions), 1.0));
}

NonStationaryPolicy single_state_policy(std::vector<double> probs, int horizon) {
  const int A = static_cast<int>(probs.size());
  std::vector<double> p;
  p.reserve(probs.size() * static_cast<std::size_t>(horizon));
  for (int h = 0; h < horizon; ++h) p.insert(p.end(), probs.begin(), probs.end());
  return NonStationaryPolicy(1, A, horizon, std::move(p));
}

ParetoInstance make_po_counterexample(int H) {
  if (H < 1) throw InvalidInput("H must be at least 1");
  return {single_state_mdp(2, H), RewardSet(2, 1, 2, {1.0, 1.0, 1.0, 2.0}, 2.0),
          single_state_policy({1.0, 0.0}, H), single_state_policy({0.0, 1.0}, H)};
}

namespace {

IianInstance iian_template(int H, double r2a, double r2b, double rt2a, double rt2b) {
  if (H < 1) throw InvalidInput("H must be at least 1");
  const double bound_r = std::max(1.0, std::max(r2a, r2b));
  const double bound_rt = std::max(1.0, std::max(rt2a, rt2b));
  return {single_state_mdp(2, H), RewardSet(2, 1, 2, {1.0, 0.0, r2a, r2b}, bound_r),
          RewardSet(2, 1, 2, {1.0, 0.0, rt2a, rt2b}, bound_rt),
          single_state_policy({0.5, 0.5}, H), single_state_policy({0.75, 0.25}, H)};
}

}  // namespace

IianInstance make_iian_counterexample(int H) {
  return iian_template(H, 0.25, 0.75, 1.0, 3.0);
}

IianInstance make_ggw_w2_third_counterexample(int H) {
  return iian_template(H, 0.5, 2.0 / 3.0, 1.0, 4.0 / 3.0);
}

IianInstance make_ggw_w2_third_corrected(int H) {
  return iian_template(H, 0.0, 0.25, 0.0, 0.75);
}

Instance make_nw_tightness_instance(int n, double gap, int H) {
  if (n < 1) throw InvalidInput("n must be at least 1");
  if (!(gap > 0.0 && gap <= 1.0)) throw InvalidInput("gap must lie in (0, 1]");
  std::vector<double> r;
  for (int i = 0; i < n; ++i) {
    r.push_back(i == 0 ? std::pow(gap, n) : 1.0);
    r.push_back(gap);
  }
  return {single_state_mdp(2, H), RewardSet(n, 1, 2, std::move(r))};
}

namespace {

int first_child(int node, int A) { return A * node + 1; }

}  // namespace

std::vector<int> lower_bound_leaves(int S, int A) {
  if (S < 4 || A < 1) throw InvalidInput("lower-bound tree needs S >= 4 and A >= 1");
  const int tree = S - 2;
  std::vector<int> leaves;
  for (int k = 0; k < tree; ++k)
    if (first_child(k, A) >= tree) leaves.push_back(k);
  return leaves;
}

Instance make_lower_bound_mdp(int S, int A, int H, double gap, int flagged_leaf,
                              int flagged_action, int n) {
  if (S < 4) throw InvalidInput("lower-bound instance needs S >= 4");
  if (A < 2) throw InvalidInput("lower-bound instance needs A >= 2");
  if (H < 1 || n < 1) throw InvalidInput("H and n must be positive");
  if (!(gap >= 0.0 && gap < 0.5)) throw InvalidInput("gap must lie in [0, 1/2)");
  const auto leaves = lower_bound_leaves(S, A);
  if (flagged_leaf < 0 || flagged_leaf >= static_cast<int>(leaves.size()))
    throw InvalidInput("flagged leaf out of range: the tree has " +
                       std::to_string(leaves.size()) + " leaves");
  if (flagged_action < 0 || flagged_action >= A) throw InvalidInput("flagged action out of range");

  const int tree = S - 2, good = S - 2, bad = S - 1;
  const double reset = 1.0 / (2.0 * H);
  std::vector<double> P(static_cast<std::size_t>(S) * A * S, 0.0);
  auto row = [&](int s, int a) { return P.data() + (static_cast<std::size_t>(s) * A + a) * S; };
  for (int k = 0; k < tree; ++k) {
    const bool leaf = first_child(k, A) >= tree;
    for (int a = 0; a < A; ++a) {
      double* p = row(k, a);
      if (leaf) {
        const bool flagged = k == leaves[static_cast<std::size_t>(flagged_leaf)] && a == flagged_action;
        p[good] = flagged ? 0.5 + gap : 0.5;
        p[bad] = 1.0 - p[good];
      } else {
        p[std::min(first_child(k, A) + a, tree - 1)] = 1.0;
      }
    }
  }
  for (int s : {good, bad}) {
    for (int a = 0; a < A; ++a) {
      double* p = row(s, a);
      p[s] = 1.0 - reset;
      p[0] += reset;
    }
  }
  std::vector<double> rho(static_cast<std::size_t>(S), 0.0);
  rho[0] = 1.0;
  std::vector<double> r(static_cast<std::size_t>(n) * S * A, 0.0);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < A; ++a) r[(static_cast<std::size_t>(i) * S + good) * A + a] = 1.0;
  return {TabularMDP(S, A, H, std::move(rho), std::move(P)), RewardSet(n, S, A, std::move(r))};
}

Instance sample_random_instance(int S, int A, int H, int n, std::uint64_t seed,
                                double dirichlet_alpha) {
  if (S <= 0 || A <= 0 || H <= 0 || n <= 0) throw InvalidInput("S, A, H, n must be positive");
  if (!(dirichlet_alpha > 0.0)) throw InvalidInput("dirichlet alpha must be positive");
  Rng rng(seed);
  auto dirichlet = [&](std::vector<double>& out, std::size_t offset) {
    double total = 0.0;
    for (int k = 0; k < S; ++k) {
      // Tiny draws can underflow to zero for small alpha; keep rows valid.
      const double g = std::max(rng.gamma(dirichlet_alpha), 1e-300);
      out[offset + static_cast<std::size_t>(k)] = g;
      total += g;
    }
    for (int k = 0; k < S; ++k) out[offset + static_cast<std::size_t>(k)] /= total;
  };
  std::vector<double> rho(static_cast<std::size_t>(S));
  dirichlet(rho, 0);
  std::vector<double> P(static_cast<std::size_t>(S) * A * S);
  for (std::size_t row = 0; row < static_cast<std::size_t>(S) * A; ++row)
    dirichlet(P, row * static_cast<std::size_t>(S));
  std::vector<double> r(static_cast<std::size_t>(n) * S * A);
  for (double& x : r) x = rng.uniform();
  return {TabularMDP(S, A, H, std::move(rho), std::move(P)), RewardSet(n, S, A, std::move(r))};
}

}  // namespace fairmdp
