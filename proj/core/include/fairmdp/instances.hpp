#pragma once

#include <cstdint>
#include <vector>

#include "fairmdp/mdp.hpp"

namespace fairmdp {

struct Instance {
  TabularMDP mdp;
  RewardSet rewards;
};

/// Single state, actions (a, b), two agents: r_1 = (1, 1), r_2 = (1, 2).
/// pi_a / pi_b always play a / b.
struct ParetoInstance {
  TabularMDP mdp;
  RewardSet rewards;
  NonStationaryPolicy pi_a;
  NonStationaryPolicy pi_b;
};

/// Two reward vectors r, r~ and two policies for which every agent's value
/// ratio V^pi1 / V^pi2 is the same under r and r~.
struct IianInstance {
  TabularMDP mdp;
  RewardSet r;
  RewardSet r_tilde;
  NonStationaryPolicy pi_1;
  NonStationaryPolicy pi_2;
};

/// Single-state MDP with A actions and horizon H.
TabularMDP single_state_mdp(int num_actions, int horizon);

/// Stationary policy on a single-state MDP.
NonStationaryPolicy single_state_policy(std::vector<double> probs, int horizon);

ParetoInstance make_po_counterexample(int H);

/// r_1 = r~_1 = (1, 0), r_2 = (1/4, 3/4), r~_2 = (1, 3);
/// pi_1 = (1/2, 1/2), pi_2 = (3/4, 1/4).
IianInstance make_iian_counterexample(int H);

/// Same template with r_2 = (1/2, 2/3), r~_2 = (1, 4/3), as published for
/// w = (2/3, 1/3). Its Gini values do not actually flip at that weight.
IianInstance make_ggw_w2_third_counterexample(int H);

/// r_2 = (0, 1/4), r~_2 = (0, 3/4): flips the Gini comparison at w = (2/3, 1/3).
IianInstance make_ggw_w2_third_corrected(int H);

/// Single state, actions (a, b): r_1(a) = gap^n, r_i(a) = 1 for i > 1, r_i(b) = gap.
Instance make_nw_tightness_instance(int n, double gap, int H = 1);

/// A-ary navigation tree on states 0..S-3 (breadth-first, root 0), good state
/// S-2 (reward 1 for every agent) and bad state S-1. Node k's action a leads
/// to child A*k+1+a; actions whose child slot falls outside the tree lead to
/// the last existing child, and nodes without children are leaves. Leaf
/// actions go to the good state with probability 1/2, or 1/2 + gap on the
/// flagged (leaf, action) pair. The good and bad states persist with
/// probability 1 - 1/(2H) and otherwise return to the root.
///
/// flagged_leaf indexes leaves in increasing state order.
Instance make_lower_bound_mdp(int S, int A, int H, double gap, int flagged_leaf,
                              int flagged_action, int n);

/// Leaves of make_lower_bound_mdp's tree, in increasing state order.
std::vector<int> lower_bound_leaves(int S, int A);

/// Kernel rows and rho ~ Dirichlet(alpha), rewards ~ Uniform[0, 1].
Instance sample_random_instance(int S, int A, int H, int n, std::uint64_t seed,
                                double dirichlet_alpha = 1.0);

}  // namespace fairmdp
