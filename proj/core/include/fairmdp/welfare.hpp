#pragma once

#include <span>
#include <string>
#include <vector>

#include "fairmdp/mdp.hpp"

namespace fairmdp {

enum class Measure { Nash, Min, Gini, Utilitarian };

/// Measure selector plus, for the generalized Gini welfare, its weight vector.
struct WelfareSpec {
  Measure measure = Measure::Nash;
  std::vector<double> weights;  // Gini only: nonnegative, nonincreasing, sums to 1.

  static WelfareSpec nash() { return {Measure::Nash, {}}; }
  static WelfareSpec min() { return {Measure::Min, {}}; }
  static WelfareSpec utilitarian() { return {Measure::Utilitarian, {}}; }
  /// Validates the weights; throws InvalidInput.
  static WelfareSpec gini(std::vector<double> weights);

  /// Throws InvalidInput if the spec cannot score n agents.
  void validate(int num_agents) const;

  friend bool operator==(const WelfareSpec&, const WelfareSpec&) = default;
};

/// "nash", "min", "gini", "util".
std::string to_string(Measure m);
Measure parse_measure(const std::string& name);

double welfare_of_values(const WelfareSpec& spec, std::span<const double> values);

double welfare_of_policy(const WelfareSpec& spec, const TabularMDP& mdp,
                         const RewardSet& rewards, const NonStationaryPolicy& policy);

/// Weight assignment c with c[i_j] = w_j where values[i_1] <= ... <= values[i_n]
/// (stable: equal values keep agent-index order).
std::vector<double> ggw_supergradient(const WelfareSpec& spec,
                                      std::span<const double> values);

}  // namespace fairmdp
