#include "fairmdp/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairmdp/errors.hpp"

namespace fairmdp {

WelfareSpec WelfareSpec::gini(std::vector<double> weights) {
  WelfareSpec spec{Measure::Gini, std::move(weights)};
  spec.validate(static_cast<int>(spec.weights.size()));
  return spec;
}

void WelfareSpec::validate(int num_agents) const {
  if (num_agents <= 0) throw InvalidInput("welfare needs at least one agent");
  if (measure != Measure::Gini) return;
  if (weights.size() != static_cast<std::size_t>(num_agents))
    throw InvalidInput("gini weights have length " + std::to_string(weights.size()) +
                       ", expected " + std::to_string(num_agents));
  double total = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (!std::isfinite(weights[j]) || weights[j] < 0.0)
      throw InvalidInput("gini weights must be nonnegative");
    if (j > 0 && weights[j] > weights[j - 1])
      throw InvalidInput("gini weights must be nonincreasing");
    total += weights[j];
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance)
    throw InvalidInput("gini weights must sum to 1");
}

std::string to_string(Measure m) {
  switch (m) {
    case Measure::Nash: return "nash";
    case Measure::Min: return "min";
    case Measure::Gini: return "gini";
    case Measure::Utilitarian: return "util";
  }
  return "?";
}

Measure parse_measure(const std::string& name) {
  if (name == "nash" || name == "nw") return Measure::Nash;
  if (name == "min" || name == "mw") return Measure::Min;
  if (name == "gini" || name == "ggw") return Measure::Gini;
  if (name == "util" || name == "utilitarian") return Measure::Utilitarian;
  throw InvalidInput("unknown welfare measure '" + name + "'");
}

namespace {

std::vector<int> ascending_order(std::span<const double> values) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
  });
  return order;
}

}  // namespace

double welfare_of_values(const WelfareSpec& spec, std::span<const double> values) {
  spec.validate(static_cast<int>(values.size()));
  switch (spec.measure) {
    case Measure::Nash: {
      bool positive = true;
      for (double v : values) {
        if (v < 0.0) throw InvalidInput("Nash welfare needs nonnegative values");
        if (v == 0.0) positive = false;
      }
      if (!positive) return 0.0;
      double product = 1.0;
      for (double v : values) product *= v;
      if (std::isnormal(product)) return product;
      // Intermediate overflow or underflow; redo in log space.
      double log_sum = 0.0;
      for (double v : values) log_sum += std::log(v);
      return std::exp(log_sum);
    }
    case Measure::Min:
      return *std::min_element(values.begin(), values.end());
    case Measure::Gini: {
      const auto order = ascending_order(values);
      double w = 0.0;
      for (std::size_t j = 0; j < order.size(); ++j)
        w += spec.weights[j] * values[static_cast<std::size_t>(order[j])];
      return w;
    }
    case Measure::Utilitarian:
      return std::accumulate(values.begin(), values.end(), 0.0);
  }
  return 0.0;
}

double welfare_of_policy(const WelfareSpec& spec, const TabularMDP& mdp,
                         const RewardSet& rewards, const NonStationaryPolicy& policy) {
  const auto values = evaluate_values(mdp, rewards, policy);
  return welfare_of_values(spec, values);
}

std::vector<double> ggw_supergradient(const WelfareSpec& spec,
                                      std::span<const double> values) {
  if (spec.measure != Measure::Gini) throw InvalidInput("supergradient needs a gini spec");
  spec.validate(static_cast<int>(values.size()));
  const auto order = ascending_order(values);
  std::vector<double> c(values.size());
  for (std::size_t j = 0; j < order.size(); ++j)
    c[static_cast<std::size_t>(order[j])] = spec.weights[j];
  return c;
}

}  // namespace fairmdp
