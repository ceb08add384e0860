#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairmdp/instances.hpp"
#include "fairmdp/ucrl.hpp"
#include "fairmdp/welfare.hpp"

namespace fairmdp {

/// Where an experiment's instance comes from: a file, or a generator kind
/// (po, iian, ggw, tightness, lowerbound, random) with numeric parameters.
struct InstanceSource {
  std::string file;
  std::string kind;
  std::map<std::string, double> params;
};

/// Builds a generated instance. Recognised parameters per kind:
///   po, iian, ggw: H             tightness: n, gap, H
///   lowerbound: S, A, H, gap, leaf, action, n
///   random: S, A, H, n, seed, alpha
/// iian and ggw return the r reward set.
Instance generate_instance(const std::string& kind, const std::map<std::string, double>& params);

Instance resolve_instance(const InstanceSource& source);

enum class Algorithm { Plan, Ucrl, Lagrange };

struct ExperimentConfig {
  InstanceSource instance;
  Algorithm algorithm = Algorithm::Ucrl;
  WelfareSpec spec;
  std::int64_t T = 1000;
  std::vector<std::uint64_t> seeds = {1};
  double delta = 0.1;
  double tol = 1e-4;
  double B = 0.0;        // lagrange; 0 = default
  double v_star = -1.0;  // lagrange; negative = default
  int workers = 1;
  std::string output_dir = ".";
};

/// JSON config, for example
///   {"instance": {"kind": "random", "S": 4, "A": 2, "H": 5, "n": 2, "seed": 7},
///    "algorithm": "ucrl", "measure": {"measure": "nash"}, "T": 2000,
///    "seeds": [1, 2], "delta": 0.1, "tol": 1e-4, "output_dir": "out"}
/// A relative instance "file" is resolved against base_dir.
ExperimentConfig parse_experiment_config(std::string_view text, const std::string& base_dir = "");

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares of log(regret) on log(t) over t >= max(t) / 2, regret
/// clamped below at 1e-9.
SlopeFit fit_regret_slope(std::span<const double> t, std::span<const double> regret);
SlopeFit fit_regret_slope(const RegretLog& log, bool weak = false);

struct Checkpoint {
  std::int64_t t = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct ExperimentSummary {
  Algorithm algorithm = Algorithm::Ucrl;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> csv_paths;
  std::vector<std::string> failures;  // "seed k: message"
  bool partial = false;
  // Plan mode.
  std::vector<double> per_agent_values;
  double welfare = 0.0;
  // Learning modes.
  double optimal_welfare = 0.0;
  std::vector<Checkpoint> checkpoints;       // regret_cum at T/10, T/2, T
  std::vector<Checkpoint> weak_checkpoints;  // lagrange only
  std::vector<double> slopes;                // per successful seed
  double mean_slope = 0.0;
  std::string summary_path;
};

std::string regret_csv(const RegretLog& log);

/// Runs every seed (up to `workers` at a time), writes one CSV per seed and
/// summary.json into output_dir.
ExperimentSummary run_experiment(const ExperimentConfig& config);

std::string summary_json(const ExperimentSummary& summary);

}  // namespace fairmdp
