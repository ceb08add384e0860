#include "fairmdp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "fairmdp/errors.hpp"
#include "fairmdp/instance_io.hpp"
#include "fairmdp/lagrange.hpp"
#include "fairmdp/planning.hpp"

namespace fairmdp {

namespace {

using nlohmann::json;

double param(const std::map<std::string, double>& params, const std::string& key,
             double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

int int_param(const std::map<std::string, double>& params, const std::string& key,
              int fallback) {
  const double x = param(params, key, fallback);
  if (x != std::floor(x)) throw InvalidInput("parameter '" + key + "' must be an integer");
  return static_cast<int>(x);
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Plan: return "plan";
    case Algorithm::Ucrl: return "ucrl";
    case Algorithm::Lagrange: return "lagrange";
  }
  return "?";
}

Checkpoint checkpoint(std::int64_t t, const std::vector<double>& xs) {
  Checkpoint c;
  c.t = t;
  if (xs.empty()) return c;
  for (double x : xs) c.mean += x;
  c.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - c.mean) * (x - c.mean);
    c.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return c;
}

json checkpoints_json(const std::vector<Checkpoint>& cps) {
  json out = json::array();
  for (const auto& c : cps) out.push_back({{"t", c.t}, {"mean", c.mean}, {"stddev", c.stddev}});
  return out;
}

}  // namespace

Instance generate_instance(const std::string& kind, const std::map<std::string, double>& p) {
  if (kind == "po") return [&] {
      auto x = make_po_counterexample(int_param(p, "H", 4));
      return Instance{x.mdp, x.rewards};
    }();
  if (kind == "iian") return [&] {
      auto x = make_iian_counterexample(int_param(p, "H", 4));
      return Instance{x.mdp, x.r};
    }();
  if (kind == "ggw") return [&] {
      auto x = make_ggw_w2_third_corrected(int_param(p, "H", 4));
      return Instance{x.mdp, x.r};
    }();
  if (kind == "tightness")
    return make_nw_tightness_instance(int_param(p, "n", 2), param(p, "gap", 0.01),
                                      int_param(p, "H", 1));
  if (kind == "lowerbound")
    return make_lower_bound_mdp(int_param(p, "S", 6), int_param(p, "A", 2), int_param(p, "H", 8),
                                param(p, "gap", 0.1), int_param(p, "leaf", 0),
                                int_param(p, "action", 0), int_param(p, "n", 2));
  if (kind == "random") {
    const double seed = param(p, "seed", 0);
    if (seed < 0 || seed != std::floor(seed)) throw InvalidInput("seed must be a nonnegative integer");
    return sample_random_instance(int_param(p, "S", 4), int_param(p, "A", 2), int_param(p, "H", 5),
                                  int_param(p, "n", 2), static_cast<std::uint64_t>(seed),
                                  param(p, "alpha", 1.0));
  }
  throw InvalidInput("unknown instance kind '" + kind + "'");
}

Instance resolve_instance(const InstanceSource& source) {
  if (!source.file.empty()) return load_instance(source.file);
  if (source.kind.empty()) throw InvalidInput("instance needs a file or a kind");
  return generate_instance(source.kind, source.params);
}

ExperimentConfig parse_experiment_config(std::string_view text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("malformed config JSON: ") + e.what());
  }
  try {
    ExperimentConfig c;
    const auto& inst = doc.at("instance");
    if (inst.contains("file")) {
      std::filesystem::path path = inst.at("file").get<std::string>();
      if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
      if (!std::filesystem::exists(path)) throw InvalidInput("instance file '" + path.string() + "' does not exist");
      c.instance.file = path.string();
    } else {
      c.instance.kind = inst.at("kind").get<std::string>();
      for (const auto& [key, value] : inst.items())
        if (key != "kind") c.instance.params[key] = value.get<double>();
    }
    const auto algo = doc.value("algorithm", std::string("ucrl"));
    if (algo == "plan") c.algorithm = Algorithm::Plan;
    else if (algo == "ucrl") c.algorithm = Algorithm::Ucrl;
    else if (algo == "lagrange") c.algorithm = Algorithm::Lagrange;
    else throw InvalidInput("unknown algorithm '" + algo + "'");
    if (doc.contains("measure")) {
      const auto& m = doc.at("measure");
      c.spec.measure = parse_measure(m.at("measure").get<std::string>());
      if (m.contains("weights")) c.spec.weights = m.at("weights").get<std::vector<double>>();
    } else if (c.algorithm == Algorithm::Lagrange) {
      c.spec = WelfareSpec::min();
    }
    if (c.algorithm == Algorithm::Lagrange && c.spec.measure != Measure::Min)
      throw InvalidInput("lagrange learns min welfare only");
    c.T = doc.value("T", c.T);
    if (c.T < 1) throw InvalidInput("T must be at least 1");
    if (doc.contains("seeds")) c.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    if (c.seeds.empty()) throw InvalidInput("seeds must be nonempty");
    c.delta = doc.value("delta", c.delta);
    c.tol = doc.value("tol", c.tol);
    c.B = doc.value("B", c.B);
    c.v_star = doc.value("vstar", c.v_star);
    c.workers = std::max(1, doc.value("workers", c.workers));
    c.output_dir = doc.value("output_dir", c.output_dir);
    if (!base_dir.empty() && std::filesystem::path(c.output_dir).is_relative())
      c.output_dir = (std::filesystem::path(base_dir) / c.output_dir).string();
    return c;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("invalid config: ") + e.what());
  }
}

SlopeFit fit_regret_slope(std::span<const double> t, std::span<const double> regret) {
  if (t.size() != regret.size() || t.empty()) throw InvalidInput("slope fit needs matching nonempty series");
  const double tmax = *std::max_element(t.begin(), t.end());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int m = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < tmax / 2.0 || t[k] <= 0.0) continue;
    const double x = std::log(t[k]);
    const double y = std::log(std::max(regret[k], 1e-9));
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    ++m;
  }
  SlopeFit fit;
  if (m < 2) return fit;
  const double vx = sxx - sx * sx / m, vy = syy - sy * sy / m, cxy = sxy - sx * sy / m;
  if (vx <= 0.0) return fit;
  fit.slope = cxy / vx;
  fit.intercept = (sy - fit.slope * sx) / m;
  fit.r2 = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
  return fit;
}

SlopeFit fit_regret_slope(const RegretLog& log, bool weak) {
  std::vector<double> t, r;
  t.reserve(log.episodes.size());
  r.reserve(log.episodes.size());
  for (const auto& e : log.episodes) {
    t.push_back(static_cast<double>(e.t));
    r.push_back(weak ? e.weak_regret_cum : e.regret_cum);
  }
  return fit_regret_slope(t, r);
}

std::string regret_csv(const RegretLog& log) {
  const bool lagrange = log.algorithm == "lagrange";
  const std::size_t n = log.optimal_values.size();
  std::string out = "t,welfare_opt,welfare_exec,welfare_optimistic,regret_cum";
  for (std::size_t i = 1; i <= n; ++i) out += ",value_agent_" + std::to_string(i);
  if (lagrange) {
    out += ",weak_regret_cum";
    for (std::size_t i = 1; i <= n; ++i) out += ",lambda_" + std::to_string(i);
  }
  out += '\n';
  for (const auto& e : log.episodes) {
    out += std::to_string(e.t);
    for (double x : {e.welfare_opt, e.welfare_exec, e.welfare_optimistic, e.regret_cum}) {
      out += ',';
      out += format_double(x);
    }
    for (double x : e.values) {
      out += ',';
      out += format_double(x);
    }
    if (lagrange) {
      out += ',';
      out += format_double(e.weak_regret_cum);
      for (double x : e.lambda) {
        out += ',';
        out += format_double(x);
      }
    }
    out += '\n';
  }
  return out;
}

std::string summary_json(const ExperimentSummary& s) {
  json out;
  out["algorithm"] = algorithm_name(s.algorithm);
  out["seeds"] = s.seeds;
  out["partial"] = s.partial;
  out["failures"] = s.failures;
  if (s.algorithm == Algorithm::Plan) {
    out["per_agent_values"] = s.per_agent_values;
    out["welfare"] = s.welfare;
  } else {
    out["csv"] = s.csv_paths;
    out["optimal_welfare"] = s.optimal_welfare;
    out["checkpoints"] = checkpoints_json(s.checkpoints);
    if (s.algorithm == Algorithm::Lagrange) out["weak_checkpoints"] = checkpoints_json(s.weak_checkpoints);
    out["slopes"] = s.slopes;
    out["mean_slope"] = s.mean_slope;
  }
  return out.dump(2) + "\n";
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  const auto instance = resolve_instance(config.instance);
  config.spec.validate(instance.rewards.num_agents());
  std::filesystem::create_directories(config.output_dir);

  ExperimentSummary summary;
  summary.algorithm = config.algorithm;
  summary.seeds = config.seeds;
  const auto dir = std::filesystem::path(config.output_dir);

  if (config.algorithm == Algorithm::Plan) {
    PlanOptions options;
    options.tol = config.tol;
    options.seed = config.seeds.front();
    const auto plan = plan_welfare(instance.mdp, instance.rewards, config.spec, options);
    summary.per_agent_values = plan.per_agent_values;
    summary.welfare = plan.welfare;
    if (!plan.converged) summary.failures.push_back("planner did not reach tol");
    summary.partial = !plan.converged;
  } else {
    const std::size_t k = config.seeds.size();
    std::vector<RegretLog> logs(k);
    std::vector<std::string> errors(k);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t j = next++; j < k; j = next++) {
        const auto seed = config.seeds[j];
        try {
          if (config.algorithm == Algorithm::Ucrl) {
            UcrlOptions o;
            o.delta = config.delta;
            o.plan.tol = config.tol;
            o.plan.seed = seed;
            logs[j] = run_ucrl_f(instance.mdp, instance.rewards, config.spec, config.T, o, seed);
          } else {
            LagrangeOptions o;
            o.B = config.B;
            o.v_star = config.v_star;
            o.delta = config.delta;
            logs[j] = run_lagrange_maximin(instance.mdp, instance.rewards, config.T, o, seed);
          }
          const auto path = dir / (algorithm_name(config.algorithm) + "_seed" + std::to_string(seed) + ".csv");
          write_file(path.string(), regret_csv(logs[j]));
        } catch (const std::exception& e) {
          errors[j] = e.what();
        }
      }
    };
    const int threads = std::max(1, std::min<int>(config.workers, static_cast<int>(k)));
    std::vector<std::thread> pool;
    for (int w = 1; w < threads; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    const std::vector<std::int64_t> marks = {std::max<std::int64_t>(1, config.T / 10),
                                             std::max<std::int64_t>(1, config.T / 2), config.T};
    std::vector<std::vector<double>> at(marks.size()), weak_at(marks.size());
    for (std::size_t j = 0; j < k; ++j) {
      if (!errors[j].empty()) {
        summary.failures.push_back("seed " + std::to_string(config.seeds[j]) + ": " + errors[j]);
        continue;
      }
      const auto& log = logs[j];
      summary.csv_paths.push_back(
          (dir / (algorithm_name(config.algorithm) + "_seed" + std::to_string(config.seeds[j]) + ".csv")).string());
      summary.optimal_welfare = log.optimal_welfare;
      for (std::size_t m = 0; m < marks.size(); ++m) {
        const auto& e = log.episodes[static_cast<std::size_t>(marks[m] - 1)];
        at[m].push_back(e.regret_cum);
        weak_at[m].push_back(e.weak_regret_cum);
      }
      summary.slopes.push_back(fit_regret_slope(log, config.algorithm == Algorithm::Lagrange).slope);
    }
    summary.partial = !summary.failures.empty();
    for (std::size_t m = 0; m < marks.size(); ++m) {
      summary.checkpoints.push_back(checkpoint(marks[m], at[m]));
      if (config.algorithm == Algorithm::Lagrange)
        summary.weak_checkpoints.push_back(checkpoint(marks[m], weak_at[m]));
    }
    if (!summary.slopes.empty()) {
      for (double s : summary.slopes) summary.mean_slope += s;
      summary.mean_slope /= static_cast<double>(summary.slopes.size());
    }
  }
  summary.summary_path = (dir / "summary.json").string();
  write_file(summary.summary_path, summary_json(summary));
  return summary;
}

}  // namespace fairmdp
