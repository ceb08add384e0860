// fairmdp: fair planning, learning and axiom checks on tabular episodic MDPs.
//
// Exit codes: 0 success, 2 invalid input, 3 solver did not converge.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairmdp/fairmdp.hpp"

namespace {

using namespace fairmdp;

constexpr int kExitInvalid = 2;
constexpr int kExitNonConvergence = 3;

WelfareSpec make_spec(const std::string& measure, const std::vector<double>& weights, int n) {
  WelfareSpec spec{parse_measure(measure), {}};
  if (spec.measure == Measure::Gini)
    spec.weights = weights.empty() ? linear_gini_weights(n) : weights;
  spec.validate(n);
  return spec;
}

void print_values(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    std::printf("  agent %zu: %s\n", i + 1, format_double(v[i]).c_str());
}

struct PlanArgs {
  std::string instance, measure = "nash", emit;
  std::vector<double> weights;
  double tol = 1e-6;
  int max_iters = 5000;
  std::uint64_t seed = 0;
  bool classic = false, no_regret = false;
};

int cmd_plan(const PlanArgs& a) {
  const auto inst = load_instance(a.instance);
  const auto spec = make_spec(a.measure, a.weights, inst.rewards.num_agents());
  PlanOptions o;
  o.tol = a.tol;
  o.max_iters = a.max_iters;
  o.seed = a.seed;
  if (a.classic) o.nash_step = NashStep::Classic;
  if (a.no_regret) o.saddle = SaddleMethod::NoRegret;
  const auto r = plan_welfare(inst.mdp, inst.rewards, spec, o);
  std::printf("measure: %s\n", to_string(spec.measure).c_str());
  std::printf("per-agent values:\n");
  print_values(r.per_agent_values);
  std::printf("welfare: %s\n", format_double(r.welfare).c_str());
  std::printf("upper bound: %s\n", format_double(r.upper_bound).c_str());
  std::printf("iterations: %d\n", r.iterations);
  std::printf("residual: %s\n", format_double(r.residual).c_str());
  std::printf("converged: %s\n", r.converged ? "yes" : "no");
  if (!a.emit.empty()) write_file(a.emit, serialize_occupancy(r.occupancy));
  return r.converged ? 0 : kExitNonConvergence;
}

struct LearnArgs {
  std::string algo = "ucrl", instance, measure = "nash", out;
  std::vector<double> weights;
  std::int64_t episodes = 1000;
  double delta = 0.1, tol = 1e-4, B = 0.0, vstar = -1.0;
  std::uint64_t seed = 1;
  bool measure_given = false;
};

int cmd_learn(const LearnArgs& a) {
  const auto inst = load_instance(a.instance);
  RegretLog log;
  if (a.algo == "ucrl") {
    const auto spec = make_spec(a.measure, a.weights, inst.rewards.num_agents());
    UcrlOptions o;
    o.delta = a.delta;
    o.plan.tol = a.tol;
    o.plan.seed = a.seed;
    log = run_ucrl_f(inst.mdp, inst.rewards, spec, a.episodes, o, a.seed);
  } else {
    if (a.measure_given && parse_measure(a.measure) != Measure::Min)
      throw InvalidInput("lagrange learns min welfare only");
    LagrangeOptions o;
    o.B = a.B;
    o.v_star = a.vstar;
    o.delta = a.delta;
    log = run_lagrange_maximin(inst.mdp, inst.rewards, a.episodes, o, a.seed);
  }
  const auto csv = regret_csv(log);
  if (a.out.empty())
    std::fwrite(csv.data(), 1, csv.size(), stdout);
  else
    write_file(a.out, csv);
  const auto fit = fit_regret_slope(log, a.algo == "lagrange");
  std::fprintf(stderr, "optimal welfare %s, final regret %s, slope %.4f\n",
               format_double(log.optimal_welfare).c_str(),
               format_double(log.final_regret()).c_str(), fit.slope);
  for (const auto& note : log.notes) std::fprintf(stderr, "note: %s\n", note.c_str());
  return 0;
}

struct MakeArgs {
  std::string kind, out;
  std::map<std::string, double> params;
};

int cmd_make(const MakeArgs& a) {
  const auto inst = generate_instance(a.kind, a.params);
  const auto text = serialize_instance(inst);
  if (a.out.empty())
    std::fwrite(text.data(), 1, text.size(), stdout);
  else
    write_file(a.out, text);
  return 0;
}

struct AxiomArgs {
  std::string measure = "all", dir;
  std::vector<double> weights;
  int random = 100;
  std::uint64_t seed = 1;
  bool verbose = false;
};

int cmd_axioms(const AxiomArgs& a) {
  BatteryOptions o;
  o.random_instances = a.random;
  o.seed = a.seed;
  if (!a.weights.empty()) o.gini_weights_2 = a.weights;
  if (!a.dir.empty()) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(a.dir))
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      o.extra_instances.push_back(load_instance(f.string()));
      o.extra_labels.push_back(f.filename().string());
    }
  }
  std::vector<Measure> measures;
  if (a.measure == "all")
    measures = {Measure::Nash, Measure::Min, Measure::Gini};
  else
    measures = {parse_measure(a.measure)};
  std::printf("%-8s %4s %5s %5s %4s\n", "measure", "PO", "ANON", "IIAN", "CON");
  std::vector<AxiomRow> rows;
  for (auto m : measures) {
    rows.push_back(run_axiom_battery(m, o));
    const auto& r = rows.back();
    std::printf("%-8s %4c %5c %5c %4c\n", r.measure.c_str(), r.pareto, r.anonymity, r.iian,
                r.continuity);
  }
  for (const auto& r : rows) {
    if (r.violations.empty()) continue;
    std::printf("\n%s: %d checks, witnesses:\n", r.measure.c_str(), r.checks);
    const std::size_t shown = a.verbose ? r.violations.size() : std::min<std::size_t>(3, r.violations.size());
    for (std::size_t k = 0; k < shown; ++k) std::printf("  %s\n", r.violations[k].c_str());
  }
  return 0;
}

struct RunArgs {
  std::string config;
  int workers = 0;
};

int cmd_run(const RunArgs& a) {
  const auto base = std::filesystem::path(a.config).parent_path().string();
  auto config = parse_experiment_config(read_file(a.config), base);
  if (a.workers > 0) config.workers = a.workers;
  const auto summary = run_experiment(config);
  std::printf("%s", summary_json(summary).c_str());
  if (!summary.failures.empty()) {
    for (const auto& f : summary.failures) std::fprintf(stderr, "failed: %s\n", f.c_str());
    return config.algorithm == Algorithm::Plan ? kExitNonConvergence : kExitInvalid;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair multi-agent planning and learning on tabular episodic MDPs"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto* p = app.add_subcommand("plan", "Fair-optimal policy of a known instance");
  p->add_option("--instance", plan.instance, "Instance JSON file")->required()->check(CLI::ExistingFile);
  p->add_option("--measure", plan.measure, "nash | min | gini | util");
  p->add_option("--weights", plan.weights, "Gini weights (nonincreasing, sum 1)")->delimiter(',');
  p->add_option("--tol", plan.tol, "Solver tolerance");
  p->add_option("--max-iters", plan.max_iters, "Iteration cap");
  p->add_option("--seed", plan.seed, "Seed of the perturbed-leader solver");
  p->add_flag("--classic-fw", plan.classic, "Nash: plain 2/(k+2) Frank-Wolfe steps");
  p->add_flag("--no-regret", plan.no_regret, "Min/Gini: Hedge or perturbed-leader saddle solver");
  p->add_option("--emit-occupancy", plan.emit, "Write the optimal occupancy measure as JSON");

  LearnArgs learn;
  auto* l = app.add_subcommand("learn", "Run a learner against a simulated instance");
  l->add_option("--algo", learn.algo, "ucrl | lagrange")->check(CLI::IsMember({"ucrl", "lagrange"}));
  l->add_option("--instance", learn.instance, "Instance JSON file")->required()->check(CLI::ExistingFile);
  l->add_option("--measure", learn.measure, "nash | min | gini (ucrl)");
  l->add_option("--weights", learn.weights, "Gini weights")->delimiter(',');
  l->add_option("--episodes", learn.episodes, "Number of episodes T")->check(CLI::PositiveNumber);
  l->add_option("--delta", learn.delta, "Confidence parameter");
  l->add_option("--tol", learn.tol, "Per-episode planner tolerance (ucrl)");
  l->add_option("--B", learn.B, "Bound on sum of multipliers (lagrange; default H * reward bound)");
  l->add_option("--vstar", learn.vstar, "Target value (lagrange; default H * reward bound)");
  l->add_option("--seed", learn.seed, "Simulation seed");
  l->add_option("--out", learn.out, "CSV output (stdout if omitted)");

  MakeArgs make;
  auto* m = app.add_subcommand("make", "Write a named or random instance");
  m->add_option("--kind", make.kind, "po | iian | ggw | tightness | lowerbound | random")
      ->required()
      ->check(CLI::IsMember({"po", "iian", "ggw", "tightness", "lowerbound", "random"}));
  for (const char* key : {"S", "A", "H", "n", "gap", "leaf", "action", "seed", "alpha"}) {
    m->add_option_function<double>(std::string("--") + key,
                                   [&make, key](double v) { make.params[key] = v; },
                                   std::string("Generator parameter ") + key);
  }
  m->add_option("--out", make.out, "Output file (stdout if omitted)");

  AxiomArgs ax;
  auto* x = app.add_subcommand("axioms", "Axiom table over textbook and random instances");
  x->add_option("--measure", ax.measure, "nash | min | gini | util | all");
  x->add_option("--weights", ax.weights, "Gini weights for two-agent instances")->delimiter(',');
  x->add_option("--instances", ax.dir, "Directory of extra instance files")->check(CLI::ExistingDirectory);
  x->add_option("--random", ax.random, "Number of random instances")->check(CLI::NonNegativeNumber);
  x->add_option("--seed", ax.seed, "Seed for random instances and policies");
  x->add_flag("--verbose", ax.verbose, "Print every witness");

  RunArgs run;
  auto* r = app.add_subcommand("run", "Run an experiment described by a JSON config");
  r->add_option("--config", run.config, "Config file")->required()->check(CLI::ExistingFile);
  r->add_option("--workers", run.workers, "Parallel seeds (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*p) return cmd_plan(plan);
    if (*l) {
      learn.measure_given = l->get_option("--measure")->count() > 0;
      return cmd_learn(learn);
    }
    if (*m) return cmd_make(make);
    if (*x) return cmd_axioms(ax);
    if (*r) return cmd_run(run);
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const DegenerateInstance& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const NonConvergence& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
