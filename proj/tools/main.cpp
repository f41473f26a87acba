#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tmatch/harness.hpp"
#include "tmatch/theory.hpp"
#include "tmatch/typicality.hpp"

namespace {

using namespace tmatch;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitViolated = 3;

std::vector<double> parse_grid(const std::string& text) {
  double a = 0, b = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
    fail(Errc::config_parse, "grid must be a:b:step, got " + text);
  if (step <= 0 && a != b) fail(Errc::config_parse, "grid step must be positive");
  std::vector<double> values;
  if (a == b) {
    values.push_back(a);
    return values;
  }
  if (a > b) fail(Errc::config_parse, "grid start exceeds end");
  for (double v = a; v <= b + 1e-12; v += step) values.push_back(std::min(v, b));
  return values;
}

struct ScenarioFlags {
  std::string scenario;
  double gamma = -1.0;
  double p = -1.0;
  double p_exponent = -1.0;
  std::string family;
  double puv11 = -1.0;
  double pu1 = -1.0;

  void attach(CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--scenario", scenario, "seeded | equiprobable | randomp | symmetric");
    if (required) opt->required();
    cmd->add_option("--gamma", gamma, "seeded: fraction of seed vertices (gamma*n integral)");
    cmd->add_option("--p", p, "equiprobable: off-truth inclusion probability");
    cmd->add_option("--p-exponent", p_exponent, "equiprobable: use p = n^-a instead of --p");
    cmd->add_option("--family", family, "randomp: beta:a,b | pointmass:p | truncgauss:mu,var");
    cmd->add_option("--puv11", puv11, "symmetric: P(U=1,V=1)");
    cmd->add_option("--pu1", pu1, "symmetric: common marginal P(U=1)=P(V=1)");
  }

  ScenarioParams build(int n) const {
    if (scenario == "seeded") {
      if (gamma < 0) fail(Errc::config_parse, "seeded scenario needs --gamma");
      return SeededParams{gamma};
    }
    if (scenario == "equiprobable") {
      if (p_exponent >= 0) {
        if (n < 2) fail(Errc::config_parse, "--p-exponent needs --n");
        return EquiprobableParams{std::pow(static_cast<double>(n), -p_exponent)};
      }
      if (p < 0) fail(Errc::config_parse, "equiprobable scenario needs --p or --p-exponent");
      return EquiprobableParams{p};
    }
    if (scenario == "randomp") {
      if (family.empty()) fail(Errc::config_parse, "randomp scenario needs --family");
      return RandomPParams{std::shared_ptr<const PFamily>(parse_family(family))};
    }
    if (scenario == "symmetric") {
      if (puv11 < 0 || pu1 < 0) fail(Errc::config_parse, "symmetric scenario needs --puv11 and --pu1");
      return SymmetricParams::from_p11_marginal(puv11, pu1);
    }
    fail(Errc::config_parse, "unknown scenario: " + scenario);
  }
};

std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) fail(Errc::io_error, "cannot open " + path + " for writing");
  return file;
}

int cmd_exponent(const std::string& dist_path, const std::string& grid_text, int n, double epsilon,
                 bool with_corrections, const std::string& out_path) {
  const EdgeDistribution dist = read_distribution_file(dist_path);
  const std::vector<double> grid = parse_grid(grid_text);
  if (with_corrections && n < 2) fail(Errc::config_parse, "--corrections needs --n (sets n' = n(n-1)/2)");
  double eps = epsilon;
  if (with_corrections && eps < 0) eps = default_epsilon(n, dist);

  std::ofstream file;
  std::ostream& out = open_or_stdout(file, out_path);
  out << "alpha,E_alpha";
  for (int x = 0; x < dist.ell(); ++x) out << ",t_prime_" << x;
  out << ",zeta,delta\n";
  char buf[64];
  for (double alpha : grid) {
    const ExponentResult r = exponent(dist, alpha);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", r.alpha, r.value);
    out << buf;
    for (double t : r.t_prime) {
      std::snprintf(buf, sizeof buf, ",%.17g", t);
      out << buf;
    }
    if (with_corrections) {
      const Corrections c = corrections(dist.ell(), dist.ell(), ut_length(n), eps, dist, alpha);
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g", c.zeta, c.delta);
      out << buf << "\n";
    } else {
      out << ",,\n";
    }
  }
  return kExitOk;
}

int cmd_check(const ScenarioFlags& flags, const std::string& dist_path, int n, bool necessary,
              bool sufficient, double alpha_n, int grid_size, bool with_corrections, double epsilon,
              const std::string& csv_path) {
  const EdgeDistribution dist = read_distribution_file(dist_path);
  const ScenarioParams params = flags.build(n);
  std::vector<ConditionReport> reports;
  if (sufficient) {
    SufficientOptions opts;
    opts.alpha_n = alpha_n;
    opts.grid_size = grid_size;
    opts.include_corrections = with_corrections;
    opts.epsilon = epsilon;
    reports.push_back(check_sufficient(params, dist, n, opts));
  }
  if (necessary) reports.push_back(check_necessary(params, dist, n));

  bool all_ok = true;
  for (const auto& rep : reports) {
    all_ok = all_ok && rep.overall;
    std::cout << rep.kind << " condition [" << scenario_name(rep.scenario) << ", n=" << rep.n
              << "]: " << (rep.overall ? "SATISFIED" : "VIOLATED") << "  margin=" << rep.margin;
    if (rep.kind == "sufficient")
      std::cout << "  regularity_ratio=" << rep.regularity_ratio
                << (rep.regularity_ok ? "" : " (regularity fails)");
    std::cout << "\n";
    for (const auto& flag : rep.flags) std::cout << "  note: " << flag << "\n";
    std::cout << condition_report_json(rep) << "\n";
  }
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) fail(Errc::io_error, "cannot open " + csv_path + " for writing");
    bool header = true;
    for (const auto& rep : reports) {
      write_condition_csv(csv, rep, header);
      header = false;
    }
  }
  return all_ok ? kExitOk : kExitViolated;
}

ExperimentConfig build_experiment_config(const std::string& config_path, const ScenarioFlags& flags,
                                         const std::string& dist_path, int n, bool n_given,
                                         double epsilon, double epsilon_c, int trials,
                                         std::uint64_t master_seed, bool seed_given,
                                         std::uint64_t node_budget, std::uint64_t store_cap,
                                         int workers) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = parse_experiment_config_file(config_path);
    if (n_given) cfg.n = n;
  } else {
    if (flags.scenario.empty()) fail(Errc::config_parse, "need --config or --scenario");
    if (dist_path.empty()) fail(Errc::config_parse, "need --dist with inline flags");
    cfg.dist_path = dist_path;
    cfg.dist = read_distribution_file(dist_path);
    cfg.n = n;
    cfg.params = flags.build(n);
  }
  if (epsilon >= 0) cfg.epsilon = epsilon;
  if (epsilon_c > 0) cfg.epsilon_c = epsilon_c;
  if (trials > 0) cfg.trials = trials;
  if (seed_given) cfg.master_seed = master_seed;
  if (node_budget > 0) cfg.node_budget = node_budget;
  if (store_cap > 0) cfg.store_cap = store_cap;
  if (workers > 0) cfg.workers = workers;
  return cfg;
}

int run_harness_command(ExperimentConfig cfg, bool seed_given, const std::string& out_path,
                        const std::string& trials_out) {
  if (!seed_given) std::cout << "master_seed=" << cfg.master_seed << " (default)\n";
  const ExperimentReport report = run_experiment(cfg);
  {
    std::ofstream file;
    std::ostream& out = open_or_stdout(file, out_path);
    write_aggregate_csv(out, report);
  }
  if (!trials_out.empty()) {
    std::ofstream tout(trials_out);
    if (!tout) fail(Errc::io_error, "cannot open " + trials_out + " for writing");
    write_trials_csv(tout, report);
  }
  for (const auto& row : report.rows) {
    std::printf("point %s=%g n=%d trials=%d mean_accuracy=%.4f exact=%.3f failure=%.3f trunc=%.3f\n",
                row.sweep_param.c_str(), row.sweep_value, row.n, row.trials, row.mean_accuracy,
                row.exact_match_rate, row.failure_rate, row.truncation_rate);
  }
  std::cout << summarize_trend(report) << "\n";
  if (!out_path.empty()) std::cout << "wrote " << out_path << "\n";
  if (report.any_unusable) {
    std::cerr << "BudgetExhaustedEverywhere: every trial hit the node budget at some sweep point\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph matching with ambiguity-set side information: exponents, conditions, simulation"};
  app.require_subcommand(1);

  // exponent
  auto* exp_cmd = app.add_subcommand("exponent", "Evaluate the mismatch exponent E_alpha on a grid");
  std::string exp_dist, exp_grid, exp_out;
  int exp_n = 0;
  double exp_eps = -1.0;
  bool exp_corr = false;
  exp_cmd->add_option("--dist", exp_dist, "distribution file")->required();
  exp_cmd->add_option("--alpha-grid", exp_grid, "a:b:step over [0,1]")->required();
  exp_cmd->add_option("--n", exp_n, "vertex count (for corrections)");
  exp_cmd->add_option("--epsilon", exp_eps, "typicality epsilon (default: formula)");
  exp_cmd->add_flag("--corrections", exp_corr, "emit zeta/delta columns");
  exp_cmd->add_option("--out", exp_out, "output CSV path (default stdout)");

  // check
  auto* check_cmd = app.add_subcommand("check", "Evaluate sufficient/necessary matching conditions");
  ScenarioFlags check_flags;
  check_flags.attach(check_cmd, true);
  std::string check_dist, check_csv;
  int check_n = 100;
  bool want_necessary = false, want_sufficient = false, want_both = false;
  double check_alpha_n = -1.0;
  int check_grid = 33;
  bool check_corr = false;
  double check_eps = -1.0;
  check_cmd->add_option("--dist", check_dist, "distribution file")->required();
  check_cmd->add_option("--n", check_n, "vertex count");
  check_cmd->add_flag("--necessary", want_necessary, "evaluate the necessary condition");
  check_cmd->add_flag("--sufficient", want_sufficient, "evaluate the sufficient condition");
  check_cmd->add_flag("--both", want_both, "evaluate both (default)");
  check_cmd->add_option("--alpha-n", check_alpha_n, "grid upper end (default 1 - 1/sqrt(n))");
  check_cmd->add_option("--grid-size", check_grid, "alpha grid size");
  check_cmd->add_flag("--corrections", check_corr, "subtract zeta/delta from the RHS");
  check_cmd->add_option("--epsilon", check_eps, "epsilon for delta (default: clamped formula)");
  check_cmd->add_option("--csv", check_csv, "also write rows to this CSV");

  // simulate / sweep share flags
  auto add_harness_flags = [](CLI::App* cmd, std::string& config_path, ScenarioFlags& flags,
                              std::string& dist, int& n, double& eps, double& eps_c, int& trials,
                              std::uint64_t& seed, std::uint64_t& budget, std::uint64_t& cap,
                              int& workers, std::string& out, std::string& trials_out) {
    cmd->add_option("--config", config_path, "key=value config file");
    flags.attach(cmd, false);
    cmd->add_option("--dist", dist, "distribution file (inline mode)");
    cmd->add_option("--n", n, "vertex count");
    cmd->add_option("--epsilon", eps, "typicality epsilon (default: formula)");
    cmd->add_option("--epsilon-c", eps_c, "constant c in the default-epsilon formula");
    cmd->add_option("--trials", trials, "Monte Carlo trials per point");
    cmd->add_option("--master-seed", seed, "master seed (default 12345, printed)");
    cmd->add_option("--node-budget", budget, "backtracking node cap per trial");
    cmd->add_option("--store-cap", cap, "max stored candidate labelings per trial");
    cmd->add_option("--workers", workers, "worker threads");
    cmd->add_option("--out", out, "aggregate CSV path (default stdout)");
    cmd->add_option("--trials-out", trials_out, "per-trial CSV path");
  };

  auto* sim_cmd = app.add_subcommand("simulate", "Run Monte Carlo matching trials");
  std::string sim_config, sim_dist, sim_out, sim_trials_out;
  ScenarioFlags sim_flags;
  int sim_n = 20, sim_trials = 0, sim_workers = 0;
  double sim_eps = -1.0, sim_eps_c = 0.0;
  std::uint64_t sim_seed = 12345, sim_budget = 0, sim_cap = 0;
  add_harness_flags(sim_cmd, sim_config, sim_flags, sim_dist, sim_n, sim_eps, sim_eps_c, sim_trials,
                    sim_seed, sim_budget, sim_cap, sim_workers, sim_out, sim_trials_out);

  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep a scenario parameter");
  std::string sweep_config, sweep_dist, sweep_out, sweep_trials_out;
  ScenarioFlags sweep_flags;
  int sweep_n = 20, sweep_trials = 0, sweep_workers = 0;
  double sweep_eps = -1.0, sweep_eps_c = 0.0;
  std::uint64_t sweep_seed = 12345, sweep_budget = 0, sweep_cap = 0;
  std::string sweep_param, sweep_grid, sweep_values;
  add_harness_flags(sweep_cmd, sweep_config, sweep_flags, sweep_dist, sweep_n, sweep_eps,
                    sweep_eps_c, sweep_trials, sweep_seed, sweep_budget, sweep_cap, sweep_workers,
                    sweep_out, sweep_trials_out);
  sweep_cmd->add_option("param", sweep_param, "sweep parameter (gamma|p|puv11|n|epsilon)");
  sweep_cmd->add_option("grid", sweep_grid, "a:b:step sweep grid");
  sweep_cmd->add_option("--values", sweep_values, "comma-separated sweep values (alternative to grid)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (exp_cmd->parsed()) return cmd_exponent(exp_dist, exp_grid, exp_n, exp_eps, exp_corr, exp_out);

    if (check_cmd->parsed()) {
      if (want_both || (!want_necessary && !want_sufficient)) {
        want_necessary = want_sufficient = true;
      }
      return cmd_check(check_flags, check_dist, check_n, want_necessary, want_sufficient,
                       check_alpha_n, check_grid, check_corr, check_eps, check_csv);
    }

    if (sim_cmd->parsed()) {
      ExperimentConfig cfg = build_experiment_config(
          sim_config, sim_flags, sim_dist, sim_n, sim_cmd->count("--n") > 0, sim_eps, sim_eps_c,
          sim_trials, sim_seed, sim_cmd->count("--master-seed") > 0, sim_budget, sim_cap,
          sim_workers);
      if (!cfg.sweep_param.empty())
        fail(Errc::config_parse, "config has a sweep axis: use the sweep subcommand");
      return run_harness_command(std::move(cfg), sim_cmd->count("--master-seed") > 0, sim_out,
                                 sim_trials_out);
    }

    if (sweep_cmd->parsed()) {
      std::vector<double> values;
      if (!sweep_grid.empty()) values = parse_grid(sweep_grid);
      if (!sweep_values.empty()) {
        values.clear();
        std::string list = sweep_values;
        for (char& c : list)
          if (c == ',') c = ' ';
        std::istringstream in(list);
        double v;
        while (in >> v) values.push_back(v);
        if (!in.eof()) fail(Errc::config_parse, "bad --values list");
      }
      // The swept parameter overrides the base value per point, so a missing
      // base flag can borrow the first sweep value.
      if (!values.empty()) {
        if (sweep_param == "gamma" && sweep_flags.gamma < 0) sweep_flags.gamma = values.front();
        if (sweep_param == "p" && sweep_flags.p < 0 && sweep_flags.p_exponent < 0)
          sweep_flags.p = values.front();
        if (sweep_param == "puv11" && sweep_flags.puv11 < 0) sweep_flags.puv11 = values.front();
      }
      ExperimentConfig cfg = build_experiment_config(
          sweep_config, sweep_flags, sweep_dist, sweep_n, sweep_cmd->count("--n") > 0, sweep_eps,
          sweep_eps_c, sweep_trials, sweep_seed, sweep_cmd->count("--master-seed") > 0, sweep_budget,
          sweep_cap, sweep_workers);
      if (!sweep_param.empty()) cfg.sweep_param = sweep_param;
      if (!values.empty()) cfg.sweep_values = std::move(values);
      if (cfg.sweep_param.empty() || cfg.sweep_values.empty())
        fail(Errc::config_parse, "sweep needs a parameter and a grid or --values");
      return run_harness_command(std::move(cfg), sweep_cmd->count("--master-seed") > 0, sweep_out,
                                 sweep_trials_out);
    }
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return (e.code() == Errc::config_parse) ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
