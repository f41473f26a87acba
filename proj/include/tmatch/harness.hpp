#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tmatch/matcher.hpp"
#include "tmatch/theory.hpp"

namespace tmatch {

struct ExperimentConfig {
  ScenarioParams params;  // also fixes the scenario
  int n = 20;
  std::string dist_path;  // informational; dist below is authoritative
  EdgeDistribution dist;
  double epsilon = -1.0;   // < 0: use default_epsilon(n, epsilon_c)
  double epsilon_c = 2.0;  // constant in the default-epsilon formula
  int trials = 100;
  std::uint64_t master_seed = 12345;
  std::uint64_t node_budget = 10'000'000;
  std::size_t store_cap = 4096;
  int workers = 1;
  std::string sweep_param;           // "", "gamma", "p", "n", "epsilon", "puv11"
  std::vector<double> sweep_values;  // nonempty iff sweep_param set
};

// Flat key=value text, # comments. Relative dist paths resolve against the
// caller's working directory.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig parse_experiment_config_file(const std::string& path);

struct TrialRecord {
  int trial = 0;
  std::uint64_t candidate_count = 0;
  double accuracy = 0.0;  // meaningless when failure is set
  bool exact_match = false;
  bool failure = false;
  bool truncated = false;
  bool wrong_candidate = false;  // candidate set contains a non-exact labeling
  double wall_seconds = 0.0;
};

struct SweepAggregate {
  std::string sweep_param;   // "none" when no sweep axis
  double sweep_value = 0.0;  // NaN when no sweep axis
  int n = 0;
  int trials = 0;
  double mean_accuracy = 0.0;  // over completed non-failure trials
  double accuracy_ci_lo = 0.0, accuracy_ci_hi = 1.0;
  double exact_match_rate = 0.0;
  double failure_rate = 0.0;
  double truncation_rate = 0.0;
  double mean_candidates = 0.0;
  int sufficient_satisfied = -1;      // 1/0; -1 = not evaluable
  int necessary_satisfied = -1;       // 1/0; -1 = not evaluable
  double union_bound_estimate = 0.0;  // NaN = not evaluable
  double epsilon = 0.0;
  std::uint64_t master_seed = 0;
  bool unusable = false;  // every trial hit the node budget
  std::vector<TrialRecord> records;
};

struct ExperimentReport {
  std::vector<SweepAggregate> rows;
  bool any_unusable = false;
};

struct Interval {
  double lo = 0.0, hi = 1.0;
};

// Wilson score interval for a proportion estimated from m observations.
Interval wilson_interval(double phat, double m, double z = 1.959963984540054);

// Runs trials for each sweep value (or once when no sweep axis). Trial t of
// every point uses RngStream(master_seed, t): common random numbers across
// sweep values, deterministic and independent of worker count.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Concatenation of run_experiment over several configs.
ExperimentReport sweep_report(const std::vector<ExperimentConfig>& configs);

// Sign of the accuracy-vs-sweep-value trend (Spearman rank correlation),
// one line per distinct sweep parameter.
std::string summarize_trend(const ExperimentReport& report);

void write_aggregate_csv(std::ostream& out, const ExperimentReport& report);
void write_trials_csv(std::ostream& out, const ExperimentReport& report);

}  // namespace tmatch
