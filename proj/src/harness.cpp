#include "tmatch/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "tmatch/graphgen.hpp"
#include "tmatch/typicality.hpp"

namespace tmatch {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(Errc::config_parse, "bad numeric value for " + key + ": " + v);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const std::uint64_t x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(Errc::config_parse, "bad integer value for " + key + ": " + v);
  }
}

AmbiguityMatrix generate_ambiguity(const ScenarioParams& params, int n, const Labeling& truth,
                                   RngStream& rng) {
  switch (scenario_of(params)) {
    case Scenario::seeded:
      return gen_seeded(n, truth, std::get<SeededParams>(params), rng);
    case Scenario::equiprobable:
      return gen_equiprobable(n, truth, std::get<EquiprobableParams>(params), rng);
    case Scenario::randomp:
      return gen_random_p(n, truth, std::get<RandomPParams>(params), rng);
    case Scenario::symmetric:
      return gen_symmetric(n, truth, std::get<SymmetricParams>(params), rng);
  }
  fail(Errc::internal_error, "unknown scenario");
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& base, double value) {
  ExperimentConfig cfg = base;
  const std::string& param = base.sweep_param;
  if (param == "gamma") {
    if (scenario_of(cfg.params) != Scenario::seeded)
      fail(Errc::config_parse, "sweep gamma requires the seeded scenario");
    cfg.params = SeededParams{value};
  } else if (param == "p") {
    if (scenario_of(cfg.params) != Scenario::equiprobable)
      fail(Errc::config_parse, "sweep p requires the equiprobable scenario");
    cfg.params = EquiprobableParams{value};
  } else if (param == "puv11") {
    if (scenario_of(cfg.params) != Scenario::symmetric)
      fail(Errc::config_parse, "sweep puv11 requires the symmetric scenario");
    const auto& sym = std::get<SymmetricParams>(base.params);
    cfg.params = SymmetricParams::from_p11_marginal(value, sym.pu1());
  } else if (param == "n") {
    const int n = static_cast<int>(std::llround(value));
    if (std::fabs(value - n) > 1e-9 || n < 2) fail(Errc::config_parse, "sweep n needs integers >= 2");
    cfg.n = n;
  } else if (param == "epsilon") {
    cfg.epsilon = value;
  } else {
    fail(Errc::config_parse, "unknown sweep parameter: " + param);
  }
  return cfg;
}

TrialRecord run_trial(const ExperimentConfig& cfg, double eps, int trial) {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(trial));
  const GraphPair pair = sample_pair(cfg.n, cfg.dist, std::nullopt, rng);
  const AmbiguityMatrix B = generate_ambiguity(cfg.params, cfg.n, pair.truth, rng);
  SearchBudget budget{cfg.node_budget, std::max<std::size_t>(cfg.store_cap, 1)};
  const MatchResult m = tm_match(pair, B, TypicalityParams{eps}, rng, budget);

  TrialRecord rec;
  rec.trial = trial;
  rec.candidate_count = m.candidate_count;
  rec.truncated = m.truncated;
  rec.failure = !m.truncated && m.candidate_count == 0;
  if (m.chosen) {
    rec.accuracy = m.accuracy;
    rec.exact_match = !m.truncated && m.accuracy == 1.0;
  }
  if (m.candidate_count >= 2) {
    rec.wrong_candidate = true;
  } else if (m.candidate_count == 1 && !m.candidates.labelings.empty()) {
    rec.wrong_candidate = !(m.candidates.labelings.front() == pair.truth);
  }
  if (rec.failure) {
    // The truth is consistent with every well-formed B, so an empty
    // candidate set is only possible when the truth itself is atypical.
    const UTVector u1 = ut_of(pair.adj1);
    const UTVector u2 = ut_of(relabel(pair.adj2, pair.truth));
    if (is_jointly_typical(u1, u2, cfg.dist, TypicalityParams{eps}))
      fail(Errc::internal_error, "matcher reported failure but the truth is typical");
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

SweepAggregate run_point(const ExperimentConfig& cfg, const std::string& sweep_param,
                         double sweep_value) {
  if (cfg.trials < 1) fail(Errc::config_parse, "trials must be >= 1");
  if (cfg.n < 2) fail(Errc::config_parse, "n must be >= 2");
  const double eps = cfg.epsilon >= 0.0 ? cfg.epsilon : default_epsilon(cfg.n, cfg.epsilon_c);

  std::vector<TrialRecord> records(cfg.trials);
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const int workers = std::max(1, std::min(cfg.workers, cfg.trials));
  auto work = [&] {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= cfg.trials) return;
      try {
        records[t] = run_trial(cfg, eps, t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  SweepAggregate agg;
  agg.sweep_param = sweep_param.empty() ? "none" : sweep_param;
  agg.sweep_value = sweep_param.empty() ? kNaN : sweep_value;
  agg.n = cfg.n;
  agg.trials = cfg.trials;
  agg.epsilon = eps;
  agg.master_seed = cfg.master_seed;

  int truncated = 0, failures = 0, exact = 0;
  double acc_sum = 0.0;
  int acc_count = 0;
  double cand_sum = 0.0;
  for (const TrialRecord& r : records) {
    if (r.truncated) {
      ++truncated;
      continue;
    }
    cand_sum += static_cast<double>(r.candidate_count);
    if (r.failure) {
      ++failures;
      continue;
    }
    acc_sum += r.accuracy;
    ++acc_count;
    if (r.exact_match) ++exact;
  }
  const int completed = cfg.trials - truncated;
  agg.truncation_rate = static_cast<double>(truncated) / cfg.trials;
  agg.unusable = completed == 0;
  if (completed > 0) {
    agg.failure_rate = static_cast<double>(failures) / completed;
    agg.exact_match_rate = static_cast<double>(exact) / completed;
    agg.mean_candidates = cand_sum / completed;
  } else {
    agg.failure_rate = agg.exact_match_rate = agg.mean_candidates = kNaN;
  }
  if (acc_count > 0) {
    agg.mean_accuracy = acc_sum / acc_count;
    const Interval ci = wilson_interval(agg.mean_accuracy, acc_count);
    agg.accuracy_ci_lo = ci.lo;
    agg.accuracy_ci_hi = ci.hi;
  } else {
    agg.mean_accuracy = agg.accuracy_ci_lo = agg.accuracy_ci_hi = kNaN;
  }

  try {
    SufficientOptions opts;
    if (scenario_of(cfg.params) == Scenario::seeded) {
      const double gamma = std::get<SeededParams>(cfg.params).gamma;
      const double dflt = 1.0 - 1.0 / std::sqrt(static_cast<double>(cfg.n));
      opts.alpha_n = std::max(dflt, gamma);
    }
    agg.sufficient_satisfied = check_sufficient(cfg.params, cfg.dist, cfg.n, opts).overall ? 1 : 0;
  } catch (const DomainError&) {
    agg.sufficient_satisfied = -1;
  }
  try {
    agg.necessary_satisfied = check_necessary(cfg.params, cfg.dist, cfg.n).overall ? 1 : 0;
  } catch (const DomainError&) {
    agg.necessary_satisfied = -1;
  }
  try {
    UnionBoundOptions ub;
    ub.alpha_n = (cfg.n - 2.0) / cfg.n;  // wrong labelings agree on <= n-2 vertices
    ub.include_corrections = false;
    agg.union_bound_estimate = union_bound_failure_estimate(cfg.params, cfg.dist, cfg.n, eps, ub);
  } catch (const DomainError&) {
    agg.union_bound_estimate = kNaN;
  }

  agg.records = std::move(records);
  return agg;
}

void format_cell(std::ostream& out, double v) {
  if (std::isnan(v)) return;  // empty cell
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

Interval wilson_interval(double phat, double m, double z) {
  if (!(m > 0.0)) return {0.0, 1.0};
  phat = std::clamp(phat, 0.0, 1.0);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / m;
  const double center = (phat + z2 / (2.0 * m)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / m + z2 / (4.0 * m * m)) / denom;
  // At the boundaries center == half analytically; snap over the sqrt rounding.
  const double lo = phat == 0.0 ? 0.0 : std::max(0.0, center - half);
  const double hi = phat == 1.0 ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(Errc::config_parse, "line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      fail(Errc::config_parse, "line " + std::to_string(lineno) + ": empty key or value");
    if (kv.count(key)) fail(Errc::config_parse, "duplicate key: " + key);
    kv[key] = value;
  }

  auto take = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) return std::string();
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  ExperimentConfig cfg;
  const std::string scenario = take("scenario");
  if (scenario.empty()) fail(Errc::config_parse, "missing key: scenario");
  const std::string dist_path = take("dist");
  if (dist_path.empty()) fail(Errc::config_parse, "missing key: dist");
  cfg.dist_path = dist_path;
  cfg.dist = read_distribution_file(dist_path);

  if (scenario == "seeded") {
    SeededParams p;
    const std::string g = take("gamma");
    if (!g.empty()) p.gamma = parse_double("gamma", g);
    cfg.params = p;
  } else if (scenario == "equiprobable") {
    EquiprobableParams p;
    const std::string v = take("p");
    if (!v.empty()) p.p = parse_double("p", v);
    cfg.params = p;
  } else if (scenario == "randomp") {
    const std::string fam = take("family");
    if (fam.empty()) fail(Errc::config_parse, "randomp scenario needs family=");
    cfg.params = RandomPParams{std::shared_ptr<const PFamily>(parse_family(fam))};
  } else if (scenario == "symmetric") {
    const std::string p11 = take("puv11"), pu1 = take("pu1");
    if (p11.empty() || pu1.empty()) fail(Errc::config_parse, "symmetric scenario needs puv11= and pu1=");
    cfg.params = SymmetricParams::from_p11_marginal(parse_double("puv11", p11), parse_double("pu1", pu1));
  } else {
    fail(Errc::config_parse, "unknown scenario: " + scenario);
  }

  std::string v;
  if (!(v = take("n")).empty()) cfg.n = static_cast<int>(parse_u64("n", v));
  if (!(v = take("epsilon")).empty()) cfg.epsilon = v == "default" ? -1.0 : parse_double("epsilon", v);
  if (!(v = take("epsilon_c")).empty()) cfg.epsilon_c = parse_double("epsilon_c", v);
  if (!(v = take("trials")).empty()) cfg.trials = static_cast<int>(parse_u64("trials", v));
  if (!(v = take("master_seed")).empty()) cfg.master_seed = parse_u64("master_seed", v);
  if (!(v = take("node_budget")).empty()) cfg.node_budget = parse_u64("node_budget", v);
  if (!(v = take("store_cap")).empty()) cfg.store_cap = parse_u64("store_cap", v);
  if (!(v = take("workers")).empty()) cfg.workers = static_cast<int>(parse_u64("workers", v));
  if (!(v = take("sweep")).empty()) cfg.sweep_param = v;
  if (!(v = take("sweep_values")).empty()) {
    std::string list = v;
    for (char& c : list)
      if (c == ',') c = ' ';
    std::istringstream iv(list);
    double x;
    while (iv >> x) cfg.sweep_values.push_back(x);
    if (!iv.eof()) fail(Errc::config_parse, "bad sweep_values list: " + v);
  }
  if (!kv.empty()) fail(Errc::config_parse, "unknown key: " + kv.begin()->first);
  if (cfg.sweep_param.empty() != cfg.sweep_values.empty())
    fail(Errc::config_parse, "sweep and sweep_values must appear together");
  if (cfg.trials < 1) fail(Errc::config_parse, "trials must be >= 1");
  return cfg;
}

ExperimentConfig parse_experiment_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path);
  return parse_experiment_config(in);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  ExperimentReport report;
  if (config.sweep_param.empty()) {
    report.rows.push_back(run_point(config, "", kNaN));
  } else {
    if (config.sweep_values.empty()) fail(Errc::config_parse, "sweep axis without values");
    for (double value : config.sweep_values) {
      const ExperimentConfig point = apply_sweep_value(config, value);
      report.rows.push_back(run_point(point, config.sweep_param, value));
    }
  }
  for (const auto& row : report.rows) report.any_unusable = report.any_unusable || row.unusable;
  return report;
}

ExperimentReport sweep_report(const std::vector<ExperimentConfig>& configs) {
  if (configs.empty()) fail(Errc::config_parse, "sweep_report needs at least one config");
  ExperimentReport merged;
  for (const auto& cfg : configs) {
    ExperimentReport r = run_experiment(cfg);
    merged.any_unusable = merged.any_unusable || r.any_unusable;
    for (auto& row : r.rows) merged.rows.push_back(std::move(row));
  }
  return merged;
}

std::string summarize_trend(const ExperimentReport& report) {
  std::vector<double> xs, ys;
  std::string param = "none";
  for (const auto& row : report.rows) {
    if (row.sweep_param == "none" || std::isnan(row.mean_accuracy)) continue;
    param = row.sweep_param;
    xs.push_back(row.sweep_value);
    ys.push_back(row.mean_accuracy);
  }
  if (xs.size() < 2) return "trend: single point, nothing to rank";

  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> rx = ranks(xs), ry = ranks(ys);
  const double mean = (static_cast<double>(xs.size()) + 1.0) / 2.0;
  double num = 0.0, dx = 0.0, dy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    num += (rx[k] - mean) * (ry[k] - mean);
    dx += (rx[k] - mean) * (rx[k] - mean);
    dy += (ry[k] - mean) * (ry[k] - mean);
  }
  const double rho = (dx > 0.0 && dy > 0.0) ? num / std::sqrt(dx * dy) : 0.0;
  const char* direction = rho > 0.05 ? "increasing" : rho < -0.05 ? "decreasing" : "flat";
  char buf[128];
  std::snprintf(buf, sizeof buf, "trend: accuracy vs %s spearman=%.3f (%s)", param.c_str(), rho,
                direction);
  return buf;
}

void write_aggregate_csv(std::ostream& out, const ExperimentReport& report) {
  out << "sweep_param,sweep_value,n,trials,mean_accuracy,accuracy_ci_lo,accuracy_ci_hi,"
         "exact_match_rate,failure_rate,truncation_rate,mean_candidates,sufficient_satisfied,"
         "necessary_satisfied,union_bound_estimate,epsilon,master_seed\n";
  for (const auto& row : report.rows) {
    out << row.sweep_param << ',';
    format_cell(out, row.sweep_value);
    out << ',' << row.n << ',' << row.trials << ',';
    format_cell(out, row.mean_accuracy);
    out << ',';
    format_cell(out, row.accuracy_ci_lo);
    out << ',';
    format_cell(out, row.accuracy_ci_hi);
    out << ',';
    format_cell(out, row.exact_match_rate);
    out << ',';
    format_cell(out, row.failure_rate);
    out << ',';
    format_cell(out, row.truncation_rate);
    out << ',';
    format_cell(out, row.mean_candidates);
    out << ',';
    if (row.sufficient_satisfied >= 0) out << row.sufficient_satisfied;
    out << ',';
    if (row.necessary_satisfied >= 0) out << row.necessary_satisfied;
    out << ',';
    format_cell(out, row.union_bound_estimate);
    out << ',';
    format_cell(out, row.epsilon);
    out << ',' << row.master_seed << "\n";
  }
}

void write_trials_csv(std::ostream& out, const ExperimentReport& report) {
  out << "sweep_param,sweep_value,trial,candidate_count,accuracy,exact_match,failure,truncated,"
         "wrong_candidate,wall_seconds\n";
  for (const auto& row : report.rows) {
    for (const auto& rec : row.records) {
      out << row.sweep_param << ',';
      format_cell(out, row.sweep_value);
      out << ',' << rec.trial << ',' << rec.candidate_count << ',';
      if (!rec.failure && !rec.truncated) format_cell(out, rec.accuracy);
      out << ',' << (rec.exact_match ? 1 : 0) << ',' << (rec.failure ? 1 : 0) << ','
          << (rec.truncated ? 1 : 0) << ',' << (rec.wrong_candidate ? 1 : 0) << ',';
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", rec.wall_seconds);
      out << buf << "\n";
    }
  }
}

}  // namespace tmatch
