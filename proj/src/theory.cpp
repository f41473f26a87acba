#include "tmatch/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "tmatch/rng.hpp"
#include "tmatch/typicality.hpp"

namespace tmatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log2_safe(double x) { return std::log2(x); }

// Feasible box for the minimizer: t(x) in [(P_X(x)-a)/(1-a), P_X(x)/(1-a)]
// intersected with [0,1]. P_X itself always lies inside.
struct Box {
  std::vector<double> lo, hi;
};

Box feasible_box(const EdgeDistribution& d, double alpha) {
  const double abar = 1.0 - alpha;
  Box b;
  const int ell = d.ell();
  b.lo.resize(ell);
  b.hi.resize(ell);
  for (int x = 0; x < ell; ++x) {
    b.lo[x] = std::max(0.0, (d.px(x) - alpha) / abar);
    b.hi[x] = std::min(1.0, d.px(x) / abar);
    if (d.px(x) < b.lo[x] - 1e-12 || d.px(x) > b.hi[x] + 1e-12)
      fail(Errc::internal_error, "P_X fell outside its own feasible box");
  }
  return b;
}

// Objective of the exponent minimization for alpha in (0,1).
double objective(const EdgeDistribution& d, double alpha, const std::vector<double>& t1,
                 std::vector<double>* t2_out = nullptr, std::vector<double>* py2_out = nullptr) {
  const int ell = d.ell();
  const double abar = 1.0 - alpha;
  std::vector<double> t2(ell), py2(ell, 0.0);
  for (int x = 0; x < ell; ++x) {
    t2[x] = std::clamp((d.px(x) - abar * t1[x]) / alpha, 0.0, 1.0);
    if (d.px(x) > 0.0) {
      const double w = t1[x] / d.px(x);
      for (int y = 0; y < ell; ++y) py2[y] += w * d.joint(x, y);
    }
  }
  double sum = 0.0;
  for (int x = 0; x < ell; ++x) {
    if (t1[x] > 0.0) {
      if (d.px(x) == 0.0) return kInf;
      sum += abar * t1[x] * log2_safe(t1[x] / d.px(x));
    }
    if (t2[x] > 0.0) {
      if (d.px(x) == 0.0) return kInf;
      sum += alpha * t2[x] * log2_safe(t2[x] / d.px(x));
    }
  }
  for (int x = 0; x < ell; ++x) {
    for (int y = 0; y < ell; ++y) {
      const double p = d.joint(x, y);
      if (p == 0.0) continue;
      const double mix = abar * d.px(x) * py2[y] + alpha * p;
      if (mix <= 0.0) return kInf;
      sum += p * log2_safe(p / mix);
    }
  }
  if (t2_out) *t2_out = std::move(t2);
  if (py2_out) *py2_out = std::move(py2);
  return std::max(0.5 * sum, 0.0);
}

// Golden-section minimum of g on [lo, hi].
template <typename G>
double golden_min(G&& g, double lo, double hi, int iters) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = g(x1), f2 = g(x2);
  for (int k = 0; k < iters && b - a > 1e-14; ++k) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = g(x2);
    }
  }
  double best_x = (f1 <= f2) ? x1 : x2;
  double best_f = std::min(f1, f2);
  for (double cand : {lo, hi}) {
    const double fc = g(cand);
    if (fc < best_f) {
      best_f = fc;
      best_x = cand;
    }
  }
  return best_x;
}

// Projects v onto the intersection of the box and the probability simplex by
// bisecting a common shift (the sum is monotone in the shift).
std::vector<double> project_box_simplex(const std::vector<double>& v, const Box& box) {
  const int ell = static_cast<int>(v.size());
  auto sum_at = [&](double lambda) {
    double s = 0.0;
    for (int x = 0; x < ell; ++x) s += std::clamp(v[x] + lambda, box.lo[x], box.hi[x]);
    return s;
  };
  double lo = -2.0, hi = 2.0;
  for (int k = 0; k < 100; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (sum_at(mid) < 1.0)
      lo = mid;
    else
      hi = mid;
  }
  std::vector<double> out(ell);
  const double lambda = 0.5 * (lo + hi);
  for (int x = 0; x < ell; ++x) out[x] = std::clamp(v[x] + lambda, box.lo[x], box.hi[x]);
  return out;
}

// Cyclic pairwise coordinate descent; each move shifts mass between two
// coordinates, staying on the simplex slice of the box. The objective is
// convex, so this converges to the global minimum; multistart guards the
// degenerate stalls where a pair's feasible segment collapses.
std::vector<double> minimize_coordinate_descent(const EdgeDistribution& d, double alpha,
                                                const Box& box, std::vector<double> t) {
  const int ell = d.ell();
  double current = objective(d, alpha, t);
  for (int pass = 0; pass < 200; ++pass) {
    double improvement = 0.0;
    for (int i = 0; i < ell; ++i) {
      for (int j = 0; j < ell; ++j) {
        if (i == j) continue;
        const double dlo = std::max(box.lo[i] - t[i], t[j] - box.hi[j]);
        const double dhi = std::min(box.hi[i] - t[i], t[j] - box.lo[j]);
        if (dhi - dlo < 1e-14) continue;
        auto g = [&](double delta) {
          std::vector<double> u = t;
          u[i] += delta;
          u[j] -= delta;
          return objective(d, alpha, u);
        };
        const double best = golden_min(g, dlo, dhi, 60);
        const double val = g(best);
        if (val < current - 1e-15) {
          t[i] += best;
          t[j] -= best;
          improvement += current - val;
          current = val;
        }
      }
    }
    if (improvement < 1e-13) break;
  }
  return t;
}

double scenario_factor(const ScenarioParams& params) {
  switch (scenario_of(params)) {
    case Scenario::seeded:
      return 1.0;
    case Scenario::equiprobable:
      return std::get<EquiprobableParams>(params).p;
    case Scenario::randomp: {
      const auto& rp = std::get<RandomPParams>(params);
      if (!rp.family) fail(Errc::invalid_family_params, "missing family");
      return rp.family->mean();
    }
    case Scenario::symmetric:
      return std::sqrt(std::get<SymmetricParams>(params).theta());
  }
  fail(Errc::internal_error, "unknown scenario");
}

// Rate bonus added to the sufficiency RHS; 0 for seeded. The (1-alpha)
// prefactor is handled here so alpha=1 is exact even when the log blows up.
double sufficiency_bonus(const ScenarioParams& params, double alpha, int n) {
  const double coeff = 1.0 - alpha;
  if (coeff == 0.0) return 0.0;
  switch (scenario_of(params)) {
    case Scenario::seeded:
      return 0.0;
    case Scenario::equiprobable:
      return -2.0 * coeff * log2_safe(std::get<EquiprobableParams>(params).p) / n;
    case Scenario::randomp:
      return -2.0 * coeff * log2_safe(std::get<RandomPParams>(params).family->mean()) / n;
    case Scenario::symmetric:
      return -coeff * log2_safe(std::get<SymmetricParams>(params).theta()) / n;
  }
  fail(Errc::internal_error, "unknown scenario");
}

double regularity_ratio(const EdgeDistribution& dist, int n) {
  double worst = 0.0;
  for (int x = 0; x < dist.ell(); ++x)
    for (int y = 0; y < dist.ell(); ++y) {
      if (!dist.in_support(x, y)) continue;
      const double r = log2_safe(dist.px(x) * dist.py(y) / dist.joint(x, y));
      worst = std::max(worst, r);  // positive part: negatives drop out
    }
  return worst / log2_safe(static_cast<double>(n));
}

}  // namespace

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) fail(Errc::dimension_mismatch, "kl_divergence: size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInf;
    sum += p[i] * log2_safe(p[i] / q[i]);
  }
  return std::max(sum, 0.0);
}

double mutual_information(const EdgeDistribution& dist) {
  std::vector<double> prod(dist.flat().size());
  for (int x = 0; x < dist.ell(); ++x)
    for (int y = 0; y < dist.ell(); ++y)
      prod[static_cast<std::size_t>(x) * dist.ell() + y] = dist.px(x) * dist.py(y);
  return kl_divergence(dist.flat(), prod);
}

ExponentResult exponent(const EdgeDistribution& dist, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail(Errc::alpha_out_of_range, "alpha must be in [0,1]");
  const int ell = dist.ell();
  ExponentResult r;
  r.alpha = alpha;
  std::vector<double> px(ell);
  for (int x = 0; x < ell; ++x) px[x] = dist.px(x);
  std::vector<double> py(ell);
  for (int y = 0; y < ell; ++y) py[y] = dist.py(y);

  if (alpha == 0.0) {
    r.value = 0.5 * mutual_information(dist);
    r.t_prime = px;
    r.t_double_prime = px;
    r.py_double_prime = py;
    return r;
  }
  if (alpha == 1.0) {
    r.value = 0.0;
    r.t_prime = px;
    r.t_double_prime = px;
    r.py_double_prime = py;
    return r;
  }

  const Box box = feasible_box(dist, alpha);
  std::vector<double> best = px;
  double best_val = objective(dist, alpha, best);

  if (ell == 2) {
    const double lo = std::max(box.lo[0], 1.0 - box.hi[1]);
    const double hi = std::min(box.hi[0], 1.0 - box.lo[1]);
    auto g = [&](double u) {
      const std::vector<double> t{u, 1.0 - u};
      return objective(dist, alpha, t);
    };
    const double u = golden_min(g, lo, hi, 200);
    if (g(u) < best_val) {
      best = {u, 1.0 - u};
      best_val = g(u);
    }
  } else {
    auto consider = [&](std::vector<double> start) {
      const std::vector<double> t = minimize_coordinate_descent(dist, alpha, box, std::move(start));
      const double val = objective(dist, alpha, t);
      if (val < best_val) {
        best = t;
        best_val = val;
      }
    };
    consider(px);
    RngStream rng(0x9D5F0C5Eu, static_cast<std::uint64_t>(alpha * 1e9));
    for (int k = 0; k < 10; ++k) {
      std::vector<double> v(ell);
      for (int x = 0; x < ell; ++x)
        v[x] = box.lo[x] + (box.hi[x] - box.lo[x]) * rng.uniform01();
      consider(project_box_simplex(v, box));
    }
  }

  r.t_prime = best;
  r.value = objective(dist, alpha, best, &r.t_double_prime, &r.py_double_prime);
  return r;
}

Corrections corrections(int ell_x, int ell_y, std::uint64_t n_prime, double epsilon,
                        const EdgeDistribution& dist, double alpha) {
  if (n_prime < 1) fail(Errc::out_of_range, "corrections need n' >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail(Errc::alpha_out_of_range, "alpha must be in [0,1]");
  Corrections c;
  const double np = static_cast<double>(n_prime);
  c.zeta = (1.5 * ell_x * ell_x * ell_y + 6.0 * ell_x * ell_y) * log2_safe(np + 1.0) / np;
  double worst = 0.0;
  for (int x = 0; x < dist.ell(); ++x)
    for (int y = 0; y < dist.ell(); ++y) {
      const double p = dist.joint(x, y);
      if (p == 0.0) continue;
      const double mix = alpha * p + (1.0 - alpha) * dist.px(x) * dist.py(y);
      worst = std::max(worst, std::fabs(log2_safe(p / mix)));
    }
  c.delta = epsilon * ell_x * ell_y * worst;
  return c;
}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::seeded: return "seeded";
    case Scenario::equiprobable: return "equiprobable";
    case Scenario::randomp: return "randomp";
    case Scenario::symmetric: return "symmetric";
  }
  return "unknown";
}

Scenario scenario_of(const ScenarioParams& params) {
  return static_cast<Scenario>(params.index());
}

ConditionReport check_sufficient(const ScenarioParams& params, const EdgeDistribution& dist, int n,
                                 const SufficientOptions& opts) {
  if (n < 2) fail(Errc::invalid_n, "check_sufficient needs n >= 2");
  if (opts.grid_size < 2) fail(Errc::invalid_scenario_params, "grid_size must be >= 2");
  const double alpha_n = opts.alpha_n < 0.0 ? 1.0 - 1.0 / std::sqrt(static_cast<double>(n)) : opts.alpha_n;
  if (!(alpha_n > 0.0 && alpha_n <= 1.0))
    fail(Errc::invalid_scenario_params, "alpha_n must lie in (0,1]");
  double lower = 0.0;
  if (scenario_of(params) == Scenario::seeded) {
    const double gamma = std::get<SeededParams>(params).gamma;
    if (!(gamma >= 0.0 && gamma <= 1.0)) fail(Errc::invalid_scenario_params, "gamma must be in [0,1]");
    lower = gamma;
  }
  if (lower > alpha_n + 1e-12)
    fail(Errc::invalid_scenario_params, "grid lower bound exceeds alpha_n");

  ConditionReport rep;
  rep.scenario = scenario_of(params);
  rep.kind = "sufficient";
  rep.n = n;
  rep.corrections_included = opts.include_corrections;
  const double eps = opts.epsilon < 0.0 ? default_epsilon(n, dist) : opts.epsilon;
  const std::uint64_t N = ut_length(n);

  rep.margin = kInf;
  rep.overall = true;
  for (int k = 0; k < opts.grid_size; ++k) {
    const double alpha =
        lower + (alpha_n - lower) * static_cast<double>(k) / (opts.grid_size - 1);
    ConditionRow row;
    row.alpha = alpha;
    row.lhs = 2.0 * (1.0 - alpha) * log2_safe(static_cast<double>(n)) / (n - 1);
    double rhs = exponent(dist, alpha * alpha).value;
    if (opts.include_corrections) {
      const Corrections c = corrections(dist.ell(), dist.ell(), N, eps, dist, alpha * alpha);
      rhs -= c.zeta + c.delta;
    }
    rhs += sufficiency_bonus(params, alpha, n);
    row.rhs = rhs;
    row.satisfied = row.lhs <= rhs + 1e-12;
    rep.rows.push_back(row);
    rep.overall = rep.overall && row.satisfied;
    rep.margin = std::min(rep.margin, rhs - row.lhs);
  }
  rep.regularity_ratio = regularity_ratio(dist, n);
  rep.regularity_ok = rep.regularity_ratio < 1.0;
  if (opts.include_corrections) rep.flags.push_back("delta O(eps) residual set to 0");
  if (!rep.regularity_ok) rep.flags.push_back("regularity ratio >= 1: log-ratio condition fails at this n");
  return rep;
}

ConditionReport check_necessary(const ScenarioParams& params, const EdgeDistribution& dist, int n) {
  if (n < 2) fail(Errc::invalid_n, "check_necessary needs n >= 2");
  ConditionReport rep;
  rep.scenario = scenario_of(params);
  rep.kind = "necessary";
  rep.n = n;
  const double info = mutual_information(dist);
  const double logn_over_n = log2_safe(static_cast<double>(n)) / n;
  ConditionRow row;
  row.alpha = kNaN;
  switch (rep.scenario) {
    case Scenario::seeded: {
      const double gamma = std::get<SeededParams>(params).gamma;
      if (!(gamma >= 0.0 && gamma <= 1.0)) fail(Errc::invalid_scenario_params, "gamma must be in [0,1]");
      row.lhs = 2.0 * (1.0 - gamma) * logn_over_n;
      row.rhs = info;
      break;
    }
    case Scenario::equiprobable: {
      const double p = std::get<EquiprobableParams>(params).p;
      const double a = -std::log(p) / std::log(static_cast<double>(n));
      if (!(a > 0.0 && a < 1.0))
        fail(Errc::decay_exponent_out_of_range,
             "equiprobable necessity needs p = n^-a with a in (0,1)");
      row.lhs = 2.0 * logn_over_n;
      row.rhs = info - 2.0 * log2_safe(p) / n;
      break;
    }
    case Scenario::randomp: {
      const auto& rp = std::get<RandomPParams>(params);
      if (!rp.family) fail(Errc::invalid_family_params, "missing family");
      row.lhs = 2.0 * logn_over_n;
      row.rhs = info - 2.0 * log2_safe(rp.family->mean()) / n;
      break;
    }
    case Scenario::symmetric: {
      const double theta = std::get<SymmetricParams>(params).theta();
      const double z = -std::log(theta) / std::log(static_cast<double>(n));
      if (!(z > 0.0 && z < 1.0))
        fail(Errc::decay_exponent_out_of_range,
             "symmetric necessity needs theta = n^-z with z in (0,1)");
      row.lhs = 2.0 * logn_over_n;
      row.rhs = info - log2_safe(theta) / n;
      break;
    }
  }
  row.satisfied = row.lhs <= row.rhs + 1e-12;
  rep.rows.push_back(row);
  rep.overall = row.satisfied;
  rep.margin = row.rhs - row.lhs;
  rep.regularity_ratio = 0.0;
  rep.regularity_ok = true;
  rep.flags.push_back("asymptotic slack dropped");
  return rep;
}

double union_bound_failure_estimate(const ScenarioParams& params, const EdgeDistribution& dist,
                                    int n, double epsilon, const UnionBoundOptions& opts) {
  if (n < 2) fail(Errc::invalid_n, "union bound needs n >= 2");
  if (n > 60) fail(Errc::too_large, "union bound diagnostic capped at n = 60");
  if (!(opts.alpha_n > 0.0 && opts.alpha_n <= 1.0))
    fail(Errc::invalid_scenario_params, "alpha_n must lie in (0,1]");
  int lo = 0;
  if (scenario_of(params) == Scenario::seeded) {
    const double gamma = std::get<SeededParams>(params).gamma;
    const double kf = gamma * n;
    const int k = static_cast<int>(std::llround(kf));
    if (!(gamma >= 0.0 && gamma <= 1.0) || std::fabs(kf - k) > 1e-9)
      fail(Errc::non_integral_seed_count, "gamma*n must be an integer in [0,n]");
    lo = k;
  }
  const int hi = static_cast<int>(std::floor(opts.alpha_n * n + 1e-9));
  const double f = scenario_factor(params);
  const std::uint64_t N = ut_length(n);
  double sum = 0.0;
  for (int i = lo; i <= hi; ++i) {
    const double alpha_edge =
        static_cast<double>(i) * (i - 1) / (static_cast<double>(n) * (n - 1));
    const double e_val = exponent(dist, alpha_edge).value;
    double zeta = 0.0, delta = 0.0;
    if (opts.include_corrections) {
      const Corrections c = corrections(dist.ell(), dist.ell(), N, epsilon, dist, alpha_edge);
      zeta = c.zeta;
      delta = c.delta;
    }
    double bits = -static_cast<double>(N) * (e_val - zeta - delta);
    if (n - i > 0) {
      if (f <= 0.0) continue;  // log(n f) = -inf: the term vanishes
      bits += static_cast<double>(n - i) * log2_safe(n * f);
    }
    sum += std::exp2(bits);
  }
  return sum;
}

void write_condition_csv(std::ostream& out, const ConditionReport& report, bool header) {
  if (header) out << "scenario,n,alpha,lhs,rhs,margin,satisfied\n";
  char buf[128];
  for (const auto& row : report.rows) {
    out << scenario_name(report.scenario) << ',' << report.n << ',';
    if (std::isnan(row.alpha)) {
      out << ',';
    } else {
      std::snprintf(buf, sizeof buf, "%.12g,", row.alpha);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%d\n", row.lhs, row.rhs, row.rhs - row.lhs,
                  row.satisfied ? 1 : 0);
    out << buf;
  }
}

std::string condition_report_json(const ConditionReport& report) {
  nlohmann::json j;
  j["scenario"] = scenario_name(report.scenario);
  j["kind"] = report.kind;
  j["n"] = report.n;
  j["overall"] = report.overall;
  j["margin"] = report.margin;
  j["corrections_included"] = report.corrections_included;
  j["regularity"] = {{"ratio", report.regularity_ratio}, {"ok", report.regularity_ok}};
  j["flags"] = report.flags;
  auto rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json r;
    if (!std::isnan(row.alpha)) r["alpha"] = row.alpha;
    r["lhs"] = row.lhs;
    r["rhs"] = row.rhs;
    r["margin"] = row.rhs - row.lhs;
    r["satisfied"] = row.satisfied;
    rows.push_back(r);
  }
  j["rows"] = rows;
  return j.dump(2);
}

}  // namespace tmatch
