#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "tmatch/ambiguity.hpp"
#include "tmatch/model.hpp"

namespace tmatch {

// All rates, divergences and entropies are in bits (base-2 logs).

// KL divergence in bits; +inf when p puts mass outside q's support.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

// D(P_XY || P_X P_Y) in bits.
double mutual_information(const EdgeDistribution& dist);

// Error exponent of mismatched-labeling typicality, as a function of the
// fraction alpha of aligned attribute pairs. Minimizes
//   (1/2) [ (1-a) D(t' || P_X) + a D(t'' || P_X) + D(P_XY || (1-a) P_X P_Y'' + a P_XY) ]
// over t' in the box/simplex set where t'' = (P_X - (1-a) t') / a and
// P_Y''(y) = sum_x t'(x) P_{Y|X}(y|x).
struct ExponentResult {
  double alpha = 0.0;
  double value = 0.0;  // bits
  std::vector<double> t_prime;
  std::vector<double> t_double_prime;
  std::vector<double> py_double_prime;
};

ExponentResult exponent(const EdgeDistribution& dist, double alpha);

// Finite-length penalties attached to the exponent bound. delta's trailing
// O(epsilon) residual is taken as 0 (flagged by callers that report it).
struct Corrections {
  double zeta = 0.0;
  double delta = 0.0;
};

Corrections corrections(int ell_x, int ell_y, std::uint64_t n_prime, double epsilon,
                        const EdgeDistribution& dist, double alpha);

enum class Scenario { seeded, equiprobable, randomp, symmetric };

const char* scenario_name(Scenario s);

using ScenarioParams = std::variant<SeededParams, EquiprobableParams, RandomPParams, SymmetricParams>;

Scenario scenario_of(const ScenarioParams& params);

struct ConditionRow {
  double alpha = 0.0;  // NaN for necessary conditions (no grid variable)
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
};

struct ConditionReport {
  Scenario scenario = Scenario::seeded;
  std::string kind;  // "sufficient" or "necessary"
  int n = 0;
  std::vector<ConditionRow> rows;
  bool overall = false;
  double margin = 0.0;  // min over rows of rhs - lhs
  double regularity_ratio = 0.0;
  bool regularity_ok = true;
  bool corrections_included = false;
  std::vector<std::string> flags;
};

struct SufficientOptions {
  double alpha_n = -1.0;  // <0 picks the default 1 - 1/sqrt(n)
  int grid_size = 33;
  bool include_corrections = false;
  double epsilon = -1.0;  // <0 picks default_epsilon(n, dist); only used with corrections
};

// Grid evaluation of the matching-rate inequality
//   2 (1-alpha) log2(n) / (n-1)  <=  E_{alpha^2} + scenario term
// over alpha in [lower, alpha_n] (lower = gamma for seeded, else 0).
ConditionReport check_sufficient(const ScenarioParams& params, const EdgeDistribution& dist, int n,
                                 const SufficientOptions& opts = {});

// Single-inequality necessity test with the vanishing slack term dropped
// (flagged). Scenarios with polynomially decaying side-information validate
// the decay exponent lies in (0,1).
ConditionReport check_necessary(const ScenarioParams& params, const EdgeDistribution& dist, int n);

struct UnionBoundOptions {
  double alpha_n = 1.0;
  bool include_corrections = true;
};

// Sum over i (number of correctly labeled vertices) of
//   2^[ (n-i) log2(n f) - N (E_{i(i-1)/(n(n-1))} - zeta - delta) ]
// where f = 1 (seeded), p, E(P), or sqrt(theta), N = n(n-1)/2. Values above 1
// are vacuous. n <= 60.
double union_bound_failure_estimate(const ScenarioParams& params, const EdgeDistribution& dist,
                                    int n, double epsilon, const UnionBoundOptions& opts = {});

// CSV rows: scenario, n, alpha, lhs, rhs, margin, satisfied.
void write_condition_csv(std::ostream& out, const ConditionReport& report, bool header = true);
std::string condition_report_json(const ConditionReport& report);

}  // namespace tmatch
