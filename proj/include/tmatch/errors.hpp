#pragma once

#include <stdexcept>
#include <string>

namespace tmatch {

enum class Errc {
  non_square,
  negative_entry,
  not_normalized,
  asymmetric_input,
  invalid_n,
  dimension_mismatch,
  length_mismatch,
  non_integral_seed_count,
  invalid_family_params,
  unequal_marginals,
  too_large,
  out_of_range,
  alpha_out_of_range,
  invalid_scenario_params,
  decay_exponent_out_of_range,
  config_parse,
  budget_exhausted_everywhere,
  io_error,
  internal_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::non_square: return "NonSquare";
    case Errc::negative_entry: return "NegativeEntry";
    case Errc::not_normalized: return "NotNormalized";
    case Errc::asymmetric_input: return "AsymmetricInput";
    case Errc::invalid_n: return "InvalidN";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::non_integral_seed_count: return "NonIntegralSeedCount";
    case Errc::invalid_family_params: return "InvalidFamilyParams";
    case Errc::unequal_marginals: return "UnequalMarginals";
    case Errc::too_large: return "TooLarge";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::alpha_out_of_range: return "AlphaOutOfRange";
    case Errc::invalid_scenario_params: return "InvalidScenarioParams";
    case Errc::decay_exponent_out_of_range: return "DecayExponentOutOfRange";
    case Errc::config_parse: return "ConfigParse";
    case Errc::budget_exhausted_everywhere: return "BudgetExhaustedEverywhere";
    case Errc::io_error: return "IoError";
    case Errc::internal_error: return "InternalError";
  }
  return "Unknown";
}

class DomainError : public std::runtime_error {
 public:
  DomainError(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw DomainError(code, what);
}

}  // namespace tmatch
