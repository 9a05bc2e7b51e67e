#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fltc/membership.hpp"
#include "fltc/ruledsl.hpp"

namespace fltc {

/// Variable name -> term degrees.
using FuzzifiedInputs = std::map<std::string, TermDegrees>;

struct RuleActivation {
  int rule_id = 0;
  std::string consequent;  ///< output term name
  Degree weight;           ///< evaluated antecedent degree W(i)
  double peak = 0.0;       ///< extremum P(i) of the consequent term
};

struct CrispInput {
  double value = 0.0;  ///< as supplied
  double used = 0.0;   ///< after clamping into the universe
  bool clamped() const { return value != used; }
};

struct InferenceTrace {
  std::map<std::string, CrispInput> inputs;
  FuzzifiedInputs fuzzified;
  std::vector<RuleActivation> activations;
  /// Empty when every rule weight is zero.
  std::optional<double> output;
};

/// AND = min, OR = max. Throws Error(Internal) when an atom is missing
/// from `fuzzified`.
Degree evaluate_antecedent(const Expr& expr, const FuzzifiedInputs& fuzzified);

/// D = sum(P * W) / sum(W). Throws InvalidInput for an empty list and
/// DegenerateOutput when the weights sum to zero.
double defuzzify_weighted_average(std::span<const RuleActivation> activations);

class FuzzyController {
 public:
  /// Peaks default to each output term's MembershipFunction::peak();
  /// `peak_overrides` replaces individual entries.
  explicit FuzzyController(RuleBase rulebase, const std::map<std::string, double>& peak_overrides = {});

  const RuleBase& rulebase() const noexcept { return rulebase_; }
  const std::map<std::string, double>& peak_table() const noexcept { return peaks_; }
  const std::map<std::string, double>& peak_overrides() const noexcept { return overrides_; }

  /// Runs every stage and records it. Leaves `output` empty instead of
  /// throwing when all weights are zero. Throws InvalidInput when an input
  /// variable is missing or non-finite.
  InferenceTrace trace(const std::map<std::string, double>& inputs) const;

  /// As trace(), but throws DegenerateOutput when no rule fires.
  InferenceTrace infer(const std::map<std::string, double>& inputs) const;

 private:
  RuleBase rulebase_;
  std::map<std::string, double> overrides_;
  std::map<std::string, double> peaks_;
};

/// error -> pwm controller with the five rules
/// NEG->VH, SNEG->VH, ZERO->M, SPOZ->L, POZ->Z.
/// The output is read as the fan PWM level.
FuzzyController build_fltc_controller();

/// Canonical rule text of build_fltc_controller().
std::string fltc_rule_source();

}  // namespace fltc
