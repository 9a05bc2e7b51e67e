#include "fltc/inference.hpp"

#include <algorithm>
#include <cmath>

#include "fltc/error.hpp"

namespace fltc {

Degree evaluate_antecedent(const Expr& expr, const FuzzifiedInputs& fuzzified) {
  switch (expr.op()) {
    case Expr::Op::Atom: {
      const auto var = fuzzified.find(expr.variable());
      if (var == fuzzified.end()) {
        throw Error(ErrorKind::Internal, "no fuzzified values for variable '" + expr.variable() + "'");
      }
      const auto term = var->second.find(expr.term());
      if (term == var->second.end()) {
        throw Error(ErrorKind::Internal,
                    "no degree for term '" + expr.term() + "' of variable '" + expr.variable() + "'");
      }
      return term->second;
    }
    case Expr::Op::And:
      return std::min(evaluate_antecedent(expr.lhs(), fuzzified), evaluate_antecedent(expr.rhs(), fuzzified));
    case Expr::Op::Or:
      return std::max(evaluate_antecedent(expr.lhs(), fuzzified), evaluate_antecedent(expr.rhs(), fuzzified));
  }
  throw Error(ErrorKind::Internal, "corrupt antecedent node");
}

double defuzzify_weighted_average(std::span<const RuleActivation> activations) {
  if (activations.empty()) {
    throw Error(ErrorKind::InvalidInput, "defuzzification needs at least one activation");
  }
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& a : activations) {
    weighted += a.peak * a.weight.value();
    total += a.weight.value();
  }
  if (!(total > 0.0)) {
    throw Error(ErrorKind::DegenerateOutput, "no rule fired: all weights are zero");
  }
  return weighted / total;
}

FuzzyController::FuzzyController(RuleBase rulebase, const std::map<std::string, double>& peak_overrides)
    : rulebase_(std::move(rulebase)) {
  const auto& out = rulebase_.output();
  for (const auto& term : out.terms()) {
    peaks_[term.name] = term.mf.peak();
  }
  for (const auto& [name, value] : peak_overrides) {
    const auto* term = out.find_term(name);
    if (term == nullptr) {
      throw Error(ErrorKind::UnknownTerm, "peak override for unknown output term '" + name + "'");
    }
    if (!std::isfinite(value) || value < out.lo() || value > out.hi()) {
      throw Error(ErrorKind::InvalidInput, "peak override for '" + name + "' lies outside the output universe");
    }
    peaks_[term->name] = value;
    overrides_[term->name] = value;
  }
}

InferenceTrace FuzzyController::trace(const std::map<std::string, double>& inputs) const {
  InferenceTrace tr;
  for (const auto& var : rulebase_.inputs()) {
    const auto it = std::find_if(inputs.begin(), inputs.end(), [&](const auto& kv) { return iequals(kv.first, var.name()); });
    if (it == inputs.end()) {
      throw Error(ErrorKind::InvalidInput, "missing input variable '" + var.name() + "'");
    }
    tr.fuzzified.emplace(var.name(), fuzzify(var, it->second));
    tr.inputs.emplace(var.name(), CrispInput{it->second, var.clamp(it->second)});
  }

  tr.activations.reserve(rulebase_.rules().size());
  for (const auto& rule : rulebase_.rules()) {
    tr.activations.push_back(RuleActivation{rule.id, rule.consequent.term,
                                            evaluate_antecedent(*rule.antecedent, tr.fuzzified),
                                            peaks_.at(rule.consequent.term)});
  }

  const bool fired = std::any_of(tr.activations.begin(), tr.activations.end(),
                                 [](const auto& a) { return a.weight.value() > 0.0; });
  if (fired) {
    tr.output = defuzzify_weighted_average(tr.activations);
  }
  return tr;
}

InferenceTrace FuzzyController::infer(const std::map<std::string, double>& inputs) const {
  auto tr = trace(inputs);
  if (!tr.output) {
    throw Error(ErrorKind::DegenerateOutput, "no rule fired: all weights are zero");
  }
  return tr;
}

std::string fltc_rule_source() {
  return "IF error IS NEG THEN pwm IS VH\n"
         "IF error IS SNEG THEN pwm IS VH\n"
         "IF error IS ZERO THEN pwm IS M\n"
         "IF error IS SPOZ THEN pwm IS L\n"
         "IF error IS POZ THEN pwm IS Z\n";
}

FuzzyController build_fltc_controller() {
  Vocabulary vocab{{build_fltc_input_variable()}, build_fltc_output_variable()};
  return FuzzyController(parse_rules(fltc_rule_source(), vocab));
}

}  // namespace fltc
