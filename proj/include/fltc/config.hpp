#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "fltc/error.hpp"
#include "fltc/inference.hpp"
#include "fltc/membership.hpp"
#include "fltc/plant.hpp"
#include "fltc/ruledsl.hpp"

namespace fltc {

using Json = nlohmann::ordered_json;

struct FieldIssue {
  std::string path;  ///< JSON pointer, e.g. "/plant/capacitance"
  std::string message;
};

/// Validation failure listing every offending field.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<FieldIssue> issues);
  ConfigError(std::string path, std::string message);
  const std::vector<FieldIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<FieldIssue> issues_;
};

// Linguistic variables:
//   { "name", "universe": [lo, hi],
//     "terms": [{ "name", "shape": "triangular"|"trapezoidal", "points": [...] }] }
Json variable_to_json(const LinguisticVariable& var);
LinguisticVariable variable_from_json(const Json& doc, const std::string& path = "");

// Vocabulary: { "inputs": [variable...], "output": variable }
Json vocabulary_to_json(const Vocabulary& vocab);
Vocabulary vocabulary_from_json(const Json& doc, const std::string& path = "");

// { "rows": [...], "cols": [...], "out": "...", "cells": [[...]] } with
// optional "row_var" / "col_var"; these default to the first and second
// input variable of the vocabulary.
RuleMatrix matrix_from_json(const Json& doc, const Vocabulary& vocab, const std::string& path = "");
Json matrix_to_json(const RuleMatrix& matrix);

// Controller: vocabulary keys plus "rules" (text or array of lines) or
// "matrix", and optional "peaks": { term: value }.
Json controller_to_json(const FuzzyController& ctl);
FuzzyController controller_from_json(const Json& doc, const std::string& path = "");

// Plant: every PlantParams field, "adc_range": [lo, hi]. Missing keys keep
// their defaults.
Json plant_to_json(const PlantParams& params);
PlantParams plant_from_json(const Json& doc, const std::string& path = "");

Json trace_to_json(const InferenceTrace& trace);

/// Parses text as JSON, turning syntax errors into ConfigError.
Json parse_json_text(const std::string& text, const std::string& what);
/// Reads and parses a JSON file. Throws Error(Io) when unreadable.
Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);

/// Shortest round-trip decimal form of x.
std::string format_number(double x);

}  // namespace fltc
