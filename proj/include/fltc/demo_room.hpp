#pragma once

#include <map>
#include <string>

#include "fltc/inference.hpp"
#include "fltc/ruledsl.hpp"

namespace fltc::room {

inline constexpr double kRoomLo = 0.0;
inline constexpr double kRoomHi = 40.0;

/// "temperature" and "target" over [0, 40] degC, five evenly spaced
/// triangles (too-cold 0, cold 10, warm 20, hot 30, too-hot 40); output
/// "command" with terms heat, cool, no-change.
Vocabulary vocabulary();

/// The 5x5 temperature/target command matrix (rows: temperature).
RuleMatrix command_matrix();

/// The three sample rules in their original textual form.
std::string sample_rules_text();

/// Rule base compiled from command_matrix().
FuzzyController controller();

struct Decision {
  std::string command;                     ///< heat, cool or no-change
  double degree = 0.0;                     ///< aggregate weight of `command`
  std::map<std::string, double> commands;  ///< max rule weight per command
  InferenceTrace trace;
};

/// Fires the matrix controller and picks the command with the largest
/// aggregate (max) weight; ties go heat > cool > no-change. Throws
/// Error(InvalidInput) when an input lies outside [0, 40].
Decision decide(double temperature, double target);

}  // namespace fltc::room
