#include "fltc/error.hpp"

namespace fltc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid_input";
    case ErrorKind::InvalidShape: return "invalid_shape";
    case ErrorKind::InvalidVariable: return "invalid_variable";
    case ErrorKind::DegenerateOutput: return "degenerate_output";
    case ErrorKind::SyntaxError: return "syntax_error";
    case ErrorKind::UnknownVariable: return "unknown_variable";
    case ErrorKind::UnknownTerm: return "unknown_term";
    case ErrorKind::ConsequentIsInput: return "consequent_is_input";
    case ErrorKind::DimensionMismatch: return "dimension_mismatch";
    case ErrorKind::EmptyRuleBase: return "empty_rule_base";
    case ErrorKind::InvalidStep: return "invalid_step";
    case ErrorKind::NoEquilibrium: return "no_equilibrium";
    case ErrorKind::InvalidConfig: return "invalid_config";
    case ErrorKind::Io: return "io_error";
    case ErrorKind::Conflict: return "conflict";
    case ErrorKind::OutOfRange: return "out_of_range";
    case ErrorKind::NotFound: return "not_found";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

ParseError::ParseError(ErrorKind kind, int line, int column, const std::string& message)
    : Error(kind, std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

}  // namespace fltc
