#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fltc {

enum class ErrorKind {
  InvalidInput,
  InvalidShape,
  InvalidVariable,
  DegenerateOutput,
  SyntaxError,
  UnknownVariable,
  UnknownTerm,
  ConsequentIsInput,
  DimensionMismatch,
  EmptyRuleBase,
  InvalidStep,
  NoEquilibrium,
  InvalidConfig,
  Io,
  Conflict,
  OutOfRange,
  NotFound,
  Internal,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind lets
/// callers branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Rule-source error with a 1-based source position. `what()` is
/// formatted as "line:column: message".
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, int line, int column, const std::string& message);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  int line_;
  int column_;
  std::string detail_;
};

}  // namespace fltc
