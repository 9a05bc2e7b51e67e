#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fltc/membership.hpp"

namespace fltc {

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable antecedent tree: atoms "variable is term" joined by AND / OR.
class Expr {
 public:
  enum class Op { Atom, And, Or };

  static ExprPtr atom(std::string variable, std::string term);
  static ExprPtr conj(ExprPtr lhs, ExprPtr rhs);
  static ExprPtr disj(ExprPtr lhs, ExprPtr rhs);

  Op op() const noexcept { return op_; }
  const std::string& variable() const noexcept { return variable_; }
  const std::string& term() const noexcept { return term_; }
  const Expr& lhs() const { return *lhs_; }
  const Expr& rhs() const { return *rhs_; }

  friend bool operator==(const Expr& x, const Expr& y);

  Expr(Op op, std::string variable, std::string term, ExprPtr lhs, ExprPtr rhs);

 private:
  Op op_;
  std::string variable_;
  std::string term_;
  ExprPtr lhs_;
  ExprPtr rhs_;
};

struct Consequent {
  std::string variable;
  std::string term;
  friend bool operator==(const Consequent&, const Consequent&) = default;
};

struct Rule {
  int id = 0;
  ExprPtr antecedent;
  Consequent consequent;

  friend bool operator==(const Rule& x, const Rule& y) {
    return x.id == y.id && *x.antecedent == *y.antecedent && x.consequent == y.consequent;
  }
};

struct Vocabulary {
  std::vector<LinguisticVariable> inputs;
  LinguisticVariable output;

  const LinguisticVariable* find_input(std::string_view name) const;
};

/// Validated, immutable rule set bound to its variables.
class RuleBase {
 public:
  /// Throws EmptyRuleBase, InvalidInput (non-contiguous ids) or the
  /// UnknownVariable / UnknownTerm / ConsequentIsInput binding errors.
  RuleBase(Vocabulary vocabulary, std::vector<Rule> rules);

  const std::vector<LinguisticVariable>& inputs() const noexcept { return vocabulary_.inputs; }
  const LinguisticVariable& output() const noexcept { return vocabulary_.output; }
  const Vocabulary& vocabulary() const noexcept { return vocabulary_; }
  const std::vector<Rule>& rules() const noexcept { return rules_; }

  friend bool operator==(const RuleBase& x, const RuleBase& y) {
    return x.vocabulary_.inputs == y.vocabulary_.inputs && x.vocabulary_.output == y.vocabulary_.output &&
           x.rules_ == y.rules_;
  }

 private:
  Vocabulary vocabulary_;
  std::vector<Rule> rules_;
};

struct RuleMatrix {
  std::string row_var;
  std::string col_var;
  std::string out_var;
  std::vector<std::string> row_terms;
  std::vector<std::string> col_terms;
  std::vector<std::vector<std::string>> cells;
};

/// Parses rule text. Grammar (keywords case-insensitive):
///
///   rule := IF expr THEN ident IS ident
///   expr := conj { OR conj }
///   conj := atom { AND atom }
///   atom := "(" expr ")" | ident IS ident { OR ident }
///
/// The trailing `OR ident` shorthand repeats the atom's variable, so
/// "temperature is cold OR too-cold" reads as two atoms. Rules are separated
/// by newlines or ';'; '#' starts a comment. Names are bound to their
/// declared spelling. Errors are ParseError carrying line and column.
RuleBase parse_rules(std::string_view source, const Vocabulary& vocabulary);

/// One rule per cell, row-major: IF row_var is r AND col_var is c THEN out_var is cell.
RuleBase matrix_to_rules(const RuleMatrix& matrix, const Vocabulary& vocabulary);

/// Canonical text: one rule per line, uppercase keywords, every binary node
/// parenthesized, names in declared spelling.
std::string serialize_rulebase(const RuleBase& rb);
std::string serialize_expr(const Expr& expr);

}  // namespace fltc
