#include "fltc/ruledsl.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "fltc/error.hpp"

namespace fltc {

Expr::Expr(Op op, std::string variable, std::string term, ExprPtr lhs, ExprPtr rhs)
    : op_(op), variable_(std::move(variable)), term_(std::move(term)), lhs_(std::move(lhs)), rhs_(std::move(rhs)) {}

ExprPtr Expr::atom(std::string variable, std::string term) {
  return std::make_shared<const Expr>(Op::Atom, std::move(variable), std::move(term), nullptr, nullptr);
}

ExprPtr Expr::conj(ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<const Expr>(Op::And, "", "", std::move(lhs), std::move(rhs));
}

ExprPtr Expr::disj(ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<const Expr>(Op::Or, "", "", std::move(lhs), std::move(rhs));
}

bool operator==(const Expr& x, const Expr& y) {
  if (x.op_ != y.op_) return false;
  if (x.op_ == Expr::Op::Atom) return x.variable_ == y.variable_ && x.term_ == y.term_;
  return *x.lhs_ == *y.lhs_ && *x.rhs_ == *y.rhs_;
}

const LinguisticVariable* Vocabulary::find_input(std::string_view name) const {
  const auto it = std::find_if(inputs.begin(), inputs.end(), [&](const auto& v) { return iequals(v.name(), name); });
  return it == inputs.end() ? nullptr : &*it;
}

namespace {

void check_bound(const Expr& e, const Vocabulary& vocab) {
  if (e.op() != Expr::Op::Atom) {
    check_bound(e.lhs(), vocab);
    check_bound(e.rhs(), vocab);
    return;
  }
  const auto* var = vocab.find_input(e.variable());
  if (var == nullptr || var->name() != e.variable()) {
    throw Error(ErrorKind::UnknownVariable, "unknown input variable '" + e.variable() + "'");
  }
  const auto* term = var->find_term(e.term());
  if (term == nullptr || term->name != e.term()) {
    throw Error(ErrorKind::UnknownTerm, "unknown term '" + e.term() + "' for variable '" + e.variable() + "'");
  }
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Ident, LParen, RParen, Sep, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      out.push_back({Tok::Sep, "\n", line, col});
      ++line;
      col = 1;
      ++i;
    } else if (c == '#') {
      while (i < src.size() && src[i] != '\n') {
        ++i;
        ++col;
      }
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
    } else if (c == '(' || c == ')' || c == ';') {
      out.push_back({c == '(' ? Tok::LParen : c == ')' ? Tok::RParen : Tok::Sep, std::string(1, c), line, col});
      ++i;
      ++col;
    } else if (ident_start(c)) {
      const int start_col = col;
      const std::size_t start = i;
      while (i < src.size() && ident_char(src[i])) {
        ++i;
        ++col;
      }
      out.push_back({Tok::Ident, std::string(src.substr(start, i - start)), line, start_col});
    } else {
      throw ParseError(ErrorKind::SyntaxError, line, col, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

bool is_keyword(const Token& t, std::string_view kw) { return t.kind == Tok::Ident && iequals(t.text, kw); }

bool is_reserved(const Token& t) {
  for (auto kw : {"IF", "THEN", "IS", "AND", "OR"}) {
    if (is_keyword(t, kw)) return true;
  }
  return false;
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Sep: return t.text == ";" ? "';'" : "end of line";
    default: return "'" + t.text + "'";
  }
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::vector<Token> tokens, const Vocabulary& vocab) : toks_(std::move(tokens)), vocab_(vocab) {}

  std::vector<Rule> parse_all() {
    std::vector<Rule> rules;
    while (true) {
      while (peek().kind == Tok::Sep) advance();
      if (peek().kind == Tok::End) break;
      rules.push_back(parse_rule(static_cast<int>(rules.size()) + 1));
      if (peek().kind != Tok::Sep && peek().kind != Tok::End) {
        fail(peek(), "expected end of rule, found " + describe(peek()));
      }
    }
    return rules;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& advance() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(const Token& at, const std::string& msg, ErrorKind kind = ErrorKind::SyntaxError) const {
    throw ParseError(kind, at.line, at.column, msg);
  }

  void expect_keyword(std::string_view kw) {
    if (!is_keyword(peek(), kw)) fail(peek(), "expected '" + std::string(kw) + "', found " + describe(peek()));
    advance();
  }

  const Token& expect_ident(std::string_view what) {
    if (peek().kind != Tok::Ident || is_reserved(peek())) {
      fail(peek(), "expected " + std::string(what) + ", found " + describe(peek()));
    }
    return advance();
  }

  Rule parse_rule(int id) {
    expect_keyword("IF");
    ExprPtr antecedent = parse_disj();
    expect_keyword("THEN");
    const Token& var_tok = expect_ident("output variable name");
    expect_keyword("IS");
    const Token& term_tok = expect_ident("term name");

    const LinguisticVariable* var = nullptr;
    if (iequals(vocab_.output.name(), var_tok.text)) {
      var = &vocab_.output;
    } else if (vocab_.find_input(var_tok.text) != nullptr) {
      fail(var_tok, "consequent names input variable '" + var_tok.text + "'", ErrorKind::ConsequentIsInput);
    } else {
      fail(var_tok, "unknown variable '" + var_tok.text + "'", ErrorKind::UnknownVariable);
    }
    const auto* term = var->find_term(term_tok.text);
    if (term == nullptr) {
      fail(term_tok, "unknown term '" + term_tok.text + "' for variable '" + var->name() + "'", ErrorKind::UnknownTerm);
    }
    return Rule{id, std::move(antecedent), Consequent{var->name(), term->name}};
  }

  ExprPtr parse_disj() {
    ExprPtr lhs = parse_conj();
    while (is_keyword(peek(), "OR")) {
      advance();
      lhs = Expr::disj(std::move(lhs), parse_conj());
    }
    return lhs;
  }

  ExprPtr parse_conj() {
    ExprPtr lhs = parse_atom();
    while (is_keyword(peek(), "AND")) {
      advance();
      lhs = Expr::conj(std::move(lhs), parse_atom());
    }
    return lhs;
  }

  ExprPtr parse_atom() {
    if (peek().kind == Tok::LParen) {
      advance();
      ExprPtr inner = parse_disj();
      if (peek().kind != Tok::RParen) fail(peek(), "expected ')', found " + describe(peek()));
      advance();
      return inner;
    }
    const Token& var_tok = expect_ident("input variable name");
    const LinguisticVariable* var = vocab_.find_input(var_tok.text);
    if (var == nullptr) {
      const bool is_output = iequals(vocab_.output.name(), var_tok.text);
      fail(var_tok, (is_output ? "output variable '" : "unknown variable '") + var_tok.text + "' in antecedent",
           ErrorKind::UnknownVariable);
    }
    expect_keyword("IS");
    ExprPtr expr = bind_atom(*var, expect_ident("term name"));
    // "var is a OR b": the OR continues this atom unless the next word
    // starts a new "ident is" pair.
    while (is_keyword(peek(), "OR") && peek(1).kind == Tok::Ident && !is_reserved(peek(1)) &&
           !is_keyword(peek(2), "IS")) {
      advance();
      expr = Expr::disj(std::move(expr), bind_atom(*var, advance()));
    }
    return expr;
  }

  ExprPtr bind_atom(const LinguisticVariable& var, const Token& term_tok) const {
    const auto* term = var.find_term(term_tok.text);
    if (term == nullptr) {
      fail(term_tok, "unknown term '" + term_tok.text + "' for variable '" + var.name() + "'", ErrorKind::UnknownTerm);
    }
    return Expr::atom(var.name(), term->name);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Vocabulary& vocab_;
};

void serialize_into(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Expr::Op::Atom:
      out += e.variable();
      out += " IS ";
      out += e.term();
      return;
    case Expr::Op::And:
    case Expr::Op::Or:
      out += '(';
      serialize_into(e.lhs(), out);
      out += e.op() == Expr::Op::And ? " AND " : " OR ";
      serialize_into(e.rhs(), out);
      out += ')';
      return;
  }
}

}  // namespace

RuleBase::RuleBase(Vocabulary vocabulary, std::vector<Rule> rules)
    : vocabulary_(std::move(vocabulary)), rules_(std::move(rules)) {
  if (rules_.empty()) {
    throw Error(ErrorKind::EmptyRuleBase, "rule base needs at least one rule");
  }
  for (std::size_t i = 0; i < vocabulary_.inputs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (iequals(vocabulary_.inputs[i].name(), vocabulary_.inputs[j].name())) {
        throw Error(ErrorKind::InvalidVariable, "duplicate input variable '" + vocabulary_.inputs[i].name() + "'");
      }
    }
    if (iequals(vocabulary_.inputs[i].name(), vocabulary_.output.name())) {
      throw Error(ErrorKind::InvalidVariable, "variable '" + vocabulary_.output.name() + "' is both input and output");
    }
  }
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const Rule& r = rules_[i];
    if (r.id != static_cast<int>(i) + 1) {
      throw Error(ErrorKind::InvalidInput, "rule ids must be 1..n in order");
    }
    if (!r.antecedent) {
      throw Error(ErrorKind::InvalidInput, "rule " + std::to_string(r.id) + " has no antecedent");
    }
    check_bound(*r.antecedent, vocabulary_);
    if (vocabulary_.find_input(r.consequent.variable) != nullptr) {
      throw Error(ErrorKind::ConsequentIsInput, "consequent names input variable '" + r.consequent.variable + "'");
    }
    if (r.consequent.variable != vocabulary_.output.name()) {
      throw Error(ErrorKind::UnknownVariable, "unknown output variable '" + r.consequent.variable + "'");
    }
    const auto* term = vocabulary_.output.find_term(r.consequent.term);
    if (term == nullptr || term->name != r.consequent.term) {
      throw Error(ErrorKind::UnknownTerm, "unknown output term '" + r.consequent.term + "'");
    }
  }
}

RuleBase parse_rules(std::string_view source, const Vocabulary& vocabulary) {
  Parser parser(lex(source), vocabulary);
  auto rules = parser.parse_all();
  if (rules.empty()) {
    throw Error(ErrorKind::EmptyRuleBase, "rule source contains no rules");
  }
  return RuleBase(vocabulary, std::move(rules));
}

RuleBase matrix_to_rules(const RuleMatrix& m, const Vocabulary& vocabulary) {
  if (m.cells.size() != m.row_terms.size()) {
    throw Error(ErrorKind::DimensionMismatch, "matrix has " + std::to_string(m.cells.size()) + " rows, expected " +
                                                  std::to_string(m.row_terms.size()));
  }
  for (std::size_t r = 0; r < m.cells.size(); ++r) {
    if (m.cells[r].size() != m.col_terms.size()) {
      throw Error(ErrorKind::DimensionMismatch, "matrix row " + std::to_string(r + 1) + " has " +
                                                    std::to_string(m.cells[r].size()) + " cells, expected " +
                                                    std::to_string(m.col_terms.size()));
    }
  }
  const auto* row_var = vocabulary.find_input(m.row_var);
  const auto* col_var = vocabulary.find_input(m.col_var);
  if (row_var == nullptr) throw Error(ErrorKind::UnknownVariable, "unknown row variable '" + m.row_var + "'");
  if (col_var == nullptr) throw Error(ErrorKind::UnknownVariable, "unknown column variable '" + m.col_var + "'");
  if (vocabulary.find_input(m.out_var) != nullptr) {
    throw Error(ErrorKind::ConsequentIsInput, "matrix output names input variable '" + m.out_var + "'");
  }
  if (!iequals(vocabulary.output.name(), m.out_var)) {
    throw Error(ErrorKind::UnknownVariable, "unknown output variable '" + m.out_var + "'");
  }
  const auto resolve = [](const LinguisticVariable& var, const std::string& name) {
    const auto* t = var.find_term(name);
    if (t == nullptr) throw Error(ErrorKind::UnknownTerm, "unknown term '" + name + "' for variable '" + var.name() + "'");
    return t->name;
  };

  std::vector<Rule> rules;
  rules.reserve(m.row_terms.size() * m.col_terms.size());
  for (std::size_t r = 0; r < m.row_terms.size(); ++r) {
    const std::string row_term = resolve(*row_var, m.row_terms[r]);
    for (std::size_t c = 0; c < m.col_terms.size(); ++c) {
      auto antecedent =
          Expr::conj(Expr::atom(row_var->name(), row_term), Expr::atom(col_var->name(), resolve(*col_var, m.col_terms[c])));
      rules.push_back(Rule{static_cast<int>(rules.size()) + 1, std::move(antecedent),
                           Consequent{vocabulary.output.name(), resolve(vocabulary.output, m.cells[r][c])}});
    }
  }
  return RuleBase(vocabulary, std::move(rules));
}

std::string serialize_expr(const Expr& expr) {
  std::string out;
  serialize_into(expr, out);
  return out;
}

std::string serialize_rulebase(const RuleBase& rb) {
  std::string out;
  for (const auto& rule : rb.rules()) {
    out += "IF ";
    serialize_into(*rule.antecedent, out);
    out += " THEN ";
    out += rule.consequent.variable;
    out += " IS ";
    out += rule.consequent.term;
    out += '\n';
  }
  return out;
}

}  // namespace fltc
