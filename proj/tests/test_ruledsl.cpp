#include <random>
#include <sstream>

#include "doctest.h"
#include "fltc/demo_room.hpp"
#include "fltc/error.hpp"
#include "fltc/inference.hpp"
#include "fltc/ruledsl.hpp"

using namespace fltc;

namespace {

Vocabulary fltc_vocab() { return {{build_fltc_input_variable()}, build_fltc_output_variable()}; }

ErrorKind kind_of(const std::string& src, const Vocabulary& vocab) {
  try {
    parse_rules(src, vocab);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a parse failure for: " << src);
  return ErrorKind::Internal;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// Random well-formed antecedent over the room vocabulary together with its
// expected tree. Rendering mixes keyword case, spacing and redundant parens.
struct Generated {
  std::string text;
  ExprPtr tree;
};

class RuleGenerator {
 public:
  explicit RuleGenerator(unsigned seed) : rng_(seed), vocab_(room::vocabulary()) {}

  Generated expr(int depth) {
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 3 : 0);
    switch (pick(rng_)) {
      case 0:
      case 1:
        return atom();
      case 2:
        return binary(depth, "AND");
      default:
        return binary(depth, "OR");
    }
  }

  std::string keyword(const std::string& kw) {
    std::string out = kw;
    for (auto& c : out) {
      if (std::bernoulli_distribution(0.5)(rng_)) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
  }

  const Vocabulary& vocab() const { return vocab_; }
  std::mt19937& rng() { return rng_; }

 private:
  Generated atom() {
    const auto& var = vocab_.inputs[std::uniform_int_distribution<std::size_t>(0, vocab_.inputs.size() - 1)(rng_)];
    const auto& term = var.terms()[std::uniform_int_distribution<std::size_t>(0, var.terms().size() - 1)(rng_)];
    return {var.name() + " " + keyword("IS") + " " + term.name, Expr::atom(var.name(), term.name)};
  }

  Generated binary(int depth, const std::string& op) {
    auto lhs = expr(depth - 1);
    auto rhs = expr(depth - 1);
    // Children are always parenthesized, so the generator never depends on
    // precedence; precedence has its own test.
    Generated g;
    g.text = "(" + lhs.text + ") " + keyword(op) + " (" + rhs.text + ")";
    g.tree = op == "AND" ? Expr::conj(lhs.tree, rhs.tree) : Expr::disj(lhs.tree, rhs.tree);
    return g;
  }

  std::mt19937 rng_;
  Vocabulary vocab_;
};

}  // namespace

TEST_CASE("first sample rule parses with the OR shorthand") {
  const auto rb = parse_rules("IF (temperature is cold OR too-cold) AND (target is warm) THEN command is heat",
                              room::vocabulary());
  REQUIRE(rb.rules().size() == 1);
  const auto& rule = rb.rules()[0];
  CHECK(rule.id == 1);
  const auto expected = Expr::conj(Expr::disj(Expr::atom("temperature", "cold"), Expr::atom("temperature", "too-cold")),
                                   Expr::atom("target", "warm"));
  CHECK(*rule.antecedent == *expected);
  CHECK(rule.consequent == Consequent{"command", "heat"});
}

TEST_CASE("single-atom rule and keyword case-insensitivity") {
  const auto rb = parse_rules("if error IS neg then PWM is z", fltc_vocab());
  REQUIRE(rb.rules().size() == 1);
  CHECK(*rb.rules()[0].antecedent == *Expr::atom("error", "NEG"));
  CHECK(rb.rules()[0].consequent == Consequent{"pwm", "Z"});
}

TEST_CASE("the three sample rules parse unspaced and bind declared casing") {
  const auto rb = parse_rules(room::sample_rules_text(), room::vocabulary());
  REQUIRE(rb.rules().size() == 3);
  CHECK(rb.rules()[0].consequent.term == "heat");
  CHECK(rb.rules()[1].consequent.term == "cool");
  CHECK(rb.rules()[2].consequent.term == "heat");
  CHECK(serialize_rulebase(rb) ==
        "IF ((temperature IS cold OR temperature IS too-cold) AND target IS warm) THEN command IS heat\n"
        "IF ((temperature IS hot OR temperature IS too-hot) AND target IS warm) THEN command IS cool\n"
        "IF (temperature IS warm AND target IS warm) THEN command IS heat\n");
}

TEST_CASE("comments, blank lines and semicolons separate rules") {
  const auto rb = parse_rules(
      "# header\n\nIF error is NEG THEN pwm is VH; IF error is ZERO THEN pwm is M  # trailing\n\n"
      "IF error is POZ THEN pwm is Z\n",
      fltc_vocab());
  CHECK(rb.rules().size() == 3);
  CHECK(rb.rules()[2].id == 3);
}

TEST_CASE("AND binds tighter than OR") {
  const auto vocab = room::vocabulary();
  const auto rb = parse_rules("IF temperature is cold OR target is warm AND temperature is hot THEN command is heat", vocab);
  const auto expected = Expr::disj(Expr::atom("temperature", "cold"),
                                   Expr::conj(Expr::atom("target", "warm"), Expr::atom("temperature", "hot")));
  CHECK(*rb.rules()[0].antecedent == *expected);

  const auto rb2 = parse_rules("IF temperature is cold AND target is warm OR temperature is hot THEN command is heat", vocab);
  const auto expected2 = Expr::disj(Expr::conj(Expr::atom("temperature", "cold"), Expr::atom("target", "warm")),
                                    Expr::atom("temperature", "hot"));
  CHECK(*rb2.rules()[0].antecedent == *expected2);
}

TEST_CASE("shorthand OR extends over several terms") {
  const auto rb = parse_rules("IF temperature is cold OR too-cold OR warm THEN command is heat", room::vocabulary());
  const auto expected =
      Expr::disj(Expr::disj(Expr::atom("temperature", "cold"), Expr::atom("temperature", "too-cold")),
                 Expr::atom("temperature", "warm"));
  CHECK(*rb.rules()[0].antecedent == *expected);
}

TEST_CASE("error kinds are distinct") {
  const Vocabulary empty{{}, build_fltc_output_variable()};
  CHECK(kind_of("IF x is foo THEN y is bar", empty) == ErrorKind::UnknownVariable);
  CHECK(kind_of("IF error is HUGE THEN pwm is Z", fltc_vocab()) == ErrorKind::UnknownTerm);
  CHECK(kind_of("IF error is NEG THEN pwm is HUGE", fltc_vocab()) == ErrorKind::UnknownTerm);
  CHECK(kind_of("IF error is NEG THEN error is ZERO", fltc_vocab()) == ErrorKind::ConsequentIsInput);
  CHECK(kind_of("IF error is NEG THEN fan is Z", fltc_vocab()) == ErrorKind::UnknownVariable);
  CHECK(kind_of("IF pwm is Z THEN pwm is Z", fltc_vocab()) == ErrorKind::UnknownVariable);
  CHECK(kind_of("IF error is NEG pwm is Z", fltc_vocab()) == ErrorKind::SyntaxError);
  CHECK(kind_of("IF (error is NEG THEN pwm is Z", fltc_vocab()) == ErrorKind::SyntaxError);
  CHECK(kind_of("IF error is NEG THEN pwm is Z extra", fltc_vocab()) == ErrorKind::SyntaxError);
  CHECK(kind_of("IF error is NEG THEN pwm is Z $", fltc_vocab()) == ErrorKind::SyntaxError);
  CHECK(kind_of("# nothing here\n", fltc_vocab()) == ErrorKind::EmptyRuleBase);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_rules("IF error is NEG THEN pwm is Z\nIF error is ZERO AND THEN pwm is M\n", fltc_vocab());
    FAIL("expected a syntax error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ErrorKind::SyntaxError);
    CHECK(e.line() == 2);
    CHECK(e.column() == 22);
    CHECK(std::string(e.what()).rfind("2:22: ", 0) == 0);
  }
}

TEST_CASE("unknown names are located too") {
  try {
    parse_rules("\n  IF error is TINY THEN pwm is Z", fltc_vocab());
    FAIL("expected an unknown-term error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ErrorKind::UnknownTerm);
    CHECK(e.line() == 2);
    CHECK(e.column() == 15);
  }
}

TEST_CASE("matrix expands to one rule per cell, row-major") {
  const auto rb = matrix_to_rules(room::command_matrix(), room::vocabulary());
  REQUIRE(rb.rules().size() == 25);
  for (int i = 0; i < 25; ++i) CHECK(rb.rules()[static_cast<std::size_t>(i)].id == i + 1);

  // Row "warm" (index 2), column "hot" (index 3).
  const auto& warm_hot = rb.rules()[2 * 5 + 3];
  CHECK(*warm_hot.antecedent == *Expr::conj(Expr::atom("temperature", "warm"), Expr::atom("target", "hot")));
  CHECK(warm_hot.consequent.term == "heat");

  for (std::size_t d = 0; d < 5; ++d) CHECK(rb.rules()[d * 5 + d].consequent.term == "no-change");

  const auto text = serialize_rulebase(rb);
  CHECK(line_count(text) == 25);
  CHECK(text.find("IF (temperature IS warm AND target IS hot) THEN command IS heat\n") != std::string::npos);
}

TEST_CASE("matrix edge cases") {
  const auto vocab = room::vocabulary();
  RuleMatrix one{"temperature", "target", "command", {"warm"}, {"hot"}, {{"heat"}}};
  CHECK(matrix_to_rules(one, vocab).rules().size() == 1);

  RuleMatrix ragged = room::command_matrix();
  ragged.cells[3].pop_back();
  CHECK_THROWS_WITH_AS(matrix_to_rules(ragged, vocab), doctest::Contains("row 4"), Error);

  RuleMatrix short_rows = room::command_matrix();
  short_rows.cells.pop_back();
  try {
    matrix_to_rules(short_rows, vocab);
    FAIL("expected dimension mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }

  RuleMatrix bad_cell = one;
  bad_cell.cells[0][0] = "blast";
  CHECK_THROWS_AS(matrix_to_rules(bad_cell, vocab), Error);
  RuleMatrix bad_var = one;
  bad_var.row_var = "humidity";
  CHECK_THROWS_AS(matrix_to_rules(bad_var, vocab), Error);
}

TEST_CASE("property: matrix rule count is rows x cols") {
  std::mt19937 rng(3);
  const auto vocab = room::vocabulary();
  const auto& terms = vocab.inputs[0].terms();
  std::uniform_int_distribution<std::size_t> n(1, 5);
  std::uniform_int_distribution<std::size_t> t(0, terms.size() - 1);
  const char* commands[] = {"heat", "cool", "no-change"};
  for (int trial = 0; trial < 50; ++trial) {
    RuleMatrix m{"temperature", "target", "command", {}, {}, {}};
    const auto rows = n(rng);
    const auto cols = n(rng);
    for (std::size_t r = 0; r < rows; ++r) m.row_terms.push_back(terms[t(rng)].name);
    for (std::size_t c = 0; c < cols; ++c) m.col_terms.push_back(terms[t(rng)].name);
    for (std::size_t r = 0; r < rows; ++r) {
      m.cells.emplace_back();
      for (std::size_t c = 0; c < cols; ++c) m.cells.back().push_back(commands[t(rng) % 3]);
    }
    CHECK(matrix_to_rules(m, vocab).rules().size() == rows * cols);
  }
}

TEST_CASE("property: parse is total over generated rules and matches the generator's tree") {
  RuleGenerator gen(42);
  const char* commands[] = {"heat", "cool", "no-change"};
  for (int i = 0; i < 500; ++i) {
    const auto g = gen.expr(4);
    const std::string cmd = commands[i % 3];
    const std::string src = gen.keyword("IF") + " " + g.text + " " + gen.keyword("THEN") + " command " +
                            gen.keyword("IS") + " " + cmd;
    RuleBase rb = parse_rules(src, gen.vocab());
    REQUIRE(rb.rules().size() == 1);
    CHECK(*rb.rules()[0].antecedent == *g.tree);
    CHECK(rb.rules()[0].consequent.term == cmd);
  }
}

TEST_CASE("property: parse(serialize(rb)) == rb") {
  RuleGenerator gen(99);
  const char* commands[] = {"heat", "cool", "no-change"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Rule> rules;
    const int n = 1 + trial % 7;
    for (int i = 0; i < n; ++i) {
      rules.push_back(Rule{i + 1, gen.expr(3).tree, Consequent{"command", commands[(trial + i) % 3]}});
    }
    const RuleBase rb(gen.vocab(), rules);
    const auto text = serialize_rulebase(rb);
    CHECK(line_count(text) == static_cast<std::size_t>(n));
    CHECK(parse_rules(text, gen.vocab()) == rb);
  }
}

TEST_CASE("serialized form is a fixed point") {
  const auto once = serialize_rulebase(parse_rules(room::sample_rules_text(), room::vocabulary()));
  const auto twice = serialize_rulebase(parse_rules(once, room::vocabulary()));
  CHECK(once == twice);
}

TEST_CASE("empty rule bases are unrepresentable") {
  CHECK_THROWS_AS(RuleBase(fltc_vocab(), {}), Error);
  std::vector<Rule> gap{Rule{2, Expr::atom("error", "NEG"), Consequent{"pwm", "Z"}}};
  CHECK_THROWS_AS(RuleBase(fltc_vocab(), gap), Error);
  std::vector<Rule> unbound{Rule{1, Expr::atom("error", "neg"), Consequent{"pwm", "Z"}}};
  CHECK_THROWS_AS(RuleBase(fltc_vocab(), unbound), Error);
}

TEST_CASE("the sample rule 3 disagrees with the matrix diagonal") {
  const auto text_rules = parse_rules(room::sample_rules_text(), room::vocabulary());
  const auto matrix_rules = matrix_to_rules(room::command_matrix(), room::vocabulary());
  const auto warm_warm = Expr::conj(Expr::atom("temperature", "warm"), Expr::atom("target", "warm"));
  CHECK(*text_rules.rules()[2].antecedent == *warm_warm);
  CHECK(text_rules.rules()[2].consequent.term == "heat");
  CHECK(*matrix_rules.rules()[12].antecedent == *warm_warm);
  CHECK(matrix_rules.rules()[12].consequent.term == "no-change");
}
