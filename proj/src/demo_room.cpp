#include "fltc/demo_room.hpp"

#include <cmath>

#include "fltc/error.hpp"

namespace fltc::room {

namespace {

LinguisticVariable room_variable(std::string name) {
  using MF = MembershipFunction;
  return LinguisticVariable(std::move(name), kRoomLo, kRoomHi,
                            {
                                {"too-cold", MF::triangular(0.0, 0.0, 10.0)},
                                {"cold", MF::triangular(0.0, 10.0, 20.0)},
                                {"warm", MF::triangular(10.0, 20.0, 30.0)},
                                {"hot", MF::triangular(20.0, 30.0, 40.0)},
                                {"too-hot", MF::triangular(30.0, 40.0, 40.0)},
                            });
}

}  // namespace

Vocabulary vocabulary() {
  using MF = MembershipFunction;
  // The command universe is nominal; only the term identities matter.
  LinguisticVariable command("command", -1.0, 1.0,
                             {
                                 {"cool", MF::triangular(-1.0, -1.0, 0.0)},
                                 {"no-change", MF::triangular(-1.0, 0.0, 1.0)},
                                 {"heat", MF::triangular(0.0, 1.0, 1.0)},
                             });
  return Vocabulary{{room_variable("temperature"), room_variable("target")}, std::move(command)};
}

RuleMatrix command_matrix() {
  const std::vector<std::string> terms{"too-cold", "cold", "warm", "hot", "too-hot"};
  RuleMatrix m{"temperature", "target", "command", terms, terms, {}};
  for (std::size_t r = 0; r < terms.size(); ++r) {
    std::vector<std::string> row;
    for (std::size_t c = 0; c < terms.size(); ++c) {
      row.push_back(r == c ? "no-change" : c > r ? "heat" : "cool");
    }
    m.cells.push_back(std::move(row));
  }
  return m;
}

std::string sample_rules_text() {
  return "IF(temperature is cold OR too-cold)AND(target is warm)THEN command is heat\n"
         "IF(temperature is hot OR too-hot)AND(target is warm)THEN command is cool\n"
         "IF(temperature is warm)AND(target is warm)THEN command is heat\n";
}

FuzzyController controller() { return FuzzyController(matrix_to_rules(command_matrix(), vocabulary())); }

Decision decide(double temperature, double target) {
  for (double v : {temperature, target}) {
    if (!std::isfinite(v) || v < kRoomLo || v > kRoomHi) {
      throw Error(ErrorKind::InvalidInput, "room temperatures must lie in [0, 40] degC");
    }
  }
  static const FuzzyController ctl = controller();
  Decision d;
  d.trace = ctl.trace({{"temperature", temperature}, {"target", target}});
  d.commands = {{"heat", 0.0}, {"cool", 0.0}, {"no-change", 0.0}};
  for (const auto& a : d.trace.activations) {
    d.commands[a.consequent] = std::max(d.commands[a.consequent], a.weight.value());
  }
  d.command = "heat";
  d.degree = d.commands["heat"];
  for (const char* cmd : {"cool", "no-change"}) {
    if (d.commands[cmd] > d.degree) {
      d.command = cmd;
      d.degree = d.commands[cmd];
    }
  }
  return d;
}

}  // namespace fltc::room
