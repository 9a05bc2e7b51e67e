#include "fltc/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fltc {

namespace {

std::string join_issues(const std::vector<FieldIssue>& issues) {
  std::string msg = "invalid configuration";
  for (const auto& i : issues) {
    msg += "; ";
    msg += (i.path.empty() ? "/" : i.path) + ": " + i.message;
  }
  return msg;
}

/// Collects field issues while walking a document; throws them together.
class Checker {
 public:
  void add(std::string path, std::string message) { issues_.push_back({std::move(path), std::move(message)}); }
  bool ok() const { return issues_.empty(); }
  void raise_if_any() const {
    if (!issues_.empty()) throw ConfigError(issues_);
  }

  bool object(const Json& doc, const std::string& path) {
    if (!doc.is_object()) {
      add(path, "expected an object");
      return false;
    }
    return true;
  }

  void allowed_keys(const Json& doc, const std::string& path, std::initializer_list<const char*> keys) {
    if (!doc.is_object()) return;
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, _] : doc.items()) {
      if (!allowed.count(key)) add(path + "/" + key, "unknown key");
    }
  }

  void number(const Json& doc, const std::string& path, const char* key, double& out) {
    if (!doc.contains(key)) return;
    const auto& v = doc.at(key);
    if (!v.is_number()) {
      add(path + "/" + key, "expected a number");
      return;
    }
    out = v.get<double>();
    if (!std::isfinite(out)) add(path + "/" + key, "must be finite");
  }

  template <class Int>
  void integer(const Json& doc, const std::string& path, const char* key, Int& out) {
    if (!doc.contains(key)) return;
    const auto& v = doc.at(key);
    if (!v.is_number_integer()) {
      add(path + "/" + key, "expected an integer");
      return;
    }
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_unsigned() || v.get<long long>() >= 0) {
        out = v.get<Int>();
      } else {
        add(path + "/" + key, "must be >= 0");
      }
    } else {
      out = v.get<Int>();
    }
  }

  std::string string(const Json& doc, const std::string& path, const char* key, bool required = true) {
    if (!doc.contains(key)) {
      if (required) add(path + "/" + key, "missing required field");
      return {};
    }
    const auto& v = doc.at(key);
    if (!v.is_string()) {
      add(path + "/" + key, "expected a string");
      return {};
    }
    return v.get<std::string>();
  }

  std::vector<double> numbers(const Json& v, const std::string& path) {
    std::vector<double> out;
    if (!v.is_array()) {
      add(path, "expected an array of numbers");
      return out;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        add(path + "/" + std::to_string(i), "expected a number");
        continue;
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::vector<std::string> strings(const Json& v, const std::string& path) {
    std::vector<std::string> out;
    if (!v.is_array()) {
      add(path, "expected an array of strings");
      return out;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) {
        add(path + "/" + std::to_string(i), "expected a string");
        continue;
      }
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }

 private:
  std::vector<FieldIssue> issues_;
};

Json points_json(const MembershipFunction& mf) {
  Json arr = Json::array();
  for (double p : mf.points()) arr.push_back(p);
  return arr;
}

}  // namespace

ConfigError::ConfigError(std::vector<FieldIssue> issues)
    : Error(ErrorKind::InvalidConfig, join_issues(issues)), issues_(std::move(issues)) {}

ConfigError::ConfigError(std::string path, std::string message)
    : ConfigError(std::vector<FieldIssue>{{std::move(path), std::move(message)}}) {}

std::string format_number(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

Json variable_to_json(const LinguisticVariable& var) {
  Json terms = Json::array();
  for (const auto& t : var.terms()) {
    terms.push_back(Json{{"name", t.name}, {"shape", std::string(t.mf.kind_name())}, {"points", points_json(t.mf)}});
  }
  return Json{{"name", var.name()}, {"universe", Json::array({var.lo(), var.hi()})}, {"terms", terms}};
}

LinguisticVariable variable_from_json(const Json& doc, const std::string& path) {
  Checker ck;
  if (!ck.object(doc, path)) ck.raise_if_any();
  ck.allowed_keys(doc, path, {"name", "universe", "terms"});
  const std::string name = ck.string(doc, path, "name");
  double lo = 0.0;
  double hi = 0.0;
  if (!doc.contains("universe")) {
    ck.add(path + "/universe", "missing required field");
  } else {
    const auto u = ck.numbers(doc.at("universe"), path + "/universe");
    if (u.size() == 2) {
      lo = u[0];
      hi = u[1];
    } else if (ck.ok()) {
      ck.add(path + "/universe", "expected [lo, hi]");
    }
  }
  std::vector<LinguisticTerm> terms;
  if (!doc.contains("terms") || !doc.at("terms").is_array()) {
    ck.add(path + "/terms", "expected an array of terms");
  } else {
    const auto& arr = doc.at("terms");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string tp = path + "/terms/" + std::to_string(i);
      const auto& t = arr[i];
      if (!ck.object(t, tp)) continue;
      ck.allowed_keys(t, tp, {"name", "shape", "points"});
      const std::string tname = ck.string(t, tp, "name");
      const std::string shape = ck.string(t, tp, "shape");
      if (!t.contains("points")) {
        ck.add(tp + "/points", "missing required field");
        continue;
      }
      const auto pts = ck.numbers(t.at("points"), tp + "/points");
      try {
        if (iequals(shape, "triangular")) {
          if (pts.size() != 3) {
            ck.add(tp + "/points", "triangular shape needs 3 points");
            continue;
          }
          terms.push_back({tname, MembershipFunction::triangular(pts[0], pts[1], pts[2])});
        } else if (iequals(shape, "trapezoidal")) {
          if (pts.size() != 4) {
            ck.add(tp + "/points", "trapezoidal shape needs 4 points");
            continue;
          }
          terms.push_back({tname, MembershipFunction::trapezoidal(pts[0], pts[1], pts[2], pts[3])});
        } else if (!shape.empty()) {
          ck.add(tp + "/shape", "expected \"triangular\" or \"trapezoidal\"");
        }
      } catch (const Error& e) {
        ck.add(tp + "/points", e.what());
      }
    }
  }
  ck.raise_if_any();
  try {
    return LinguisticVariable(name, lo, hi, std::move(terms));
  } catch (const Error& e) {
    throw ConfigError(path.empty() ? "/" : path, e.what());
  }
}

Json vocabulary_to_json(const Vocabulary& vocab) {
  Json inputs = Json::array();
  for (const auto& v : vocab.inputs) inputs.push_back(variable_to_json(v));
  return Json{{"inputs", inputs}, {"output", variable_to_json(vocab.output)}};
}

namespace {

Vocabulary vocabulary_part(const Json& doc, const std::string& path) {
  Checker ck;
  if (!ck.object(doc, path)) ck.raise_if_any();
  if (!doc.contains("inputs") || !doc.at("inputs").is_array() || doc.at("inputs").empty()) {
    ck.add(path + "/inputs", "expected a nonempty array of variables");
  }
  if (!doc.contains("output")) ck.add(path + "/output", "missing required field");
  ck.raise_if_any();
  std::vector<LinguisticVariable> inputs;
  std::vector<FieldIssue> issues;
  const auto& arr = doc.at("inputs");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    try {
      inputs.push_back(variable_from_json(arr[i], path + "/inputs/" + std::to_string(i)));
    } catch (const ConfigError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
  }
  std::optional<LinguisticVariable> output;
  try {
    output = variable_from_json(doc.at("output"), path + "/output");
  } catch (const ConfigError& e) {
    issues.insert(issues.end(), e.issues().begin(), e.issues().end());
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return Vocabulary{std::move(inputs), std::move(*output)};
}

}  // namespace

Vocabulary vocabulary_from_json(const Json& doc, const std::string& path) {
  Checker ck;
  if (ck.object(doc, path)) ck.allowed_keys(doc, path, {"inputs", "output"});
  ck.raise_if_any();
  return vocabulary_part(doc, path);
}

RuleMatrix matrix_from_json(const Json& doc, const Vocabulary& vocab, const std::string& path) {
  Checker ck;
  if (!ck.object(doc, path)) ck.raise_if_any();
  ck.allowed_keys(doc, path, {"rows", "cols", "out", "cells", "row_var", "col_var"});
  RuleMatrix m;
  m.out_var = ck.string(doc, path, "out");
  m.row_var = ck.string(doc, path, "row_var", false);
  m.col_var = ck.string(doc, path, "col_var", false);
  if (m.row_var.empty() && !vocab.inputs.empty()) m.row_var = vocab.inputs[0].name();
  if (m.col_var.empty()) {
    if (vocab.inputs.size() >= 2) {
      m.col_var = vocab.inputs[1].name();
    } else {
      ck.add(path + "/col_var", "vocabulary has no second input variable");
    }
  }
  if (doc.contains("rows")) m.row_terms = ck.strings(doc.at("rows"), path + "/rows");
  else ck.add(path + "/rows", "missing required field");
  if (doc.contains("cols")) m.col_terms = ck.strings(doc.at("cols"), path + "/cols");
  else ck.add(path + "/cols", "missing required field");
  if (!doc.contains("cells") || !doc.at("cells").is_array()) {
    ck.add(path + "/cells", "expected an array of rows");
  } else {
    const auto& cells = doc.at("cells");
    for (std::size_t r = 0; r < cells.size(); ++r) {
      m.cells.push_back(ck.strings(cells[r], path + "/cells/" + std::to_string(r)));
    }
  }
  ck.raise_if_any();
  return m;
}

Json matrix_to_json(const RuleMatrix& m) {
  Json cells = Json::array();
  for (const auto& row : m.cells) cells.push_back(row);
  return Json{{"row_var", m.row_var}, {"col_var", m.col_var}, {"rows", m.row_terms},
              {"cols", m.col_terms},   {"out", m.out_var},         {"cells", cells}};
}

Json controller_to_json(const FuzzyController& ctl) {
  Json doc = vocabulary_to_json(ctl.rulebase().vocabulary());
  Json lines = Json::array();
  std::istringstream text(serialize_rulebase(ctl.rulebase()));
  for (std::string line; std::getline(text, line);) lines.push_back(line);
  doc["rules"] = lines;
  if (!ctl.peak_overrides().empty()) {
    Json peaks = Json::object();
    for (const auto& [k, v] : ctl.peak_overrides()) peaks[k] = v;
    doc["peaks"] = peaks;
  }
  return doc;
}

FuzzyController controller_from_json(const Json& doc, const std::string& path) {
  Checker ck;
  if (!ck.object(doc, path)) ck.raise_if_any();
  ck.allowed_keys(doc, path, {"inputs", "output", "rules", "matrix", "peaks"});
  const bool has_rules = doc.contains("rules");
  const bool has_matrix = doc.contains("matrix");
  if (has_rules == has_matrix) ck.add(path + "/rules", "exactly one of \"rules\" or \"matrix\" is required");
  std::map<std::string, double> peaks;
  if (doc.contains("peaks")) {
    const auto& p = doc.at("peaks");
    if (!p.is_object()) {
      ck.add(path + "/peaks", "expected an object of term -> number");
    } else {
      for (const auto& [k, v] : p.items()) {
        if (v.is_number()) peaks[k] = v.get<double>();
        else ck.add(path + "/peaks/" + k, "expected a number");
      }
    }
  }
  ck.raise_if_any();

  Vocabulary vocab = vocabulary_part(doc, path);
  try {
    if (has_matrix) {
      return FuzzyController(matrix_to_rules(matrix_from_json(doc.at("matrix"), vocab, path + "/matrix"), vocab), peaks);
    }
    const auto& r = doc.at("rules");
    std::string source;
    if (r.is_string()) {
      source = r.get<std::string>();
    } else if (r.is_array()) {
      for (const auto& line : ck.strings(r, path + "/rules")) source += line + "\n";
      ck.raise_if_any();
    } else {
      throw ConfigError(path + "/rules", "expected rule text or an array of rule lines");
    }
    return FuzzyController(parse_rules(source, vocab), peaks);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    const std::string where = path + (has_matrix ? "/matrix" : doc.contains("peaks") && e.kind() == ErrorKind::UnknownTerm
                                                                  ? "/peaks"
                                                                  : "/rules");
    throw ConfigError(where, e.what());
  }
}

Json plant_to_json(const PlantParams& p) {
  return Json{{"capacitance", p.capacitance},
              {"heater_power", p.heater_power},
              {"loss_coeff", p.loss_coeff},
              {"fan_coeff", p.fan_coeff},
              {"ambient", p.ambient},
              {"sensor_noise_std", p.sensor_noise_std},
              {"adc_bits", p.adc_bits},
              {"adc_range", Json::array({p.adc_lo, p.adc_hi})},
              {"seed", p.seed}};
}

PlantParams plant_from_json(const Json& doc, const std::string& path) {
  Checker ck;
  PlantParams p;
  if (!ck.object(doc, path)) ck.raise_if_any();
  ck.allowed_keys(doc, path, {"capacitance", "heater_power", "loss_coeff", "fan_coeff", "ambient", "sensor_noise_std",
                              "adc_bits", "adc_range", "seed"});
  ck.number(doc, path, "capacitance", p.capacitance);
  ck.number(doc, path, "heater_power", p.heater_power);
  ck.number(doc, path, "loss_coeff", p.loss_coeff);
  ck.number(doc, path, "fan_coeff", p.fan_coeff);
  ck.number(doc, path, "ambient", p.ambient);
  ck.number(doc, path, "sensor_noise_std", p.sensor_noise_std);
  ck.integer(doc, path, "adc_bits", p.adc_bits);
  ck.integer(doc, path, "seed", p.seed);
  if (doc.contains("adc_range")) {
    const auto r = ck.numbers(doc.at("adc_range"), path + "/adc_range");
    if (r.size() == 2) {
      p.adc_lo = r[0];
      p.adc_hi = r[1];
    } else {
      ck.add(path + "/adc_range", "expected [lo, hi]");
    }
  }
  ck.raise_if_any();
  try {
    p.validate();
  } catch (const Error& e) {
    // validate() reports "plant.<field>: message"
    std::string msg = e.what();
    const auto dot = msg.find('.');
    const auto colon = msg.find(": ");
    const std::string field = (dot != std::string::npos && colon != std::string::npos) ? msg.substr(dot + 1, colon - dot - 1) : "";
    throw ConfigError(path + "/" + field, colon != std::string::npos ? msg.substr(colon + 2) : msg);
  }
  return p;
}

Json trace_to_json(const InferenceTrace& tr) {
  Json inputs = Json::object();
  for (const auto& [name, in] : tr.inputs) {
    inputs[name] = Json{{"value", in.value}, {"used", in.used}, {"clamped", in.clamped()}};
  }
  Json fuzzified = Json::object();
  for (const auto& [name, degrees] : tr.fuzzified) {
    Json d = Json::object();
    for (const auto& [term, mu] : degrees) d[term] = mu.value();
    fuzzified[name] = d;
  }
  Json acts = Json::array();
  for (const auto& a : tr.activations) {
    acts.push_back(Json{{"rule", a.rule_id}, {"consequent", a.consequent}, {"weight", a.weight.value()}, {"peak", a.peak}});
  }
  return Json{{"inputs", inputs},
              {"fuzzified", fuzzified},
              {"activations", acts},
              {"output", tr.output ? Json(*tr.output) : Json(nullptr)}};
}

Json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", what + ": malformed JSON (" + std::string(e.what()) + ")");
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json read_json_file(const std::string& path) { return parse_json_text(read_text_file(path), path); }

}  // namespace fltc
