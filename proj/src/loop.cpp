#include "fltc/loop.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "fltc/pwm.hpp"

namespace fltc {

namespace {

constexpr const char* kErrorInput = "error";

void check(std::vector<FieldIssue>& issues, bool ok, const char* path, const char* message) {
  if (!ok) issues.push_back({path, message});
}

}  // namespace

void LoopConfig::validate() const {
  std::vector<FieldIssue> issues;
  check(issues, std::isfinite(setpoint), "/loop/setpoint", "must be finite");
  check(issues, std::isfinite(initial_temp), "/loop/initial_temp", "must be finite");
  check(issues, std::isfinite(sample_period) && sample_period > 0.0, "/loop/sample_period", "must be > 0");
  check(issues, std::isfinite(duration) && duration >= sample_period, "/loop/duration", "must be >= sample_period");
  check(issues, std::isfinite(settling_band) && settling_band > 0.0, "/loop/settling_band", "must be > 0");
  try {
    plant.validate();
    check(issues, sample_period < plant.max_stable_dt(), "/loop/sample_period",
          "violates the plant stability bound 2C/(k_loss + k_fan)");
  } catch (const Error& e) {
    issues.push_back({"/plant", e.what()});
  }
  const auto& inputs = controller.rulebase().inputs();
  check(issues, inputs.size() == 1 && iequals(inputs.front().name(), kErrorInput), "/controller/inputs",
        "the loop drives exactly one input variable named \"error\"");
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

std::size_t LoopConfig::frame_count() const {
  return static_cast<std::size_t>(std::floor(duration / sample_period + 1e-9));
}

Json config_to_json(const LoopConfig& c) {
  return Json{{"controller", controller_to_json(c.controller)},
              {"plant", plant_to_json(c.plant)},
              {"loop",
               {{"setpoint", c.setpoint},
                {"sample_period", c.sample_period},
                {"duration", c.duration},
                {"initial_temp", c.initial_temp},
                {"settling_band", c.settling_band}}}};
}

LoopConfig config_from_json(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("/", "expected an object");
  std::vector<FieldIssue> issues;
  for (const auto& [key, _] : doc.items()) {
    if (key != "controller" && key != "plant" && key != "loop" && key != "service") {
      issues.push_back({"/" + key, "unknown key"});
    }
  }
  LoopConfig c;
  auto collect = [&](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
  };
  if (doc.contains("controller")) collect([&] { c.controller = controller_from_json(doc.at("controller"), "/controller"); });
  if (doc.contains("plant")) collect([&] { c.plant = plant_from_json(doc.at("plant"), "/plant"); });
  if (doc.contains("loop")) {
    const auto& l = doc.at("loop");
    if (!l.is_object()) {
      issues.push_back({"/loop", "expected an object"});
    } else {
      const std::pair<const char*, double*> fields[] = {{"setpoint", &c.setpoint},
                                                        {"sample_period", &c.sample_period},
                                                        {"duration", &c.duration},
                                                        {"initial_temp", &c.initial_temp},
                                                        {"settling_band", &c.settling_band}};
      for (const auto& [key, v] : l.items()) {
        const auto it = std::find_if(std::begin(fields), std::end(fields), [&](const auto& f) { return key == f.first; });
        if (it == std::end(fields)) {
          issues.push_back({"/loop/" + key, "unknown key"});
        } else if (!v.is_number()) {
          issues.push_back({"/loop/" + key, "expected a number"});
        } else {
          *it->second = v.get<double>();
        }
      }
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  c.validate();
  return c;
}

LoopConfig default_config() { return LoopConfig{}; }

StepResult loop_step(const LoopConfig& config, const PlantState& state, Rng& rng, const TelemetryFrame* prev) {
  TelemetryFrame f;
  f.index = prev ? prev->index + 1 : 0;
  f.t = state.time;
  f.setpoint = config.setpoint;
  f.sensed = read_sensor(config.plant, state, rng);
  f.error = f.setpoint - f.sensed;
  f.trace = config.controller.trace({{config.controller.rulebase().inputs().front().name(), f.error}});
  if (f.trace.output) {
    f.defuzz = *f.trace.output;
    f.fan_duty = duty_from_level(f.defuzz);
    f.heater_duty = 1.0 - f.fan_duty;
  } else {
    f.held = true;
    if (prev) {
      f.defuzz = prev->defuzz;
      f.fan_duty = prev->fan_duty;
      f.heater_duty = prev->heater_duty;
    }
  }
  PlantState next = step(config.plant, state, f.heater_duty, f.fan_duty, config.sample_period);
  return StepResult{std::move(f), next};
}

RunSummary summarize(const std::vector<TelemetryFrame>& frames, double band) {
  RunSummary s;
  s.band = band;
  if (frames.empty()) return s;
  s.overshoot = -std::numeric_limits<double>::infinity();
  for (const auto& f : frames) s.overshoot = std::max(s.overshoot, f.sensed - f.setpoint);

  std::size_t k = frames.size();
  while (k > 0 && std::abs(frames[k - 1].sensed - frames[k - 1].setpoint) <= band) --k;
  if (k < frames.size()) {
    s.settling_time = frames[k].t;
    double worst = 0.0;
    for (std::size_t i = k; i < frames.size(); ++i) worst = std::max(worst, std::abs(frames[i].error));
    s.steady_state_error = worst;
  }
  return s;
}

ControlLoop::ControlLoop(LoopConfig config)
    : config_(std::move(config)),
      initial_setpoint_(config_.setpoint),
      state_{config_.initial_temp, 0.0},
      rng_(config_.plant.seed) {
  config_.validate();
  frames_.reserve(config_.frame_count());
}

const TelemetryFrame& ControlLoop::step() {
  if (pending_setpoint_) {
    config_.setpoint = *pending_setpoint_;
    pending_setpoint_.reset();
  }
  auto result = loop_step(config_, state_, rng_, frames_.empty() ? nullptr : &frames_.back());
  state_ = result.state;
  frames_.push_back(std::move(result.frame));
  return frames_.back();
}

RunRecord ControlLoop::record() const {
  RunRecord r{config_, frames_, summarize(frames_, config_.settling_band)};
  r.config.setpoint = initial_setpoint_;
  return r;
}

RunRecord run(const LoopConfig& config) {
  ControlLoop loop(config);
  while (!loop.finished()) loop.step();
  return loop.record();
}

std::vector<std::string> csv_columns(const FuzzyController& controller) {
  std::vector<std::string> cols{"t", "setpoint", "sensed", "error", "defuzz", "fan_duty", "heater_duty"};
  const auto& inputs = controller.rulebase().inputs();
  for (const auto& var : inputs) {
    for (const auto& term : var.terms()) {
      cols.push_back(inputs.size() == 1 ? "mu_" + term.name : "mu_" + var.name() + "_" + term.name);
    }
  }
  return cols;
}

Json frame_to_json(const TelemetryFrame& f) {
  return Json{{"index", f.index},           {"t", f.t},
              {"setpoint", f.setpoint},     {"sensed", f.sensed},
              {"error", f.error},           {"defuzz", f.defuzz},
              {"fan_duty", f.fan_duty},     {"heater_duty", f.heater_duty},
              {"held", f.held},             {"trace", trace_to_json(f.trace)}};
}

Json record_to_json(const RunRecord& r) {
  Json frames = Json::array();
  for (const auto& f : r.frames) frames.push_back(frame_to_json(f));
  const auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"seed", r.config.plant.seed},
              {"config", config_to_json(r.config)},
              {"summary",
               {{"frames", r.frames.size()},
                {"band", r.summary.band},
                {"settling_time", opt(r.summary.settling_time)},
                {"overshoot", r.frames.empty() ? Json(nullptr) : Json(r.summary.overshoot)},
                {"steady_state_error", opt(r.summary.steady_state_error)}}},
              {"frames", frames}};
}

void write_trace(const RunRecord& record, TraceFormat format, std::ostream& out) {
  if (format == TraceFormat::Json) {
    out << record_to_json(record).dump(2) << '\n';
    return;
  }
  const auto cols = csv_columns(record.config.controller);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  const auto& inputs = record.config.controller.rulebase().inputs();
  for (const auto& f : record.frames) {
    out << format_number(f.t) << ',' << format_number(f.setpoint) << ',' << format_number(f.sensed) << ','
        << format_number(f.error) << ',' << format_number(f.defuzz) << ',' << format_number(f.fan_duty) << ','
        << format_number(f.heater_duty);
    for (const auto& var : inputs) {
      const auto& degrees = f.trace.fuzzified.at(var.name());
      for (const auto& term : var.terms()) out << ',' << format_number(degrees.at(term.name).value());
    }
    out << '\n';
  }
}

void write_trace(const RunRecord& record, TraceFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  write_trace(record, format, out);
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "failed while writing '" + path + "'");
}

}  // namespace fltc
