#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fltc/config.hpp"
#include "fltc/inference.hpp"
#include "fltc/plant.hpp"

namespace fltc {

struct LoopConfig {
  double setpoint = 45.0;       ///< degC
  double sample_period = 1.0;   ///< s
  double duration = 600.0;      ///< s
  double initial_temp = 25.0;   ///< degC
  double settling_band = 1.0;   ///< degC
  FuzzyController controller = build_fltc_controller();
  PlantParams plant;

  /// Throws ConfigError with field paths under "/loop" and "/plant".
  void validate() const;
  std::size_t frame_count() const;
};

/// Run configuration document: { "controller", "plant", "loop" }.
/// Missing sections take their defaults.
Json config_to_json(const LoopConfig& config);
LoopConfig config_from_json(const Json& doc);
/// The canonical configuration, as emitted by `fltc default-config`.
LoopConfig default_config();

struct TelemetryFrame {
  std::size_t index = 0;
  double t = 0.0;
  double setpoint = 0.0;
  double sensed = 0.0;
  double error = 0.0;
  double defuzz = 0.0;
  double fan_duty = 0.0;
  double heater_duty = 0.0;
  /// Set when no rule fired and the previous duties were held.
  bool held = false;
  InferenceTrace trace;
};

struct StepResult {
  TelemetryFrame frame;
  PlantState state;
};

/// Sense, infer, actuate and advance the plant by one sample period.
/// fan = defuzz / 255, heater = 1 - fan. When no rule fires the previous
/// frame's duties are held (0 / 0 on the first frame) and `held` is set.
StepResult loop_step(const LoopConfig& config, const PlantState& state, Rng& rng,
                     const TelemetryFrame* prev = nullptr);

struct RunSummary {
  double band = 1.0;
  /// First frame time after which |sensed - setpoint| <= band for good.
  std::optional<double> settling_time;
  /// max(sensed - setpoint) over the run.
  double overshoot = 0.0;
  /// max |error| over the settled tail, when settled.
  std::optional<double> steady_state_error;
};

RunSummary summarize(const std::vector<TelemetryFrame>& frames, double band);

struct RunRecord {
  LoopConfig config;
  std::vector<TelemetryFrame> frames;
  RunSummary summary;
};

/// Stepwise form of run(): owns the plant and applies setpoint changes
/// at the next sample boundary.
class ControlLoop {
 public:
  /// Validates the configuration up front.
  explicit ControlLoop(LoopConfig config);

  const TelemetryFrame& step();
  void set_setpoint(double setpoint) { pending_setpoint_ = setpoint; }

  bool finished() const { return frames_.size() >= config_.frame_count(); }
  const std::vector<TelemetryFrame>& frames() const noexcept { return frames_; }
  const LoopConfig& config() const noexcept { return config_; }
  const PlantState& plant_state() const noexcept { return state_; }
  double setpoint() const noexcept { return config_.setpoint; }

  /// Record of the frames produced so far.
  RunRecord record() const;

 private:
  LoopConfig config_;
  double initial_setpoint_;
  PlantState state_;
  Rng rng_;
  std::optional<double> pending_setpoint_;
  std::vector<TelemetryFrame> frames_;
};

/// duration / sample_period frames from the configured initial state.
RunRecord run(const LoopConfig& config);

enum class TraceFormat { Csv, Json };

/// Column names of the CSV trace for a controller.
std::vector<std::string> csv_columns(const FuzzyController& controller);

Json frame_to_json(const TelemetryFrame& frame);
Json record_to_json(const RunRecord& record);

void write_trace(const RunRecord& record, TraceFormat format, std::ostream& out);
/// Throws Error(Io) naming the path when it cannot be written.
void write_trace(const RunRecord& record, TraceFormat format, const std::string& path);

}  // namespace fltc
