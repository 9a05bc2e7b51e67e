#include "fltc/pwm.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "fltc/error.hpp"

namespace fltc {

PwmCommand::PwmCommand(double duty, double period, int resolution)
    : duty_(duty), period_(period), resolution_(resolution) {
  if (!(duty >= 0.0 && duty <= 1.0)) throw Error(ErrorKind::InvalidInput, "duty must lie in [0, 1]");
  if (!(period > 0.0) || !std::isfinite(period)) throw Error(ErrorKind::InvalidInput, "period must be positive");
  if (resolution < 1) throw Error(ErrorKind::InvalidInput, "resolution must be at least 1");
}

int PwmCommand::on_slots() const noexcept {
  const auto n = static_cast<int>(std::floor(duty_ * resolution_ + 0.5));
  return std::clamp(n, 0, resolution_);
}

double duty_from_level(double level) {
  if (std::isnan(level)) throw Error(ErrorKind::InvalidInput, "PWM level is NaN");
  return std::clamp(level, 0.0, kPwmFullScale) / kPwmFullScale;
}

std::vector<bool> synthesize(const PwmCommand& cmd) {
  std::vector<bool> wave(static_cast<std::size_t>(cmd.resolution()), false);
  std::fill_n(wave.begin(), cmd.on_slots(), true);
  return wave;
}

double measure_duty(const std::vector<bool>& wave) {
  if (wave.empty()) throw Error(ErrorKind::InvalidInput, "cannot measure an empty waveform");
  const auto on = std::count(wave.begin(), wave.end(), true);
  return static_cast<double>(on) / static_cast<double>(wave.size());
}

void write_waveform_csv(const std::vector<bool>& wave, std::ostream& out) {
  out << "slot_index,state\n";
  for (std::size_t i = 0; i < wave.size(); ++i) {
    out << i << ',' << (wave[i] ? 1 : 0) << '\n';
  }
}

}  // namespace fltc
