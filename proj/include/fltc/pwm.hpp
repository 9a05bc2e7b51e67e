#pragma once

#include <iosfwd>
#include <vector>

namespace fltc {

/// Full-scale PWM level of the 8-bit output universe.
inline constexpr double kPwmFullScale = 255.0;

class PwmCommand {
 public:
  /// Throws Error(InvalidInput) unless 0 <= duty <= 1, period > 0, resolution >= 1.
  PwmCommand(double duty, double period, int resolution);

  double duty() const noexcept { return duty_; }
  double period() const noexcept { return period_; }
  int resolution() const noexcept { return resolution_; }
  double on_time() const noexcept { return duty_ * period_; }
  /// Number of ON slots: duty * resolution rounded half-up.
  int on_slots() const noexcept;

 private:
  double duty_;
  double period_;
  int resolution_;
};

/// level / 255 after clamping level into [0, 255].
double duty_from_level(double level);

/// One period, leading-edge aligned: ON slots first, then OFF.
std::vector<bool> synthesize(const PwmCommand& cmd);

/// Fraction of ON slots. Throws Error(InvalidInput) on an empty wave.
double measure_duty(const std::vector<bool>& wave);

/// "slot_index,state" CSV with a header row.
void write_waveform_csv(const std::vector<bool>& wave, std::ostream& out);

}  // namespace fltc
