#pragma once

#include <cstdint>
#include <random>

namespace fltc {

/// Lumped-capacitance heater / plate / fan process with an LM35-style
/// sensor read through a uniform ADC.
struct PlantParams {
  double capacitance = 500.0;    ///< J/degC
  double heater_power = 200.0;   ///< W at full heater duty
  double loss_coeff = 2.0;       ///< W/degC, passive loss
  double fan_coeff = 6.0;        ///< W/degC, extra loss at full fan duty
  double ambient = 25.0;         ///< degC
  double sensor_noise_std = 0.0; ///< degC
  int adc_bits = 10;
  double adc_lo = 0.0;           ///< degC
  double adc_hi = 150.0;         ///< degC
  std::uint64_t seed = 0;

  /// Throws Error(InvalidConfig) naming the offending field.
  void validate() const;
  /// Largest dt for which explicit Euler stays stable at full fan.
  double max_stable_dt() const { return 2.0 * capacitance / (loss_coeff + fan_coeff); }
  /// Width of one ADC level.
  double adc_quantum() const;

  friend bool operator==(const PlantParams&, const PlantParams&) = default;
};

struct PlantState {
  double plate_temp = 25.0;  ///< degC
  double time = 0.0;         ///< s
};

using Rng = std::mt19937_64;

/// One explicit-Euler step of C dT/dt = P u_h - (k_loss + k_fan u_f)(T - T_amb).
/// Throws InvalidInput for duties outside [0, 1] and InvalidStep when
/// dt is not in (0, 2C/(k_loss + k_fan)).
PlantState step(const PlantParams& params, const PlantState& state, double heater_duty, double fan_duty, double dt);

/// Fixed point T_amb + P u_h / (k_loss + k_fan u_f). Throws NoEquilibrium
/// when the total loss coefficient is zero.
double equilibrium_temp(const PlantParams& params, double heater_duty, double fan_duty);

/// Plate temperature plus Gaussian noise, quantized to the nearest of the
/// 2^adc_bits levels spanning [adc_lo, adc_hi] and clamped to that range.
double read_sensor(const PlantParams& params, const PlantState& state, Rng& rng);

/// Owns the evolving state and the sensor's random generator.
class Plant {
 public:
  Plant(PlantParams params, double initial_temp);

  double read_sensor() { return fltc::read_sensor(params_, state_, rng_); }
  const PlantState& advance(double heater_duty, double fan_duty, double dt) {
    state_ = fltc::step(params_, state_, heater_duty, fan_duty, dt);
    return state_;
  }

  const PlantParams& params() const noexcept { return params_; }
  const PlantState& state() const noexcept { return state_; }

 private:
  PlantParams params_;
  PlantState state_;
  Rng rng_;
};

}  // namespace fltc
