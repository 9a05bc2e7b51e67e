#include "fltc/plant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fltc/error.hpp"

namespace fltc {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidConfig, std::string("plant.") + field + ": " + what);
}

void check_duty(double u, const char* which) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw Error(ErrorKind::InvalidInput, std::string(which) + " duty must lie in [0, 1]");
  }
}

}  // namespace

void PlantParams::validate() const {
  require(std::isfinite(capacitance) && capacitance > 0.0, "capacitance", "must be > 0");
  require(std::isfinite(heater_power) && heater_power > 0.0, "heater_power", "must be > 0");
  require(std::isfinite(loss_coeff) && loss_coeff >= 0.0, "loss_coeff", "must be >= 0");
  require(std::isfinite(fan_coeff) && fan_coeff >= 0.0, "fan_coeff", "must be >= 0");
  require(std::isfinite(ambient), "ambient", "must be finite");
  require(std::isfinite(sensor_noise_std) && sensor_noise_std >= 0.0, "sensor_noise_std", "must be >= 0");
  require(adc_bits >= 1 && adc_bits <= 16, "adc_bits", "must lie in [1, 16]");
  require(std::isfinite(adc_lo) && std::isfinite(adc_hi) && adc_lo < adc_hi, "adc_range", "requires lo < hi");
}

double PlantParams::adc_quantum() const {
  return (adc_hi - adc_lo) / static_cast<double>((1u << adc_bits) - 1u);
}

PlantState step(const PlantParams& p, const PlantState& s, double heater_duty, double fan_duty, double dt) {
  check_duty(heater_duty, "heater");
  check_duty(fan_duty, "fan");
  const double k_total = p.loss_coeff + p.fan_coeff;
  if (!(dt > 0.0) || (k_total > 0.0 && !(dt < p.max_stable_dt()))) {
    throw Error(ErrorKind::InvalidStep, "time step " + std::to_string(dt) + " s outside (0, " +
                                            std::to_string(p.max_stable_dt()) + ")");
  }
  const double heat_in = p.heater_power * heater_duty;
  const double heat_out = (p.loss_coeff + p.fan_coeff * fan_duty) * (s.plate_temp - p.ambient);
  return PlantState{s.plate_temp + dt * (heat_in - heat_out) / p.capacitance, s.time + dt};
}

double equilibrium_temp(const PlantParams& p, double heater_duty, double fan_duty) {
  check_duty(heater_duty, "heater");
  check_duty(fan_duty, "fan");
  const double k = p.loss_coeff + p.fan_coeff * fan_duty;
  if (!(k > 0.0)) {
    throw Error(ErrorKind::NoEquilibrium, "total loss coefficient is zero; temperature grows without bound");
  }
  return p.ambient + p.heater_power * heater_duty / k;
}

double read_sensor(const PlantParams& p, const PlantState& s, Rng& rng) {
  double t = s.plate_temp;
  if (p.sensor_noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, p.sensor_noise_std);
    t += noise(rng);
  }
  const double q = p.adc_quantum();
  const double max_level = static_cast<double>((1u << p.adc_bits) - 1u);
  const double level = std::clamp(std::round((t - p.adc_lo) / q), 0.0, max_level);
  return p.adc_lo + level * q;
}

Plant::Plant(PlantParams params, double initial_temp)
    : params_(params), state_{initial_temp, 0.0}, rng_(params.seed) {
  params_.validate();
  if (!std::isfinite(initial_temp)) throw Error(ErrorKind::InvalidConfig, "initial_temp must be finite");
}

}  // namespace fltc
