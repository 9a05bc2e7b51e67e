#include <cmath>
#include <random>

#include "doctest.h"
#include "fltc/error.hpp"
#include "fltc/plant.hpp"

using namespace fltc;

namespace {

// Parameter set with an 8 W/degC fan, used by the arithmetic examples.
PlantParams reference_params() {
  PlantParams p;
  p.capacitance = 500.0;
  p.heater_power = 200.0;
  p.loss_coeff = 2.0;
  p.fan_coeff = 8.0;
  p.ambient = 25.0;
  return p;
}

double simulate(const PlantParams& p, double t0, double uh, double uf, double dt, double horizon) {
  PlantState s{t0, 0.0};
  const auto steps = static_cast<long>(std::llround(horizon / dt));
  for (long i = 0; i < steps; ++i) s = step(p, s, uh, uf, dt);
  return s.plate_temp;
}

}  // namespace

TEST_CASE("ambient is an equilibrium without actuation") {
  const auto p = reference_params();
  const auto s = step(p, PlantState{25.0, 0.0}, 0.0, 0.0, 1.0);
  CHECK(s.plate_temp == 25.0);
  CHECK(s.time == 1.0);
}

TEST_CASE("pure decay moves strictly toward ambient") {
  const auto p = reference_params();
  for (double uf : {0.0, 0.5, 1.0}) {
    const auto s = step(p, PlantState{80.0, 0.0}, 0.0, uf, 1.0);
    CHECK(s.plate_temp < 80.0);
    CHECK(s.plate_temp > 25.0);
  }
}

TEST_CASE("full heater from ambient for one second") {
  const auto s = step(reference_params(), PlantState{25.0, 0.0}, 1.0, 0.0, 1.0);
  CHECK(s.plate_temp == doctest::Approx(25.4));
}

TEST_CASE("step preconditions") {
  const auto p = reference_params();
  const PlantState s{30.0, 0.0};
  CHECK_THROWS_AS(step(p, s, 1.2, 0.0, 1.0), Error);
  CHECK_THROWS_AS(step(p, s, 0.5, -0.1, 1.0), Error);
  CHECK_THROWS_AS(step(p, s, 0.5, 0.5, 0.0), Error);
  // 2C / (k_loss + k_fan) = 100 s
  CHECK(p.max_stable_dt() == 100.0);
  try {
    step(p, s, 0.5, 0.5, 100.0);
    FAIL("expected invalid step");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidStep);
  }
  CHECK_NOTHROW(step(p, s, 0.5, 0.5, 99.0));
}

TEST_CASE("equilibrium temperature") {
  const auto p = reference_params();
  for (double uf : {0.0, 0.3, 1.0}) CHECK(equilibrium_temp(p, 0.0, uf) == 25.0);
  CHECK(equilibrium_temp(p, 0.49, 0.51) == doctest::Approx(25.0 + 98.0 / 6.08));
  CHECK(equilibrium_temp(p, 0.49, 0.51) == doctest::Approx(41.118).epsilon(1e-4));

  // Shipped defaults put the 50/50 operating point on 45 degC.
  const PlantParams defaults;
  CHECK(equilibrium_temp(defaults, 0.5, 0.5) == doctest::Approx(45.0));
  CHECK(equilibrium_temp(defaults, 0.49, 0.51) == doctest::Approx(44.3676).epsilon(1e-4));

  PlantParams lossless = p;
  lossless.loss_coeff = 0.0;
  try {
    equilibrium_temp(lossless, 0.5, 0.0);
    FAIL("expected no-equilibrium");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoEquilibrium);
  }
  CHECK(equilibrium_temp(lossless, 0.5, 0.5) == doctest::Approx(25.0 + 100.0 / 4.0));
}

TEST_CASE("long-run simulation converges to the equilibrium") {
  const auto p = reference_params();
  const double k = p.loss_coeff + p.fan_coeff * 0.51;
  const double tau = p.capacitance / k;
  const double t_end = simulate(p, 25.0, 0.49, 0.51, 1.0, 5.0 * tau);
  CHECK(std::abs(t_end - equilibrium_temp(p, 0.49, 0.51)) < 0.15);
  const double t_long = simulate(p, 25.0, 0.49, 0.51, 1.0, 12.0 * tau);
  CHECK(std::abs(t_long - equilibrium_temp(p, 0.49, 0.51)) < 0.1);
}

TEST_CASE("sensor quantization") {
  PlantParams p = reference_params();
  p.adc_bits = 16;
  p.adc_lo = -50.0;
  p.adc_hi = 200.0;
  Rng rng(0);
  CHECK(std::abs(read_sensor(p, PlantState{46.0, 0.0}, rng) - 46.0) <= p.adc_quantum());

  p.adc_bits = 8;
  p.adc_lo = 0.0;
  p.adc_hi = 150.0;
  CHECK(p.adc_quantum() == doctest::Approx(150.0 / 255.0));
  // round(46 / 0.5882) = 78 -> 78 * 150 / 255
  CHECK(read_sensor(p, PlantState{46.0, 0.0}, rng) == doctest::Approx(45.882353).epsilon(1e-6));
  CHECK(read_sensor(p, PlantState{-5.0, 0.0}, rng) == 0.0);
  CHECK(read_sensor(p, PlantState{400.0, 0.0}, rng) == 150.0);
}

TEST_CASE("seeded sensor noise is reproducible") {
  PlantParams p = reference_params();
  p.sensor_noise_std = 0.5;
  p.seed = 1234;
  Plant a(p, 40.0);
  Plant b(p, 40.0);
  bool any_noise = false;
  for (int i = 0; i < 100; ++i) {
    const double ra = a.read_sensor();
    CHECK(ra == b.read_sensor());
    any_noise = any_noise || std::abs(ra - 40.0) > p.adc_quantum();
  }
  CHECK(any_noise);
}

TEST_CASE("parameter validation") {
  auto bad = [](auto mutate) {
    PlantParams p;
    mutate(p);
    CHECK_THROWS_AS(p.validate(), Error);
  };
  bad([](PlantParams& p) { p.capacitance = 0.0; });
  bad([](PlantParams& p) { p.heater_power = -1.0; });
  bad([](PlantParams& p) { p.loss_coeff = -1.0; });
  bad([](PlantParams& p) { p.fan_coeff = -1.0; });
  bad([](PlantParams& p) { p.adc_bits = 0; });
  bad([](PlantParams& p) { p.adc_bits = 17; });
  bad([](PlantParams& p) { p.adc_hi = p.adc_lo; });
  bad([](PlantParams& p) { p.sensor_noise_std = -0.1; });
  CHECK_NOTHROW(PlantParams{}.validate());
}

TEST_CASE("property: temperature stays within [ambient, ambient + P/k_loss]") {
  const PlantParams p;
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double hi = p.ambient + p.heater_power / p.loss_coeff;
  for (int schedule = 0; schedule < 200; ++schedule) {
    PlantState s{p.ambient + u(rng) * (hi - p.ambient), 0.0};
    for (int i = 0; i < 200; ++i) {
      s = step(p, s, u(rng), u(rng), 1.0);
      REQUIRE(s.plate_temp >= p.ambient);
      REQUIRE(s.plate_temp <= hi);
    }
  }
}

TEST_CASE("property: equilibrium is monotone in both duties") {
  const PlantParams p;
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double uh = i / 10.0;
      const double uf = j / 10.0;
      CHECK(equilibrium_temp(p, std::min(1.0, uh + 0.1), uf) >= equilibrium_temp(p, uh, uf));
      CHECK(equilibrium_temp(p, uh, uf + 0.1) <= equilibrium_temp(p, uh, uf));
    }
  }
}

TEST_CASE("energy audit over a trajectory") {
  const PlantParams p;
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PlantState s{30.0, 0.0};
  const double t0 = s.plate_temp;
  const double dt = 1.0;
  double euler_sum = 0.0;
  double trapezoid = 0.0;
  for (int i = 0; i < 600; ++i) {
    const double uh = u(rng);
    const double uf = u(rng);
    const auto net = [&](double temp) {
      return p.heater_power * uh - (p.loss_coeff + p.fan_coeff * uf) * (temp - p.ambient);
    };
    const auto next = step(p, s, uh, uf, dt);
    euler_sum += net(s.plate_temp) * dt;
    trapezoid += 0.5 * (net(s.plate_temp) + net(next.plate_temp)) * dt;
    s = next;
  }
  const double stored = p.capacitance * (s.plate_temp - t0);
  CHECK(stored == doctest::Approx(euler_sum).epsilon(1e-9));
  // Against trapezoidal quadrature the gap is the O(dt) truncation.
  CHECK(std::abs(stored - trapezoid) / 600.0 < dt * p.heater_power * (p.loss_coeff + p.fan_coeff) / p.capacitance);
}

TEST_CASE("halving dt roughly halves the endpoint error") {
  const PlantParams p;
  const double uh = 0.7;
  const double uf = 0.3;
  const double horizon = 120.0;
  const double k = p.loss_coeff + p.fan_coeff * uf;
  const double teq = equilibrium_temp(p, uh, uf);
  const double exact = teq + (25.0 - teq) * std::exp(-k * horizon / p.capacitance);
  const double e1 = std::abs(simulate(p, 25.0, uh, uf, 4.0, horizon) - exact);
  const double e2 = std::abs(simulate(p, 25.0, uh, uf, 2.0, horizon) - exact);
  CHECK(e1 / e2 >= 1.5);
  CHECK(e1 / e2 <= 3.0);
}

TEST_CASE("plant instance is deterministic") {
  PlantParams p;
  p.sensor_noise_std = 0.3;
  p.seed = 9;
  auto trajectory = [&] {
    Plant plant(p, 25.0);
    std::vector<double> out;
    for (int i = 0; i < 50; ++i) {
      out.push_back(plant.read_sensor());
      plant.advance(0.6, 0.4, 1.0);
    }
    out.push_back(plant.state().plate_temp);
    return out;
  };
  CHECK(trajectory() == trajectory());
}
