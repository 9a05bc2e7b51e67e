#include <random>
#include <sstream>

#include "doctest.h"
#include "fltc/error.hpp"
#include "fltc/pwm.hpp"

using namespace fltc;

TEST_CASE("duty from PWM level") {
  CHECK(duty_from_level(130.95) == doctest::Approx(0.5135).epsilon(1e-4));
  CHECK(duty_from_level(0.0) == 0.0);
  CHECK(duty_from_level(255.0) == 1.0);
  CHECK(duty_from_level(127.5) == 0.5);
  CHECK(duty_from_level(-10.0) == 0.0);
  CHECK(duty_from_level(400.0) == 1.0);
}

TEST_CASE("eighty percent duty over ten slots") {
  const auto wave = synthesize(PwmCommand(0.8, 1.0, 10));
  const std::vector<bool> expected{true, true, true, true, true, true, true, true, false, false};
  CHECK(wave == expected);
  CHECK(measure_duty(wave) == 0.8);
}

TEST_CASE("synthesis edge cases") {
  CHECK(measure_duty(synthesize(PwmCommand(0.0, 1.0, 37))) == 0.0);
  CHECK(measure_duty(synthesize(PwmCommand(1.0, 1.0, 37))) == 1.0);
  const auto wave = synthesize(PwmCommand(0.5135, 0.02, 200));
  CHECK(std::count(wave.begin(), wave.end(), true) == 103);
  // half-up at the slot boundary
  CHECK(PwmCommand(0.25, 1.0, 2).on_slots() == 1);
  CHECK(PwmCommand(0.5, 1.0, 1).on_slots() == 1);
}

TEST_CASE("command invariants") {
  CHECK_THROWS_AS(PwmCommand(1.1, 1.0, 10), Error);
  CHECK_THROWS_AS(PwmCommand(-0.1, 1.0, 10), Error);
  CHECK_THROWS_AS(PwmCommand(0.5, 0.0, 10), Error);
  CHECK_THROWS_AS(PwmCommand(0.5, 1.0, 0), Error);
  CHECK(PwmCommand(0.8, 0.5, 10).on_time() == doctest::Approx(0.4));
  CHECK_THROWS_AS(measure_duty({}), Error);
}

TEST_CASE("property: round trip within half a slot, monotone in duty") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::uniform_int_distribution<int> ur(1, 1000);
  for (int i = 0; i < 1000; ++i) {
    const double duty = ud(rng);
    const int res = ur(rng);
    const PwmCommand cmd(duty, 1.0, res);
    const double measured = measure_duty(synthesize(cmd));
    CHECK(std::abs(measured - duty) <= 0.5 / res + 1e-12);
    CHECK(measured == static_cast<double>(cmd.on_slots()) / res);

    const double higher = std::min(1.0, duty + ud(rng) * (1.0 - duty));
    CHECK(PwmCommand(higher, 1.0, res).on_slots() >= cmd.on_slots());
  }
}

TEST_CASE("waveform CSV") {
  std::ostringstream out;
  write_waveform_csv(synthesize(PwmCommand(0.5, 1.0, 4)), out);
  CHECK(out.str() == "slot_index,state\n0,1\n1,1\n2,0\n3,0\n");
}
