import json
import math

import pytest

import fltc


def test_step_matches_worked_example():
    t = fltc.step(-1.0)
    degrees = t["fuzzified"]["error"]
    assert degrees["SNEG"] == pytest.approx(0.04)
    assert degrees["ZERO"] == pytest.approx(14 / 15)
    assert t["output"] == pytest.approx(130.906, abs=1e-3)
    assert abs(t["fan_duty"] - 0.51) <= 0.01
    assert t["fan_duty"] + t["heater_duty"] == 1.0


def test_infer_and_clamp():
    assert fltc.infer({"error": 0.0}) == pytest.approx(127.5)
    t = fltc.trace({"error": 999.0})
    assert t["inputs"]["error"]["clamped"] is True
    assert t["inputs"]["error"]["used"] == 50.0


def test_fuzzify_a_variable_document():
    var = fltc.fltc_controller()["inputs"][0]
    d = fltc.fuzzify(var, -1.0)
    assert set(d) == {"NEG", "SNEG", "ZERO", "SPOZ", "POZ"}
    assert d["ZERO"] == pytest.approx(14 / 15)


def test_compile_rules_and_errors():
    ctl = fltc.fltc_controller()
    vocab = json.dumps({"inputs": ctl["inputs"], "output": ctl["output"]})
    out = fltc.compile_rules("if error is zero then pwm is m", vocab)
    assert out == "IF error IS ZERO THEN pwm IS M\n"
    with pytest.raises(fltc.RuleParseError) as info:
        fltc.compile_rules("IF error is NEG THEN pwm is Z\nIF error is ZERO AND THEN pwm is M\n", vocab)
    assert info.value.line == 2
    assert isinstance(info.value, fltc.FltcError)


def test_simulate_is_deterministic_and_settles():
    a = fltc.simulate(seed=3)
    assert a == fltc.simulate(seed=3)
    assert a.startswith("t,setpoint,sensed,error,defuzz,fan_duty,heater_duty,mu_NEG")
    record = fltc.simulate(format="json")
    assert len(record["frames"]) == 600
    assert record["summary"]["settling_time"] is not None
    assert record["summary"]["overshoot"] <= 3.0


def test_config_errors_carry_field_paths():
    with pytest.raises(fltc.ConfigError) as info:
        fltc.simulate({"loop": {"sample_period": -1}})
    assert info.value.issues[0][0] == "/loop/sample_period"


def test_plant_and_pwm():
    assert fltc.equilibrium_temp(0.5, 0.5) == pytest.approx(45.0)
    assert fltc.equilibrium_temp(0.0, 1.0) == 25.0
    wave = fltc.synthesize_pwm(0.8, 10)
    assert wave == [True] * 8 + [False] * 2
    assert fltc.duty_from_level(255.0) == 1.0
    assert math.isclose(fltc.duty_from_level(127.5), 0.5)


def test_default_config_and_demo_room():
    cfg = fltc.default_config()
    assert cfg["loop"]["setpoint"] == 45
    assert fltc.demo_room(20, 30)["command"] == "heat"
    assert fltc.demo_room(20, 20)["command"] == "no-change"
    with pytest.raises(fltc.FltcError):
        fltc.demo_room(-5, 20)
