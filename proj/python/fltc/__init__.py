"""Fuzzy-logic temperature control: inference, PWM, plant and closed loop."""

import json

from . import _fltc
from ._fltc import (
    ConfigError,
    FltcError,
    RuleParseError,
    compile_rules,
    duty_from_level,
    synthesize_pwm,
)

__all__ = [
    "ConfigError",
    "FltcError",
    "RuleParseError",
    "compile_matrix",
    "compile_rules",
    "default_config",
    "demo_room",
    "duty_from_level",
    "equilibrium_temp",
    "fltc_controller",
    "fuzzify",
    "infer",
    "simulate",
    "step",
    "synthesize_pwm",
    "trace",
]


def _text(doc):
    if doc is None or isinstance(doc, str):
        return doc
    return json.dumps(doc)


def fuzzify(variable, x):
    """Degrees of every term of `variable` (a variable document) at x."""
    return _fltc.fuzzify(_text(variable), x)


def fltc_controller():
    """The five-rule temperature controller as a controller document."""
    return json.loads(_fltc.fltc_controller_json())


def compile_matrix(matrix, vocabulary):
    return _fltc.compile_matrix(_text(matrix), _text(vocabulary))


def trace(inputs, controller=None):
    """Full inference trace as a dict; `output` is None when no rule fires."""
    return json.loads(_fltc.trace(inputs, _text(controller)))


def infer(inputs, controller=None):
    return _fltc.infer(inputs, _text(controller))


def step(error, controller=None):
    """Single controller evaluation with the derived fan/heater duties."""
    t = trace({"error": error}, controller)
    fan = duty_from_level(t["output"]) if t["output"] is not None else None
    t["fan_duty"] = fan
    t["heater_duty"] = None if fan is None else 1.0 - fan
    return t


def equilibrium_temp(heater_duty, fan_duty, plant=None):
    return _fltc.equilibrium_temp(heater_duty, fan_duty, _text(plant))


def default_config():
    return json.loads(_fltc.default_config_json())


def simulate(config=None, format="csv", seed=None):
    """Closed-loop run. Returns CSV text, or the run record dict for "json"."""
    out = _fltc.simulate(_text(config), format, seed)
    return json.loads(out) if format == "json" else out


def demo_room(temperature, target):
    command, degree, commands = _fltc.demo_room(temperature, target)
    return {"command": command, "degree": degree, "commands": commands}
