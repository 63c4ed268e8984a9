"""JSON scenario configuration: parsing, defaults and validation.

A config is a single JSON object::

    {
      "scenario": "photonic-optimize",
      "parameters": {"omega_a0": 3.0, "omega_b0": 1.0, "delta": 0.2},
      "integrator": {"tol": 1e-10},          # or {"fixed_step": 0.01}
      "output": "runs/resonant_swap",
      "seed": 0
    }

Every problem found is collected and raised together as a
:class:`~qhe.errors.ConfigError`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, DomainError
from .mode_dynamics import TOL_RANGE

SCENARIOS = ("rabi", "three-mode", "photonic-cycle", "photonic-optimize", "carnot-sweep",
             "tls-cycle", "counter-rotating", "verify")
TOP_LEVEL_KEYS = {"scenario", "parameters", "integrator", "output", "seed"}
INTEGRATOR_KEYS = {"tol", "fixed_step"}
DEFAULT_TOL = 1e-10

@dataclass(frozen=True)
class Param:
    default: object
    check: str = "positive"  # positive | nonnegative | real | count, optionally prefixed by optional-


_CYCLE = {
    "omega_a0": Param(3.0),
    "omega_b0": Param(1.0),
    "T_h": Param(4.0),
    "T_c": Param(1.0),
    "delta": Param(0.2, "nonnegative"),
    "nu": Param(None, "optional-positive"),
    "t_c": Param(None, "optional-nonnegative"),
    "t_end": Param(200.0),
    "common": Param(0.0, "real"),
}

SCHEMAS = {
    "rabi": {
        "omega": Param(1.0),
        "omega_b": Param(None, "optional-positive"),
        "T_a": Param(2.0),
        "T_b": Param(1.0),
        "t_end": Param(2 * math.pi),
        "n_samples": Param(201, "count"),
    },
    "three-mode": {
        "q": Param(math.log(2.0)),
        "p": Param(math.log(3.0)),
        "omega": Param(1.0),
        "t_end": Param(math.pi / math.sqrt(2.0)),
        "n_samples": Param(201, "count"),
    },
    "photonic-cycle": {**_CYCLE, "n_samples": Param(401, "count")},
    "photonic-optimize": {**_CYCLE, "n_samples": Param(2001, "count")},
    "carnot-sweep": {
        "omega_a0": Param(2.0),
        "T_h": Param(2.0),
        "T_c": Param(1.0),
        "omega_b_min": Param(0.1),
        "omega_b_max": Param(1.9),
        "n_points": Param(20, "count"),
        "delta": Param(0.2, "nonnegative"),
        "t_end": Param(200.0),
    },
    "tls-cycle": {**_CYCLE, "n_samples": Param(4001, "count")},
    "counter-rotating": {
        "omega_a0": Param(3.0),
        "omega_b0": Param(1.0),
        "delta": Param(0.2, "nonnegative"),
        "nu": Param(1.0),
        "common": Param(0.3, "real"),
        "n_a0": Param(0.5, "nonnegative"),
        "n_b0": Param(0.2, "nonnegative"),
        "periods": Param(4, "count"),
        "n_samples": Param(2001, "count"),
    },
    "verify": {},
}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    parameters: dict
    output: str | None = None
    seed: int = 0
    tol: float = DEFAULT_TOL
    fixed_step: float | None = None
    source: str | None = field(default=None, compare=False)

    def echo(self):
        integrator = ({"fixed_step": self.fixed_step} if self.fixed_step is not None
                      else {"tol": self.tol})
        return {"scenario": self.scenario, "parameters": dict(self.parameters),
                "integrator": integrator, "output": self.output, "seed": self.seed}


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _check_value(name, value, check, errors):
    if check.startswith("optional-"):
        if value is None:
            return value
        check = check[len("optional-"):]
    if check == "count":
        if not (isinstance(value, int) and not isinstance(value, bool) and value >= 1):
            errors.append(f"{name}: expected a positive integer, got {value!r}")
        return value
    if not _is_number(value):
        errors.append(f"{name}: expected a finite number, got {value!r}")
        return value
    if check == "positive" and not value > 0:
        errors.append(f"{name}: must be positive, got {value!r}")
    elif check == "nonnegative" and not value >= 0:
        errors.append(f"{name}: must be non-negative, got {value!r}")
    return float(value)


def _cross_checks(scenario, p, errors):
    """Preconditions of the target module, evaluated before any computation."""
    from .photonic_engine import CycleSpec

    if scenario in ("photonic-cycle", "photonic-optimize", "tls-cycle"):
        try:
            CycleSpec(p["omega_a0"], p["omega_b0"], p["T_h"], p["T_c"], delta=p["delta"],
                      nu=p["nu"], t_end=p["t_end"], common=p["common"])
        except DomainError as exc:
            errors.append(f"cycle parameters: {exc}")
    elif scenario == "carnot-sweep":
        if not p["T_h"] > p["T_c"]:
            errors.append("T_h: must exceed T_c")
        if not p["omega_b_min"] < p["omega_b_max"] < p["omega_a0"]:
            errors.append("omega_b_max: need omega_b_min < omega_b_max < omega_a0")
        if p["n_points"] < 2:
            errors.append("n_points: need at least 2")
    elif scenario == "counter-rotating":
        if p["omega_a0"] < p["omega_b0"]:
            errors.append("omega_a0: must be at least omega_b0")
        if (abs(p["common"] - p["delta"]) >= p["omega_b0"]
                or abs(p["common"] + p["delta"]) >= p["omega_a0"]):
            errors.append("delta: modulation would drive a frequency through zero")
    if "n_samples" in p and p["n_samples"] < 2:
        errors.append("n_samples: need at least 2")


def validate(raw, scenario=None, source=None):
    """Turn a decoded JSON object into a :class:`ScenarioConfig`."""
    errors = []
    if not isinstance(raw, dict):
        raise ConfigError(f"top level must be a JSON object, got {type(raw).__name__}")
    for key in sorted(set(raw) - TOP_LEVEL_KEYS):
        errors.append(f"unknown key {key!r}")
    name = raw.get("scenario", scenario)
    if scenario is not None and name != scenario:
        errors.append(f"scenario: config says {name!r} but {scenario!r} was requested")
    if name not in SCENARIOS:
        errors.append(f"scenario: unknown scenario {name!r}; expected one of {SCENARIOS}")
        raise ConfigError(errors)
    schema = SCHEMAS[name]

    given = raw.get("parameters", {})
    if not isinstance(given, dict):
        errors.append("parameters: must be an object")
        given = {}
    for key in sorted(set(given) - set(schema)):
        errors.append(f"parameters: unknown key {key!r} for scenario {name!r}")
    params = {}
    for key, spec in schema.items():
        if key in given:
            params[key] = _check_value(key, given[key], spec.check, errors)
        else:
            params[key] = spec.default

    tol, fixed_step = DEFAULT_TOL, None
    integ = raw.get("integrator", {})
    if not isinstance(integ, dict):
        errors.append("integrator: must be an object")
        integ = {}
    for key in sorted(set(integ) - INTEGRATOR_KEYS):
        errors.append(f"integrator: unknown key {key!r}")
    if "tol" in integ and "fixed_step" in integ:
        errors.append("integrator: give either tol or fixed_step, not both")
    if "tol" in integ:
        tol = integ["tol"]
        if not (_is_number(tol) and TOL_RANGE[0] <= tol <= TOL_RANGE[1]):
            errors.append(f"tol: must lie in [{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}], got {tol!r}")
    if "fixed_step" in integ:
        fixed_step = integ["fixed_step"]
        if not (_is_number(fixed_step) and fixed_step > 0):
            errors.append(f"fixed_step: must be positive, got {fixed_step!r}")

    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        errors.append("output: must be a string path prefix")
    seed = raw.get("seed", 0)
    if not (isinstance(seed, int) and not isinstance(seed, bool) and seed >= 0):
        errors.append(f"seed: must be a non-negative integer, got {seed!r}")

    if not errors:
        _cross_checks(name, params, errors)
    if errors:
        raise ConfigError(errors)
    return ScenarioConfig(name, params, output, seed, float(tol),
                          None if fixed_step is None else float(fixed_step), source)


def load_config(path, scenario=None):
    """Read and validate a UTF-8 JSON config file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file") from None
    except UnicodeDecodeError as exc:
        raise ConfigError(f"{path}: not valid UTF-8 ({exc.reason})") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return validate(raw, scenario, source=str(path))
