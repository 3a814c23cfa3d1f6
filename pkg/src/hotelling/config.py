"""Strict JSON run configuration.

Example::

    {"scenario": {"revenue": {"kind": "price_taker", "p0": 2},
                  "cost": {"kind": "quadratic", "c": 1, "d": 1},
                  "rho": 1, "stock": 0.3678794},
     "grid": {"points": 101},
     "output": {"formats": ["csv"]}}

Unknown keys anywhere are rejected so that a typo in a parameter name cannot
silently fall back to a default.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import econ
from .errors import ConfigError, ConfigParseError, UnknownKeyError
from .lab import SWEEP_PARAMETERS
from .solver import LAMBDA_RTOL, TAIL_MASS_TOL, GridSpec

FORMATS = ("csv", "json", "svg", "png")

_REVENUE_KEYS = {
    "price_taker": ("p0",),
    "iso_elastic": ("p0", "epsilon"),
    "drift": ("p0", "g"),
    "linear_demand": ("a", "b"),
}
_COST_KEYS = {"quadratic": ("c", "d"), "power": ("a", "beta")}


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple


@dataclass(frozen=True)
class RunConfig:
    scenario: econ.ScenarioSpec
    grid: GridSpec = field(default_factory=GridSpec)
    tol: float = LAMBDA_RTOL
    formats: tuple = ("csv", "json")
    directory: str = "."
    sweep: SweepSpec | None = None


def _reject_constant(name):
    raise ValueError(f"non-finite number {name} is not allowed")


def _object(value, where, allowed, required=()):
    if not isinstance(value, dict):
        raise ConfigError(f"{where} must be an object")
    for key in value:
        if key not in allowed:
            raise UnknownKeyError(key, where)
    for key in required:
        if key not in value:
            raise ConfigError(f"missing key {key!r} in {where}")
    return value


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{where} must be a finite number, got {value!r}")
    return float(value)


def _kind(block, where, table):
    kind = block.get("kind")
    if kind not in table:
        raise ConfigError(f"{where}.kind must be one of {sorted(table)}, got {kind!r}")
    _object(block, where, ("kind",) + table[kind], ("kind",) + table[kind])
    return kind, {k: _number(block[k], f"{where}.{k}") for k in table[kind]}


def scenario_from_dict(block):
    _object(block, "scenario", ("revenue", "cost", "rho", "stock", "label"), ("revenue", "cost", "rho", "stock"))
    rkind, rargs = _kind(block["revenue"], "scenario.revenue", _REVENUE_KEYS)
    ckind, cargs = _kind(block["cost"], "scenario.cost", _COST_KEYS)
    label = block.get("label", "")
    if not isinstance(label, str):
        raise ConfigError("scenario.label must be a string")
    s = econ.ScenarioSpec(
        revenue=econ.RevenueSpec(rkind, **rargs),
        cost=econ.CostSpec(ckind, **cargs),
        rho=_number(block["rho"], "scenario.rho"),
        stock=_number(block["stock"], "scenario.stock"),
        label=label,
    )
    return econ.validate_scenario(s)


def scenario_to_dict(s):
    revenue = {"kind": s.revenue.kind}
    revenue.update({k: getattr(s.revenue, k) for k in _REVENUE_KEYS[s.revenue.kind]})
    cost = {"kind": s.cost.kind}
    cost.update({k: getattr(s.cost, k) for k in _COST_KEYS[s.cost.kind]})
    out = {"revenue": revenue, "cost": cost, "rho": s.rho, "stock": s.stock}
    if s.label:
        out["label"] = s.label
    return out


def _grid(block):
    _object(block, "grid", ("points", "horizon", "t_max", "tail_mass_tol", "tol"))
    points = block.get("points", 101)
    if isinstance(points, bool) or not isinstance(points, int):
        raise ConfigError(f"grid.points must be an integer, got {points!r}")
    horizon = block.get("horizon", "to_exhaustion")
    if horizon not in ("to_exhaustion", "fixed"):
        raise ConfigError(f"grid.horizon must be 'to_exhaustion' or 'fixed', got {horizon!r}")
    t_max = _number(block["t_max"], "grid.t_max") if "t_max" in block else None
    tail = _number(block.get("tail_mass_tol", TAIL_MASS_TOL), "grid.tail_mass_tol")
    tol = _number(block.get("tol", LAMBDA_RTOL), "grid.tol")
    if not 0 < tol < 1:
        raise ConfigError(f"grid.tol must lie in (0, 1), got {tol}")
    return GridSpec(points=points, horizon=horizon, t_max=t_max, tail_mass_tol=tail), tol


def _output(block):
    _object(block, "output", ("formats", "directory"))
    formats = block.get("formats", ["csv", "json"])
    if not isinstance(formats, list) or any(f not in FORMATS for f in formats):
        raise ConfigError(f"output.formats must be a list drawn from {FORMATS}, got {formats!r}")
    directory = block.get("directory", ".")
    if not isinstance(directory, str) or not directory:
        raise ConfigError("output.directory must be a non-empty string")
    return tuple(dict.fromkeys(formats)), directory


def _sweep(block):
    _object(block, "sweep", ("parameter", "values"), ("parameter", "values"))
    if block["parameter"] not in SWEEP_PARAMETERS:
        raise ConfigError(f"sweep.parameter must be one of {SWEEP_PARAMETERS}, got {block['parameter']!r}")
    values = block["values"]
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep.values must be a non-empty list")
    return SweepSpec(block["parameter"], tuple(sorted(_number(v, "sweep.values[]") for v in values)))


def parse_config(text):
    """Parse and validate a JSON config document into a :class:`RunConfig`."""
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"malformed JSON: {exc.msg}", exc.lineno, exc.colno) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    _object(doc, "config", ("scenario", "grid", "output", "sweep"), ("scenario",))
    scenario = scenario_from_dict(doc["scenario"])
    grid, tol = _grid(doc.get("grid", {}))
    formats, directory = _output(doc.get("output", {}))
    sweep = _sweep(doc["sweep"]) if "sweep" in doc else None
    return RunConfig(scenario, grid, tol, formats, directory, sweep)


def config_to_dict(cfg):
    grid = {
        "points": cfg.grid.points,
        "horizon": cfg.grid.horizon,
        "tail_mass_tol": cfg.grid.tail_mass_tol,
        "tol": cfg.tol,
    }
    if cfg.grid.t_max is not None:
        grid["t_max"] = cfg.grid.t_max
    out = {
        "scenario": scenario_to_dict(cfg.scenario),
        "grid": grid,
        "output": {"formats": list(cfg.formats), "directory": cfg.directory},
    }
    if cfg.sweep is not None:
        out["sweep"] = {"parameter": cfg.sweep.parameter, "values": list(cfg.sweep.values)}
    return out


def dump_config(cfg):
    return json.dumps(config_to_dict(cfg), indent=2) + "\n"
