"""Scenario files: schema, validation, and resolution to lattice specs."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from .errors import NhzmError
from .lattice import LatticeSpec, coupled_chain

TASKS = ("spectrum", "sweep", "mode-profile", "bands", "ensemble",
         "perturbation")

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "nhzm scenario",
    "type": "object",
    "additionalProperties": False,
    "required": ["task"],
    "properties": {
        "description": {"type": "string"},
        "task": {"enum": list(TASKS)},
        "onsite": {"type": "number"},
        "seed": {"type": "integer", "minimum": 0},
        "system": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n", "tA", "tB"],
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "tA": {"type": "number", "exclusiveMinimum": 0},
                "tB": {"type": "number", "exclusiveMinimum": 0},
                "gamma": {"type": "number", "minimum": 0},
            },
        },
        "reservoir": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n", "tA", "tB", "gamma"],
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "tA": {"type": "number", "exclusiveMinimum": 0},
                "tB": {"type": "number", "exclusiveMinimum": 0},
                "gamma": {"type": "number", "minimum": 0},
                "onsite": {"type": "number"},
            },
        },
        "coupling": {"type": "number", "exclusiveMinimum": 0},
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "required": ["gamma_start", "gamma_stop", "gamma_step"],
            "properties": {
                "gamma_start": {"type": "number", "minimum": 0},
                "gamma_stop": {"type": "number", "minimum": 0},
                "gamma_step": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "ensemble": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "sigma": {"type": "number", "minimum": 0},
                "n_realizations": {"type": "integer", "minimum": 1},
                "periods": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "bands": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "gammas": {
                    "type": "array",
                    "items": {"type": "number", "minimum": 0},
                    "minItems": 1,
                },
                "k_points": {"type": "integer", "minimum": 3},
            },
        },
    },
}

# Tasks that simulate the finite coupled chain need all three lattice blocks.
_NEEDS_LATTICE = ("spectrum", "sweep", "mode-profile", "ensemble",
                  "perturbation")


class ScenarioError(NhzmError, ValueError):
    """Scenario file is unreadable or violates the schema."""


@dataclass(frozen=True)
class Scenario:
    """A validated scenario with all defaults resolved."""

    data: dict
    name: str

    @property
    def task(self) -> str:
        return self.data["task"]

    def build_spec(self, gamma: float | None = None) -> LatticeSpec:
        """The coupled chain of this scenario, optionally at another gamma."""
        sys_blk = self.data["system"]
        res_blk = self.data["reservoir"]
        return coupled_chain(
            res_blk["gamma"] if gamma is None else gamma,
            n_system=sys_blk["n"], system_t_a=sys_blk["tA"],
            system_t_b=sys_blk["tB"], system_gamma=sys_blk["gamma"],
            n_reservoir=res_blk["n"], reservoir_t_a=res_blk["tA"],
            reservoir_t_b=res_blk["tB"], t_prime=self.data["coupling"],
            onsite=self.data["onsite"], reservoir_onsite=res_blk["onsite"],
        )


def bundled_scenario_names() -> list[str]:
    files = resources.files("nhzm").joinpath("scenarios")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def _read_scenario_text(path_or_name: str) -> tuple[str, str]:
    path = Path(path_or_name)
    if path.exists():
        return path.read_text(), path.stem
    bundled = resources.files("nhzm").joinpath(f"scenarios/{path_or_name}.json")
    if bundled.is_file():
        return bundled.read_text(), str(path_or_name)
    raise ScenarioError(
        f"no such scenario file or bundled scenario: {path_or_name!r} "
        f"(bundled: {', '.join(bundled_scenario_names())})")


def load_scenario(path_or_name: str, seed_override: int | None = None) -> Scenario:
    """Read, validate, and resolve a scenario file or bundled scenario name.

    Raises ScenarioError with a location-anchored message on JSON or schema
    violations; unknown keys are rejected by the schema.
    """
    text, name = _read_scenario_text(str(path_or_name))
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc

    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        where = "$" + "".join(
            f"[{p}]" if isinstance(p, int) else f".{p}"
            for p in first.absolute_path)
        raise ScenarioError(f"schema violation at {where}: {first.message}")

    task = raw["task"]
    if task in _NEEDS_LATTICE:
        for key in ("system", "reservoir", "coupling"):
            if key not in raw:
                raise ScenarioError(f"task {task!r} requires {key!r}")
    if task == "bands" and "reservoir" not in raw:
        raise ScenarioError("task 'bands' requires 'reservoir'")
    if task == "sweep" and "sweep" not in raw:
        raise ScenarioError("task 'sweep' requires a 'sweep' block")

    resolved = dict(raw)
    resolved.setdefault("onsite", 0.0)
    resolved.setdefault("seed", 0)
    if seed_override is not None:
        resolved["seed"] = int(seed_override)
    if "system" in resolved:
        system = dict(resolved["system"])
        system.setdefault("gamma", 0.0)
        resolved["system"] = system
    if "reservoir" in resolved:
        res = dict(resolved["reservoir"])
        res.setdefault("onsite", resolved["onsite"])
        resolved["reservoir"] = res
    if task == "ensemble":
        block = dict(resolved.get("ensemble", {}))
        block.setdefault("sigma", 0.1)
        block.setdefault("n_realizations", 1000)
        block.setdefault("periods", 1e4)
        resolved["ensemble"] = block
    if task == "bands":
        block = dict(resolved.get("bands", {}))
        block.setdefault("gammas", [resolved["reservoir"]["gamma"]])
        block.setdefault("k_points", 1001)
        resolved["bands"] = block
    return Scenario(resolved, name)
