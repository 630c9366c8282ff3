"""Experiment configuration files and the bundled figure presets.

A config is a JSON object; unknown keys are rejected at every level::

    {
      "name": "fig1",
      "graph": {"kind": "complete", "n": 10},
      "objective": {"kind": "paper_quadratic", "n": 10, "p": 1},
      "attack": {"adversaries": [9, 10], "mode": "cooperative_fixed",
                 "low": 0.0, "high": 1.0, "seed": 0},
      "alpha": 0.6,
      "iterations": 100,
      "init": {"kind": "uniform", "low": -0.5, "high": 0.5},
      "replications": 1,
      "base_seed": 0,
      "outputs": {"csv": "fig1.csv", "summary": "fig1_summary.json",
                  "plot": "fig1.svg"}
    }

Replication ``r`` runs with seed ``base_seed + r``: that offset is added to
the random-graph seed and the attack seed, and is the initial-state seed.
"""
from __future__ import annotations

import copy
import json
import re
from dataclasses import dataclass
from pathlib import Path

import jsonschema

from .attack import attack_from_config
from .engine import InitSpec, SimulationConfig, init_state
from .objectives import objective_from_config
from .topology import graph_from_config, metropolis_weights


class ConfigError(ValueError):
    """Invalid or unreadable experiment configuration."""


_NUM = {"type": "number"}
_INT = {"type": "integer"}
_SEED = {"type": "integer", "minimum": 0}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name", "graph", "objective", "attack", "alpha", "iterations", "init"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "graph": {
            "oneOf": [
                {"type": "object", "additionalProperties": False,
                 "required": ["kind", "n"],
                 "properties": {"kind": {"const": "complete"}, "n": {"type": "integer", "minimum": 2}}},
                {"type": "object", "additionalProperties": False,
                 "required": ["kind", "n", "edge_prob"],
                 "properties": {"kind": {"const": "random"}, "n": {"type": "integer", "minimum": 2},
                                "edge_prob": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                                "seed": _SEED}},
                {"type": "object", "additionalProperties": False,
                 "required": ["kind", "n", "edges"],
                 "properties": {"kind": {"const": "explicit"}, "n": {"type": "integer", "minimum": 1},
                                "edges": {"type": "array",
                                          "items": {"type": "array", "items": _INT,
                                                    "minItems": 2, "maxItems": 2}}}},
            ]
        },
        "objective": {
            "oneOf": [
                {"type": "object", "additionalProperties": False,
                 "required": ["kind", "n", "p"],
                 "properties": {"kind": {"const": "paper_quadratic"},
                                "n": {"type": "integer", "minimum": 1},
                                "p": {"type": "integer", "minimum": 1},
                                "decomposition": {"enum": ["identical_copy", "share"]},
                                "feasible_bound": {"type": "number", "exclusiveMinimum": 0}}},
                {"type": "object", "additionalProperties": False,
                 "required": ["kind", "locals"],
                 "properties": {"kind": {"const": "explicit"},
                                "feasible_bound": {"type": "number", "exclusiveMinimum": 0},
                                "locals": {"type": "array", "minItems": 1, "items": {
                                    "type": "object", "additionalProperties": False,
                                    "required": ["A", "b"],
                                    "properties": {"A": {"type": "array", "items": {"type": "array", "items": _NUM}},
                                                   "b": {"type": "array", "items": _NUM}}}}}},
            ]
        },
        "attack": {
            "type": "object", "additionalProperties": False,
            "required": ["mode"],
            "properties": {
                "adversaries": {"type": "array", "items": {"type": "integer", "minimum": 1},
                                "uniqueItems": True},
                "mode": {"enum": ["none", "cooperative_fixed", "independent_per_step"]},
                "low": _NUM, "high": _NUM, "seed": _SEED,
                "fixed_epsilon": {"type": "array", "items": _NUM, "minItems": 1},
            },
        },
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "iterations": {"type": "integer", "minimum": 0},
        "init": {
            "oneOf": [
                {"type": "object", "additionalProperties": False, "required": ["kind"],
                 "properties": {"kind": {"const": "gaussian"}, "sigma": {"type": "number", "minimum": 0},
                                "mean": _NUM}},
                {"type": "object", "additionalProperties": False, "required": ["kind", "low", "high"],
                 "properties": {"kind": {"const": "uniform"}, "low": _NUM, "high": _NUM}},
                {"type": "object", "additionalProperties": False, "required": ["kind", "rows"],
                 "properties": {"kind": {"const": "explicit"},
                                "rows": {"type": "array", "items": {"type": "array", "items": _NUM}}}},
            ]
        },
        "replications": {"type": "integer", "minimum": 1},
        "base_seed": _SEED,
        "outputs": {
            "type": "object", "additionalProperties": False,
            "properties": {"csv": {"type": "string"}, "summary": {"type": "string"},
                           "plot": {"type": "string"}, "sweep_csv": {"type": "string"},
                           "sweep_summary": {"type": "string"}},
        },
    },
}


def _preset(name, graph, mode, m, n=10):
    return {
        "name": name,
        "graph": graph,
        "objective": {"kind": "paper_quadratic", "n": n, "p": 1},
        "attack": {"adversaries": list(range(n - m + 1, n + 1)), "mode": mode,
                   "low": 0.0, "high": 1.0, "seed": 0},
        "alpha": 0.6,
        "iterations": 100,
        "init": {"kind": "uniform", "low": -0.5, "high": 0.5},
        "replications": 1,
        "base_seed": 0,
        "outputs": {"csv": f"{name}.csv", "summary": f"{name}_summary.json",
                    "plot": f"{name}.svg"},
    }


_COMPLETE = {"kind": "complete", "n": 10}
_RANDOM = {"kind": "random", "n": 10, "edge_prob": 0.4, "seed": 0}

# Complete graph with a shared, fixed attack vector (2, 5, 9 adversaries) and
# a random connected graph with fresh per-agent draws (2, 5, 7 adversaries).
PRESETS = {
    "fig1": _preset("fig1", _COMPLETE, "cooperative_fixed", 2),
    "fig2": _preset("fig2", _COMPLETE, "cooperative_fixed", 5),
    "fig3": _preset("fig3", _COMPLETE, "cooperative_fixed", 9),
    "fig4": _preset("fig4", _RANDOM, "independent_per_step", 2),
    "fig5": _preset("fig5", _RANDOM, "independent_per_step", 5),
    "fig6": _preset("fig6", _RANDOM, "independent_per_step", 7),
}


@dataclass(frozen=True)
class ExperimentConfig:
    raw: dict

    @property
    def name(self) -> str:
        return self.raw["name"]

    @property
    def n(self) -> int:
        return int(self.raw["graph"]["n"])

    @property
    def alpha(self) -> float:
        return float(self.raw["alpha"])

    @property
    def iterations(self) -> int:
        return int(self.raw["iterations"])

    @property
    def replications(self) -> int:
        return int(self.raw.get("replications", 1))

    @property
    def base_seed(self) -> int:
        return int(self.raw.get("base_seed", 0))

    @property
    def outputs(self) -> dict:
        out = {"csv": f"{self.name}.csv", "summary": f"{self.name}_summary.json",
               "sweep_csv": f"{self.name}_sweep.csv",
               "sweep_summary": f"{self.name}_sweep_summary.json"}
        out.update(self.raw.get("outputs", {}))
        return out

    def with_overrides(self, seed=None, replications=None) -> "ExperimentConfig":
        raw = copy.deepcopy(self.raw)
        if seed is not None:
            raw["base_seed"] = int(seed)
        if replications is not None:
            raw["replications"] = int(replications)
        return validate(raw)

    def with_adversary_count(self, m: int) -> "ExperimentConfig":
        """Copy whose adversaries are the last ``m`` agents (mode none for m=0)."""
        n = self.n
        if not 0 <= m <= n:
            raise ConfigError(f"adversary count {m} outside 0..{n}")
        raw = copy.deepcopy(self.raw)
        atk = raw["attack"]
        if m == 0:
            atk["mode"] = "none"
            atk["adversaries"] = []
            atk.pop("fixed_epsilon", None)
        else:
            if atk["mode"] == "none":
                raise ConfigError("sweeping adversary counts needs an attack mode other than 'none'")
            atk["adversaries"] = list(range(n - m + 1, n + 1))
        return validate(raw)

    def simulation(self, replication: int = 0) -> SimulationConfig:
        """Concrete simulation for replication ``replication``."""
        offset = self.base_seed + replication
        try:
            graph = graph_from_config(self.raw["graph"], seed_offset=offset)
            objective = objective_from_config(self.raw["objective"])
            attack = attack_from_config(self.raw["attack"], seed_offset=offset)
            ini = self.raw["init"]
            init = InitSpec(kind=ini["kind"],
                            sigma=float(ini.get("sigma", 1.0)), mean=float(ini.get("mean", 0.0)),
                            low=float(ini.get("low", -1.0)), high=float(ini.get("high", 1.0)),
                            rows=None if "rows" not in ini else tuple(map(tuple, ini["rows"])))
            return SimulationConfig(graph=graph, weights=metropolis_weights(graph),
                                    objective=objective, attack=attack, alpha=self.alpha,
                                    iterations=self.iterations, init=init, init_seed=offset)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def _line_of(text: str | None, path) -> str:
    """Best-effort ``line N`` anchor for a schema error path."""
    if not text:
        return ""
    keys = [p for p in path if isinstance(p, str)]
    line = None
    pos = 0
    for key in keys:
        m = re.compile(r'"%s"\s*:' % re.escape(key)).search(text, pos)
        if m is None:
            break
        pos = m.start()
        line = text.count("\n", 0, pos) + 1
    return f"line {line}: " if line is not None else "line 1: "


def validate(raw: dict, text: str | None = None) -> ExperimentConfig:
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{_line_of(text, exc.absolute_path)}{where}: {exc.message}") from None
    cfg = ExperimentConfig(raw)
    n = cfg.n
    obj = raw["objective"]
    n_obj = obj["n"] if obj["kind"] == "paper_quadratic" else len(obj["locals"])
    if n_obj != n:
        raise ConfigError(f"{_line_of(text, ['objective'])}objective has {n_obj} agents, graph has {n}")
    if raw["init"]["kind"] == "uniform" and raw["init"]["low"] > raw["init"]["high"]:
        raise ConfigError(f"{_line_of(text, ['init', 'low'])}init: low must not exceed high")
    # build replication 0 so module-level validation surfaces now
    try:
        init_state(cfg.simulation(0))
    except ValueError as exc:
        raise ConfigError(f"{_line_of(text, [])}{exc}") from None
    return cfg


def load_config(source: str | Path) -> ExperimentConfig:
    """Load a config file, or a bundled preset by name (``fig1``..``fig6``)."""
    if isinstance(source, str) and source in PRESETS:
        return validate(copy.deepcopy(PRESETS[source]))
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return validate(raw, text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
