"""Additive attack vectors injected by adversarial agents.

Draws are counter-based: every vector is generated from a fresh generator
keyed by ``(seed, agent, k)``, so any single draw can be reproduced without
replaying the ones before it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MODES = ("none", "cooperative_fixed", "independent_per_step")

# Distinct key for the one shared cooperative draw; agent keys are >= 1.
_COOPERATIVE_KEY = 0


class AttackError(ValueError):
    pass


@dataclass(frozen=True)
class AttackSpec:
    adversaries: frozenset[int] = field(default_factory=frozenset)
    mode: str = "none"
    dist_low: float = 0.0
    dist_high: float = 1.0
    seed: int = 0
    fixed_epsilon: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "adversaries", frozenset(int(a) for a in self.adversaries))
        if self.mode not in MODES:
            raise AttackError(f"unknown attack mode {self.mode!r}")
        if (self.mode == "none") != (not self.adversaries):
            raise AttackError("adversary set must be empty exactly when mode is 'none'")
        if any(a < 1 for a in self.adversaries):
            raise AttackError("adversary indices are 1-based")
        if not self.dist_low < self.dist_high:
            raise AttackError(f"need low < high, got ({self.dist_low}, {self.dist_high})")
        if self.fixed_epsilon is not None:
            if self.mode != "cooperative_fixed":
                raise AttackError("fixed_epsilon is only valid for cooperative_fixed mode")
            eps = tuple(float(v) for v in self.fixed_epsilon)
            if not np.all(np.isfinite(eps)):
                raise AttackError("fixed_epsilon must be finite")
            object.__setattr__(self, "fixed_epsilon", eps)

    def validate_for(self, n: int, p: int):
        if any(a > n for a in self.adversaries):
            raise AttackError(f"adversary index outside 1..{n}")
        if self.fixed_epsilon is not None and len(self.fixed_epsilon) != p:
            raise AttackError(f"fixed_epsilon has length {len(self.fixed_epsilon)}, expected {p}")

    def is_adversary(self, agent: int) -> bool:
        return agent in self.adversaries


def _draw(spec: AttackSpec, key: tuple[int, ...], p: int) -> np.ndarray:
    rng = np.random.default_rng([spec.seed & 0xFFFFFFFFFFFFFFFF, *key])
    return rng.uniform(spec.dist_low, spec.dist_high, size=p)


def epsilon_for(spec: AttackSpec, agent: int, k: int, p: int) -> np.ndarray | None:
    """Attack vector agent ``agent`` adds at round ``k``, or None if honest."""
    if k < 0:
        raise AttackError(f"round index must be >= 0, got {k}")
    if agent not in spec.adversaries:
        return None
    if spec.mode == "cooperative_fixed":
        return common_epsilon(spec, p)
    return _draw(spec, (agent, k), p)


def common_epsilon(spec: AttackSpec, p: int) -> np.ndarray:
    """The single vector shared by all adversaries in cooperative mode."""
    if spec.mode != "cooperative_fixed":
        raise AttackError("common epsilon only exists in cooperative_fixed mode")
    if spec.fixed_epsilon is not None:
        if len(spec.fixed_epsilon) != p:
            raise AttackError(f"fixed_epsilon has length {len(spec.fixed_epsilon)}, expected {p}")
        return np.array(spec.fixed_epsilon, dtype=float)
    return _draw(spec, (_COOPERATIVE_KEY,), p)


def epsilon_schedule(spec: AttackSpec, n: int, p: int, rounds: int,
                     start: int = 0) -> np.ndarray:
    """Dense array whose entry ``[k, i]`` is the perturbation agent ``i+1``
    adds at round ``start + k``; honest rows are zero."""
    E = np.zeros((rounds, n, p))
    if spec.mode == "none" or rounds == 0:
        return E
    spec.validate_for(n, p)
    rows = sorted(a - 1 for a in spec.adversaries)
    if spec.mode == "cooperative_fixed":
        E[:, rows, :] = common_epsilon(spec, p)
        return E
    for k in range(rounds):
        for r in rows:
            E[k, r] = _draw(spec, (r + 1, start + k), p)
    return E


def malicious_target(x_star, eps) -> np.ndarray:
    """Point the adversaries steer towards: ``x_star + eps``."""
    x_star = np.asarray(x_star, dtype=float)
    eps = np.asarray(eps, dtype=float)
    if x_star.shape != eps.shape:
        raise AttackError(f"dimension mismatch: {x_star.shape} vs {eps.shape}")
    return x_star + eps


def attack_from_config(block: dict, seed_offset: int = 0) -> AttackSpec:
    """Parse the attack config block; ``seed_offset`` shifts the seed per replication."""
    allowed = {"adversaries", "mode", "low", "high", "seed", "fixed_epsilon"}
    unknown = set(block) - allowed
    if unknown:
        raise AttackError(f"unknown attack keys: {sorted(unknown)}")
    fixed = block.get("fixed_epsilon")
    return AttackSpec(
        adversaries=frozenset(block.get("adversaries", [])),
        mode=block.get("mode", "none"),
        dist_low=float(block.get("low", 0.0)),
        dist_high=float(block.get("high", 1.0)),
        seed=int(block.get("seed", 0)) + seed_offset,
        fixed_epsilon=None if fixed is None else tuple(fixed),
    )
