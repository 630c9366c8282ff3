"""Synchronous consensus-gradient iteration with additive adversarial perturbation.

Each round every agent mixes its neighbors' states with the weights ``W``
and takes a gradient step on its own local objective::

    y_i = sum_j W_ij x_j(k) - alpha * grad f_i(x_i(k))

Adversaries then add their attack vector, ``x_i(k+1) = y_i + eps_i(k)``, and
that perturbed state is what neighbors mix with in round ``k + 1``.

The inner loop runs in a compiled kernel when one was built, otherwise in
numpy. ``BACKEND`` names the one selected at import.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernel_py
from .attack import AttackSpec, epsilon_schedule
from .objectives import ObjectiveSpec
from .topology import Graph, WeightMatrix

try:
    from . import _kernel as _kernel_c
except ImportError:  # extension not built
    _kernel_c = None

BACKENDS = {"python": _kernel_py.propagate}
if _kernel_c is not None:
    BACKENDS["compiled"] = _kernel_c.propagate
BACKEND = "compiled" if _kernel_c is not None else "python"

DIVERGENCE_LIMIT = 1e12


class ConfigError(ValueError):
    pass


class DivergenceError(RuntimeError):
    """An iterate left the finite range; ``trajectory`` holds the rounds up to ``k``."""

    def __init__(self, k: int, agent: int, trajectory: "Trajectory | None" = None):
        super().__init__(f"iterate of agent {agent} diverged at round {k}")
        self.k = k
        self.agent = agent
        self.trajectory = trajectory


@dataclass(frozen=True)
class InitSpec:
    """Initial states: ``gaussian`` (``sigma``, ``mean``), ``uniform`` (``low``,
    ``high``) or ``explicit`` (``rows``)."""

    kind: str = "gaussian"
    sigma: float = 1.0
    mean: float = 0.0
    low: float = -1.0
    high: float = 1.0
    rows: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("gaussian", "uniform", "explicit"):
            raise ConfigError(f"unknown init kind {self.kind!r}")
        if self.kind == "gaussian" and self.sigma < 0:
            raise ConfigError("gaussian sigma must be >= 0")
        if self.kind == "uniform" and not self.low <= self.high:
            raise ConfigError("uniform init needs low <= high")
        if self.kind == "explicit" and self.rows is None:
            raise ConfigError("explicit init needs rows")


@dataclass(frozen=True)
class SimulationConfig:
    graph: Graph
    weights: WeightMatrix
    objective: ObjectiveSpec
    attack: AttackSpec
    alpha: float
    iterations: int
    init: InitSpec = field(default_factory=InitSpec)
    init_seed: int = 0

    def __post_init__(self):
        n = self.graph.n
        if self.weights.n != n:
            raise ConfigError(f"weights are {self.weights.n}x{self.weights.n}, graph has {n} agents")
        if self.objective.n != n:
            raise ConfigError(f"objective has {self.objective.n} locals, graph has {n} agents")
        if self.alpha < 0:
            raise ConfigError("step size must be nonnegative")
        if self.iterations < 0:
            raise ConfigError("iteration count must be nonnegative")
        problems = self.weights.check(self.graph)
        if problems:
            raise ConfigError("weights do not match graph: " + ", ".join(problems))
        try:
            self.attack.validate_for(n, self.objective.p)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def p(self) -> int:
        return self.objective.p


@dataclass(frozen=True)
class NetworkState:
    k: int
    X: np.ndarray


@dataclass
class Trajectory:
    """Recorded run. ``X[k]`` is the ``n x p`` state matrix after ``k`` rounds;
    ``eps[k]`` the perturbation applied while producing ``X[k + 1]``."""

    X: np.ndarray
    avg: np.ndarray
    avg_grad: np.ndarray
    eps: np.ndarray
    adversaries: frozenset

    @property
    def K(self) -> int:
        return self.X.shape[0] - 1

    @property
    def states(self) -> list[NetworkState]:
        return [NetworkState(k, self.X[k]) for k in range(self.X.shape[0])]

    @property
    def eps_log(self) -> list[dict[int, np.ndarray]]:
        """Per round, the map agent (1-based) -> applied attack vector."""
        agents = sorted(self.adversaries)
        return [{a: self.eps[k, a - 1] for a in agents} for k in range(self.eps.shape[0])]


def init_state(cfg: SimulationConfig) -> NetworkState:
    n, p = cfg.n, cfg.p
    spec = cfg.init
    if spec.kind == "explicit":
        X = np.array(spec.rows, dtype=float)
        if X.shape != (n, p):
            raise ConfigError(f"explicit init has shape {X.shape}, expected ({n}, {p})")
    else:
        rng = np.random.default_rng(cfg.init_seed)
        if spec.kind == "gaussian":
            X = spec.mean + spec.sigma * rng.standard_normal((n, p))
        else:
            X = rng.uniform(spec.low, spec.high, size=(n, p))
    if not np.all(np.isfinite(X)):
        raise ConfigError("initial state is not finite")
    return NetworkState(0, X)


def _propagate(cfg: SimulationConfig, X0: np.ndarray, E: np.ndarray, backend: str):
    try:
        kernel = BACKENDS[backend]
    except KeyError:
        raise ConfigError(f"backend {backend!r} unavailable; have {sorted(BACKENDS)}") from None
    out = np.empty((E.shape[0] + 1, cfg.n, cfg.p))
    out[0] = X0
    k_bad, agent = kernel(
        np.ascontiguousarray(cfg.weights.entries),
        np.ascontiguousarray(cfg.objective.A),
        np.ascontiguousarray(cfg.objective.b),
        float(cfg.alpha),
        np.ascontiguousarray(E),
        out,
        DIVERGENCE_LIMIT,
    )
    return out, k_bad, agent


def step(state: NetworkState, cfg: SimulationConfig, backend: str = BACKEND) -> NetworkState:
    """Advance one round, applying the attack vectors for round ``state.k``."""
    X = np.asarray(state.X, dtype=float)
    if not np.all(np.isfinite(X)):
        raise DivergenceError(state.k, 0)
    E = epsilon_schedule(cfg.attack, cfg.n, cfg.p, 1, start=state.k)
    out, k_bad, agent = _propagate(cfg, X, E, backend)
    if k_bad >= 0:
        raise DivergenceError(state.k + 1, agent + 1)
    return NetworkState(state.k + 1, out[1])


def _build(cfg: SimulationConfig, X: np.ndarray, E: np.ndarray) -> Trajectory:
    G = np.einsum("ipq,kiq->kip", cfg.objective.A, X - cfg.objective.b)
    return Trajectory(X=X, avg=X.mean(axis=1), avg_grad=G.mean(axis=1),
                      eps=E, adversaries=cfg.attack.adversaries)


def run(cfg: SimulationConfig, backend: str = BACKEND) -> Trajectory:
    """Run ``cfg.iterations`` rounds from ``init_state(cfg)``.

    Raises:
        DivergenceError: with the partial trajectory (rounds ``0..k-1``)
            attached, when an entry becomes non-finite or exceeds
            ``DIVERGENCE_LIMIT``.
    """
    X0 = init_state(cfg).X
    E = epsilon_schedule(cfg.attack, cfg.n, cfg.p, cfg.iterations)
    out, k_bad, agent = _propagate(cfg, X0, E, backend)
    if k_bad >= 0:
        partial = _build(cfg, out[:k_bad], E[:max(k_bad - 1, 0)])
        raise DivergenceError(k_bad, agent + 1, partial)
    return _build(cfg, out, E)
