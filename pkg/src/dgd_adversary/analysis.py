"""Step-size admissibility, neighborhood bounds and measured error series.

The bound on the distance to the optimum after ``k`` rounds is::

    rho**(k/2) * r0 + sqrt(2) * ||eps||,    rho = 2 - 2 * alpha * c2

with ``c1 = 2 / (mu + L)`` and ``c2 = 2 mu L / (mu + L)``. A second
"geometric" curve keeps the per-round ``2 ||eps||**2`` terms of the squared
recursion instead of collapsing them to one, which gives the larger
asymptote ``sqrt(2 / (1 - rho)) * ||eps||``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import Trajectory


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class StepSizeCheck:
    alpha: float
    mu: float
    lip: float
    c1: float
    c2: float
    upper_ok: bool
    window_ok: bool

    @property
    def admissible(self) -> bool:
        return self.upper_ok and self.window_ok

    @property
    def rho(self) -> float:
        return contraction_factor(self.alpha, self.c2)

    @property
    def window(self) -> tuple[float, float]:
        s = self.mu + self.lip
        return s / (4 * self.mu * self.lip), s / (2 * self.mu * self.lip)

    def as_dict(self) -> dict:
        lo, hi = self.window
        return {"alpha": self.alpha, "mu": self.mu, "lip": self.lip, "c1": self.c1,
                "c2": self.c2, "rho": self.rho, "upper_ok": self.upper_ok,
                "window_ok": self.window_ok, "window": [lo, hi],
                "admissible": self.admissible}


def step_size_check(alpha: float, mu: float, lip: float) -> StepSizeCheck:
    """Test ``alpha < 2/(mu+L)`` and ``(mu+L)/(4 mu L) < alpha < (mu+L)/(2 mu L)``."""
    if not (alpha > 0 and mu > 0 and lip > 0):
        raise AnalysisError("alpha, mu and L must be positive")
    if mu > lip:
        raise AnalysisError(f"need mu <= L, got mu={mu}, L={lip}")
    s = mu + lip
    c1 = 2.0 / s
    c2 = 2.0 * mu * lip / s
    upper_ok = alpha < c1
    window_ok = s / (4 * mu * lip) < alpha < s / (2 * mu * lip)
    return StepSizeCheck(alpha, mu, lip, c1, c2, upper_ok, window_ok)


def contraction_factor(alpha: float, c2: float) -> float:
    return 2.0 - 2.0 * alpha * c2


def initial_condition_ok(x0_avg, x_star, eps) -> bool:
    """Strict test ``||x0_avg - x_star|| < ||eps||``."""
    x0_avg, x_star, eps = (np.asarray(v, dtype=float) for v in (x0_avg, x_star, eps))
    if not x0_avg.shape == x_star.shape == eps.shape:
        raise AnalysisError(f"dimension mismatch: {x0_avg.shape}, {x_star.shape}, {eps.shape}")
    return bool(np.linalg.norm(x0_avg - x_star) < np.linalg.norm(eps))


def per_agent_initial_condition_ok(X0, x_star, eps_by_agent: dict) -> bool:
    """Per-agent form: ``||x_i(0) - x_star|| < ||eps_i||`` for each listed agent."""
    X0 = np.asarray(X0, dtype=float)
    return all(initial_condition_ok(X0[i - 1], x_star, e) for i, e in eps_by_agent.items())


@dataclass(frozen=True)
class BoundCurve:
    kind: str
    form: str
    r0: float
    eps_norm: float
    rho: float
    values: np.ndarray

    @property
    def asymptote(self) -> float:
        if self.form == "paper":
            return math.sqrt(2.0) * self.eps_norm
        return math.sqrt(2.0 / (1.0 - self.rho)) * self.eps_norm


def _rho_for(alpha, mu, lip) -> float:
    chk = step_size_check(alpha, mu, lip)
    if not chk.admissible:
        raise AnalysisError(
            f"step size {alpha} is not admissible for mu={mu}, L={lip}; "
            f"the bound needs 0 < rho < 1 (rho={chk.rho})")
    return chk.rho


def _check_kind(kind, r0, eps_norm, K):
    if kind not in ("average", "individual"):
        raise AnalysisError(f"unknown bound kind {kind!r}")
    if r0 < 0 or eps_norm < 0:
        raise AnalysisError("r0 and eps_norm must be nonnegative")
    if K < 0:
        raise AnalysisError("K must be nonnegative")


def bound_curve(kind: str, r0: float, eps_norm: float, alpha: float, mu: float,
                lip: float, K: int) -> BoundCurve:
    """Bound ``rho**(k/2) r0 + sqrt(2) eps_norm`` for ``k = 0..K``.

    ``kind`` is ``"average"`` (``r0 = ||xbar(0) - x*||``) or
    ``"individual"`` (``r0 = ||x_i(0) - x*||`` with that agent's eps norm).
    """
    _check_kind(kind, r0, eps_norm, K)
    rho = _rho_for(alpha, mu, lip)
    k = np.arange(K + 1)
    values = rho ** (k / 2.0) * r0 + math.sqrt(2.0) * eps_norm
    return BoundCurve(kind, "paper", r0, eps_norm, rho, values)


def bound_curve_geometric(kind: str, r0: float, eps_norm: float, alpha: float, mu: float,
                          lip: float, K: int) -> BoundCurve:
    """``sqrt(rho**k r0**2 + 2 eps_norm**2 (1 - rho**k) / (1 - rho))``."""
    _check_kind(kind, r0, eps_norm, K)
    rho = _rho_for(alpha, mu, lip)
    pk = rho ** np.arange(K + 1, dtype=float)
    values = np.sqrt(pk * r0**2 + 2.0 * eps_norm**2 * (1.0 - pk) / (1.0 - rho))
    return BoundCurve(kind, "geometric", r0, eps_norm, rho, values)


@dataclass(frozen=True)
class ErrorSeries:
    avg_error: np.ndarray
    per_agent_error: np.ndarray  # shape (n, K+1)
    regular_avg_error: np.ndarray


def error_series(traj: Trajectory, x_star, adversaries) -> ErrorSeries:
    """Distances to ``x_star`` of the network mean, of each agent, and of the
    mean over non-adversarial agents (NaN when every agent is adversarial)."""
    x_star = np.asarray(x_star, dtype=float)
    X = traj.X
    n = X.shape[1]
    avg_error = np.linalg.norm(X.mean(axis=1) - x_star, axis=1)
    per_agent = np.linalg.norm(X - x_star, axis=2).T
    regular = [i for i in range(n) if (i + 1) not in set(adversaries)]
    if regular:
        regular_avg = np.linalg.norm(X[:, regular, :].mean(axis=1) - x_star, axis=1)
    else:
        regular_avg = np.full(X.shape[0], np.nan)
    return ErrorSeries(avg_error, per_agent, regular_avg)


@dataclass(frozen=True)
class DominationReport:
    dominated: np.ndarray
    max_violation: float
    first_violation_k: int | None

    @property
    def ok(self) -> bool:
        return self.first_violation_k is None


def bound_domination_report(err, bound) -> DominationReport:
    """Compare a measured error series with a bound, ``err[k] <= bound[k]``.

    Accepts arrays, ``BoundCurve`` or ``ErrorSeries`` (uses ``avg_error``).
    ``max_violation`` is ``max(err - bound, 0)``.
    """
    e = np.asarray(err.avg_error if isinstance(err, ErrorSeries) else err, dtype=float)
    b = np.asarray(bound.values if isinstance(bound, BoundCurve) else bound, dtype=float)
    if e.shape != b.shape:
        raise AnalysisError(f"length mismatch: {e.shape} vs {b.shape}")
    ok = e <= b
    gap = e - b
    bad = np.flatnonzero(~ok)
    return DominationReport(ok, float(max(gap.max(initial=0.0), 0.0)),
                            int(bad[0]) if bad.size else None)


def report_json(check: StepSizeCheck, r0: float, eps_norm: float,
                domination: DominationReport | None) -> dict:
    """Serializable analysis report."""
    return {
        "admissible": check.admissible,
        "c1": check.c1,
        "c2": check.c2,
        "rho": check.rho,
        "r0": r0,
        "eps_norm": eps_norm,
        "first_violation_k": None if domination is None else domination.first_violation_k,
        "max_violation": None if domination is None else domination.max_violation,
    }
