"""Local quadratic objectives ``f_i(x) = 1/2 (x - b_i)^T A_i (x - b_i)``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-12


class ObjectiveError(ValueError):
    pass


@dataclass(frozen=True)
class ObjectiveSpec:
    """Stack of ``n`` local quadratics in dimension ``p``.

    Attributes:
        A: array of shape (n, p, p), each slice symmetric positive definite.
        b: array of shape (n, p), local minimizers.
        mu: strong-convexity constant reported for the global objective.
        lip: Lipschitz constant reported for the global gradient.
        x_star: minimizer of the summed objective.
        feasible_bound: optional radius of the decision set; recorded only.
        decomposition: how the objective was split ("identical_copy",
            "share" or "explicit").
    """

    A: np.ndarray
    b: np.ndarray
    mu: float
    lip: float
    x_star: np.ndarray
    feasible_bound: float | None = None
    decomposition: str = "explicit"

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return self.A.shape[1]

    def _index(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise ObjectiveError(f"agent index {i} outside 1..{self.n}")
        return i - 1

    def global_value(self, x) -> float:
        return float(sum(eval_local(self, i, x) for i in range(1, self.n + 1)))

    def global_grad(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.einsum("ipq,iq->p", self.A, x[None, :] - self.b)

    def stacked_grad(self, X: np.ndarray) -> np.ndarray:
        """Row ``i`` is the gradient of ``f_i`` at row ``i`` of ``X``."""
        return np.einsum("ipq,iq->ip", self.A, X - self.b)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def make_objective(A, b, feasible_bound: float | None = None) -> ObjectiveSpec:
    """Validate local quadratics and attach their global constants."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 3 or A.shape[1] != A.shape[2]:
        raise ObjectiveError(f"A must have shape (n, p, p), got {A.shape}")
    if b.shape != A.shape[:2]:
        raise ObjectiveError(f"b must have shape {A.shape[:2]}, got {b.shape}")
    if A.shape[0] < 1:
        raise ObjectiveError("need at least one local objective")
    for i, Ai in enumerate(A, start=1):
        if np.max(np.abs(Ai - Ai.T)) > SYMMETRY_TOL:
            raise ObjectiveError(f"A_{i} is not symmetric")
        if np.min(np.linalg.eigvalsh(Ai)) <= 0:
            raise ObjectiveError(f"A_{i} is not positive definite")
    if feasible_bound is not None and feasible_bound <= 0:
        raise ObjectiveError("feasible_bound must be positive")
    H = A.sum(axis=0)
    eig = np.linalg.eigvalsh(H)
    x_star = np.linalg.solve(H, np.einsum("ipq,iq->p", A, b))
    return ObjectiveSpec(A=_frozen(A), b=_frozen(b), mu=float(eig[0]),
                         lip=float(eig[-1]), x_star=_frozen(x_star),
                         feasible_bound=feasible_bound)


def paper_quadratic(n: int, p: int, decomposition: str = "identical_copy") -> ObjectiveSpec:
    """Global cost ``1/2 x^T x`` split across ``n`` agents.

    With ``identical_copy`` every agent holds ``1/2 x^T x``; with ``share``
    each holds ``1/(2n) x^T x`` so the sum is exactly ``1/2 x^T x``. Either
    way the reported constants are ``mu = L = 1`` and ``x_star = 0``.
    """
    if n < 1 or p < 1:
        raise ObjectiveError(f"need n >= 1 and p >= 1, got n={n}, p={p}")
    if decomposition == "identical_copy":
        scale = 1.0
    elif decomposition == "share":
        scale = 1.0 / n
    else:
        raise ObjectiveError(f"unknown decomposition {decomposition!r}")
    A = np.broadcast_to(scale * np.eye(p), (n, p, p))
    return ObjectiveSpec(A=_frozen(A), b=_frozen(np.zeros((n, p))), mu=1.0, lip=1.0,
                         x_star=_frozen(np.zeros(p)), decomposition=decomposition)


def grad_local(spec: ObjectiveSpec, i: int, x) -> np.ndarray:
    k = spec._index(i)
    return spec.A[k] @ (np.asarray(x, dtype=float) - spec.b[k])


def eval_local(spec: ObjectiveSpec, i: int, x) -> float:
    k = spec._index(i)
    d = np.asarray(x, dtype=float) - spec.b[k]
    return max(0.5 * float(d @ spec.A[k] @ d), 0.0)


def global_constants(spec: ObjectiveSpec) -> tuple[float, float, np.ndarray]:
    return spec.mu, spec.lip, spec.x_star


def objective_from_config(block: dict) -> ObjectiveSpec:
    """Build an objective from ``{"kind": "paper_quadratic", ...}`` or
    ``{"kind": "explicit", "locals": [{"A": ..., "b": ...}, ...]}``."""
    kind = block.get("kind")
    if kind == "paper_quadratic":
        allowed = {"kind", "n", "p", "decomposition", "feasible_bound"}
        _check_keys(block, allowed, required={"kind", "n", "p"})
        spec = paper_quadratic(int(block["n"]), int(block["p"]),
                               block.get("decomposition", "identical_copy"))
        if block.get("feasible_bound") is not None:
            spec = ObjectiveSpec(spec.A, spec.b, spec.mu, spec.lip, spec.x_star,
                                 float(block["feasible_bound"]), spec.decomposition)
        return spec
    if kind == "explicit":
        _check_keys(block, {"kind", "locals", "feasible_bound"}, required={"kind", "locals"})
        locs = block["locals"]
        if not locs:
            raise ObjectiveError("explicit objective needs at least one local")
        for loc in locs:
            _check_keys(loc, {"A", "b"}, required={"A", "b"})
        fb = block.get("feasible_bound")
        return make_objective([loc["A"] for loc in locs], [loc["b"] for loc in locs],
                              None if fb is None else float(fb))
    raise ObjectiveError(f"unknown objective kind {kind!r}")


def _check_keys(block: dict, allowed: set, required: set):
    unknown = set(block) - allowed
    if unknown:
        raise ObjectiveError(f"unknown objective keys: {sorted(unknown)}")
    missing = required - set(block)
    if missing:
        raise ObjectiveError(f"missing objective keys: {sorted(missing)}")
