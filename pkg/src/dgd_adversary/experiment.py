"""Run configured experiments and assemble their result tables."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analysis, engine
from .attack import common_epsilon, epsilon_for
from .config import ExperimentConfig
from .engine import SimulationConfig, Trajectory

STEADY_STATE_ROUNDS = 10


def attack_strength(sim: SimulationConfig, traj: Trajectory | None = None) -> float:
    """Norm of the attack used in the bound curves.

    Shared vector: its norm. Per-step draws: the largest norm actually
    applied during the run (or at round 0 when no trajectory is given).
    """
    atk = sim.attack
    if atk.mode == "none":
        return 0.0
    if atk.mode == "cooperative_fixed":
        return float(np.linalg.norm(common_epsilon(atk, sim.p)))
    if traj is not None and traj.eps.shape[0] > 0:
        rows = [a - 1 for a in sorted(atk.adversaries)]
        return float(np.linalg.norm(traj.eps[:, rows, :], axis=2).max())
    return max(float(np.linalg.norm(epsilon_for(atk, a, 0, sim.p))) for a in atk.adversaries)


def initial_condition_verdict(sim: SimulationConfig, X0: np.ndarray) -> bool | None:
    """Shared vector: ``||xbar(0) - x*|| < ||eps||``. Per-step draws:
    ``||x_i(0) - x*|| < ||eps_i(0)||`` for every adversary. None without attack."""
    atk = sim.attack
    x_star = sim.objective.x_star
    if atk.mode == "none":
        return None
    if atk.mode == "cooperative_fixed":
        return analysis.initial_condition_ok(X0.mean(axis=0), x_star, common_epsilon(atk, sim.p))
    eps0 = {a: epsilon_for(atk, a, 0, sim.p) for a in sorted(atk.adversaries)}
    return analysis.per_agent_initial_condition_ok(X0, x_star, eps0)


@dataclass
class ReplicationResult:
    replication: int
    sim: SimulationConfig
    traj: Trajectory
    errors: analysis.ErrorSeries
    bound_paper: np.ndarray | None
    bound_geometric: np.ndarray | None
    r0: float
    eps_norm: float
    initial_ok: bool | None
    domination_paper: analysis.DominationReport | None
    domination_geometric: analysis.DominationReport | None

    def steady_state_error(self, rounds: int = STEADY_STATE_ROUNDS) -> float:
        return float(np.mean(self.errors.avg_error[-rounds:]))

    def summary(self) -> dict:
        ea = self.errors
        reg = float(ea.regular_avg_error[-1])
        return {
            "replication": self.replication,
            "seed_offset": self.sim.init_seed,
            "adversaries": sorted(self.sim.attack.adversaries),
            "initial_condition_ok": self.initial_ok,
            "r0": self.r0,
            "eps_norm": self.eps_norm,
            "final_avg_error": float(ea.avg_error[-1]),
            "final_regular_avg_error": None if math.isnan(reg) else reg,
            "steady_state_error": self.steady_state_error(),
            "bound_asymptote": math.sqrt(2.0) * self.eps_norm,
            "first_violation_k": _first(self.domination_paper),
            "max_violation": _maxv(self.domination_paper),
            "first_violation_k_geometric": _first(self.domination_geometric),
            "max_violation_geometric": _maxv(self.domination_geometric),
        }


def _first(rep):
    return None if rep is None else rep.first_violation_k


def _maxv(rep):
    return None if rep is None else rep.max_violation


def run_replication(cfg: ExperimentConfig, replication: int,
                    backend: str = engine.BACKEND) -> ReplicationResult:
    sim = cfg.simulation(replication)
    traj = engine.run(sim, backend=backend)
    obj = sim.objective
    errors = analysis.error_series(traj, obj.x_star, sim.attack.adversaries)
    r0 = float(errors.avg_error[0])
    eps_norm = attack_strength(sim, traj)
    check = analysis.step_size_check(sim.alpha, obj.mu, obj.lip)
    bp = bg = dp = dg = None
    if check.admissible:
        K = traj.K
        bp = analysis.bound_curve("average", r0, eps_norm, sim.alpha, obj.mu, obj.lip, K).values
        bg = analysis.bound_curve_geometric("average", r0, eps_norm, sim.alpha, obj.mu, obj.lip, K).values
        dp = analysis.bound_domination_report(errors.avg_error, bp)
        dg = analysis.bound_domination_report(errors.avg_error, bg)
    return ReplicationResult(replication, sim, traj, errors, bp, bg, r0, eps_norm,
                             initial_condition_verdict(sim, traj.X[0]), dp, dg)


def step_check_for(cfg: ExperimentConfig) -> analysis.StepSizeCheck:
    obj = cfg.simulation(0).objective
    return analysis.step_size_check(cfg.alpha, obj.mu, obj.lip)


def run_experiment(cfg: ExperimentConfig, backend: str = engine.BACKEND) -> list[ReplicationResult]:
    return [run_replication(cfg, r, backend) for r in range(cfg.replications)]


def run_sweep(cfg: ExperimentConfig, counts, backend: str = engine.BACKEND
              ) -> dict[int, list[ReplicationResult]]:
    """One replication set per adversary count; replication seeds are shared
    across counts so results pair up."""
    return {m: run_experiment(cfg.with_adversary_count(m), backend) for m in counts}


def sweep_means(results: dict[int, list[ReplicationResult]]) -> dict[int, float]:
    return {m: float(np.mean([r.steady_state_error() for r in reps]))
            for m, reps in results.items()}


def strictly_increasing(means: dict[int, float]) -> bool:
    vals = [means[m] for m in sorted(means)]
    return all(a < b for a, b in zip(vals, vals[1:]))
