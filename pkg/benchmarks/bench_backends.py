"""Time the compiled and numpy propagation kernels on identical workloads.

    python benchmarks/bench_backends.py [--iterations 100] [--repeat 200]
"""
import argparse
import time

import numpy as np

from dgd_adversary import engine
from dgd_adversary.attack import AttackSpec
from dgd_adversary.engine import SimulationConfig, InitSpec
from dgd_adversary.objectives import paper_quadratic
from dgd_adversary.topology import metropolis_weights, random_connected_graph


def make_config(n, p, iterations):
    g = random_connected_graph(n, min(1.0, 4.0 / n), seed=1)
    atk = AttackSpec(adversaries=frozenset({n - 1, n}), mode="cooperative_fixed", seed=3)
    return SimulationConfig(g, metropolis_weights(g), paper_quadratic(n, p), atk,
                            alpha=0.6, iterations=iterations,
                            init=InitSpec("uniform", low=-0.5, high=0.5), init_seed=2)


def bench(cfg, backend, repeat):
    engine.run(cfg, backend=backend)
    t0 = time.perf_counter()
    for _ in range(repeat):
        traj = engine.run(cfg, backend=backend)
    return (time.perf_counter() - t0) / repeat, traj


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--iterations", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    backends = sorted(engine.BACKENDS)
    print(f"backends available: {', '.join(backends)} (default: {engine.BACKEND})")
    print(f"{'n':>5} {'p':>3} " + " ".join(f"{b + ' [ms]':>15}" for b in backends)
          + f" {'speedup':>8} {'max |diff|':>11}")
    for n, p in [(10, 1), (10, 5), (50, 1), (100, 2), (200, 1)]:
        cfg = make_config(n, p, args.iterations)
        res = {b: bench(cfg, b, max(1, args.repeat * 10 // n)) for b in backends}
        times = " ".join(f"{res[b][0] * 1e3:15.4f}" for b in backends)
        if len(backends) == 2:
            speed = res["python"][0] / res["compiled"][0]
            diff = np.max(np.abs(res["python"][1].X - res["compiled"][1].X))
            print(f"{n:5d} {p:3d} {times} {speed:8.2f} {diff:11.2e}")
        else:
            print(f"{n:5d} {p:3d} {times}")


if __name__ == "__main__":
    main()
