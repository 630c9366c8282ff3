"""Command-line interface.

Subcommands::

    run <config>                     per-iteration CSV + JSON summary (+ SVG plot)
    sweep <config> --counts 2,5,9    steady-state error per adversary count
    check <config>                   step-size and initial-condition tests only
    plot <csv> <out>                 SVG of error and bound curves

``<config>`` is a JSON file or a preset name (fig1 .. fig6).

Exit codes: 0 success, 1 check failed, 2 invalid input, 3 divergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path

from . import engine, svgplot
from .config import ConfigError, ExperimentConfig, load_config
from .engine import DivergenceError
from .experiment import (attack_strength, initial_condition_verdict, run_experiment, run_sweep,
                         step_check_for, strictly_increasing, sweep_means)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_DIVERGED = 0, 1, 2, 3

PLOT_SERIES = ("avg_error", "regular_avg_error", "bound_paper", "bound_geometric")


def _fmt(v) -> str:
    if v is None:
        return ""
    v = float(v)
    return "" if math.isnan(v) else format(v, ".17g")


def _atomic_write(path: Path, data: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _resolve(out_dir: Path | None, name: str) -> Path:
    p = Path(name)
    if p.is_absolute():
        return p
    return (out_dir or Path.cwd()) / p


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    return cfg.with_overrides(seed=getattr(args, "seed", None),
                              replications=getattr(args, "replications", None))


def run_csv(results) -> str:
    n = results[0].sim.n
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["replication", "k", *PLOT_SERIES] + [f"per_agent_error_{i}" for i in range(1, n + 1)])
    for res in results:
        e = res.errors
        for k in range(e.avg_error.shape[0]):
            bp = None if res.bound_paper is None else res.bound_paper[k]
            bg = None if res.bound_geometric is None else res.bound_geometric[k]
            w.writerow([res.replication, k, _fmt(e.avg_error[k]), _fmt(e.regular_avg_error[k]),
                        _fmt(bp), _fmt(bg)] + [_fmt(v) for v in e.per_agent_error[:, k]])
    return buf.getvalue()


def run_summary(cfg: ExperimentConfig, results, wall_time: float | None = None) -> dict:
    check = step_check_for(cfg)
    verdicts = [r.initial_ok for r in results]
    summary = {
        "config": cfg.raw,
        "step_size": check.as_dict(),
        "admissible": check.admissible,
        "c1": check.c1,
        "c2": check.c2,
        "rho": check.rho,
        "initial_condition_ok": None if all(v is None for v in verdicts)
        else all(v is not False for v in verdicts),
        "replications": [r.summary() for r in results],
    }
    if wall_time is not None:
        summary["wall_time_s"] = wall_time
    return summary


def cmd_run(args) -> int:
    cfg = _load(args)
    out_dir = Path(args.out_dir) if args.out_dir else None
    t0 = time.perf_counter()
    try:
        results = run_experiment(cfg)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    wall = time.perf_counter() - t0 if args.record_time else None
    outs = cfg.outputs
    csv_text = run_csv(results)
    csv_path = _resolve(out_dir, outs["csv"])
    summary_path = _resolve(out_dir, outs["summary"])
    _atomic_write(csv_path, csv_text)
    _atomic_write(summary_path, _json(run_summary(cfg, results, wall)))
    print(f"wrote {csv_path}")
    print(f"wrote {summary_path}")
    if outs.get("plot"):
        plot_path = _resolve(out_dir, outs["plot"])
        _atomic_write(plot_path, plot_from_csv(csv_text, title=cfg.name))
        print(f"wrote {plot_path}")
    if results[0].bound_paper is None:
        print("note: step size is not admissible; bound columns left empty")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    out_dir = Path(args.out_dir) if args.out_dir else None
    try:
        counts = sorted({int(c) for c in args.counts.split(",") if c.strip()})
    except ValueError:
        raise ConfigError(f"--counts must be comma-separated integers, got {args.counts!r}") from None
    if not counts:
        raise ConfigError("--counts is empty")
    for m in counts:
        cfg.with_adversary_count(m)
    try:
        results = run_sweep(cfg, counts)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "replication", "final_avg_error", "steady_state_error"])
    for m in counts:
        for res in results[m]:
            w.writerow([m, res.replication, _fmt(res.errors.avg_error[-1]),
                        _fmt(res.steady_state_error())])
    means = sweep_means(results)
    summary = {
        "config": cfg.raw,
        "counts": counts,
        "replications": cfg.replications,
        "mean_steady_state_error": {str(m): means[m] for m in counts},
        "strictly_increasing": strictly_increasing(means),
    }
    outs = cfg.outputs
    csv_path = _resolve(out_dir, outs["sweep_csv"])
    summary_path = _resolve(out_dir, outs["sweep_summary"])
    _atomic_write(csv_path, buf.getvalue())
    _atomic_write(summary_path, _json(summary))
    for m in counts:
        print(f"m={m}: mean steady-state error {means[m]:.6g}")
    print(f"strictly increasing in m: {summary['strictly_increasing']}")
    print(f"wrote {csv_path}")
    print(f"wrote {summary_path}")
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = _load(args)
    check = step_check_for(cfg)
    lo, hi = check.window
    print(f"c1 = {check.c1:.6g}, c2 = {check.c2:.6g}, rho = {check.rho:.6g}")
    print(f"upper test  alpha < 2/(mu+L) = {check.c1:.6g}: {'pass' if check.upper_ok else 'FAIL'}")
    print(f"window test {lo:.6g} < alpha < {hi:.6g}: {'pass' if check.window_ok else 'FAIL'}")
    print(f"step size {cfg.alpha:g} admissible: {check.admissible}")
    ok = check.admissible
    for r in range(cfg.replications):
        sim = cfg.simulation(r)
        X0 = engine.init_state(sim).X
        verdict = initial_condition_verdict(sim, X0)
        if verdict is None:
            print(f"replication {r}: no attack, initial-condition test not applicable")
            continue
        eps_norm = attack_strength(sim)
        print(f"replication {r}: initial condition (||eps|| = {eps_norm:.6g}): "
              f"{'pass' if verdict else 'FAIL'}")
        ok = ok and verdict
    return EXIT_OK if ok else EXIT_CHECK_FAILED


class PlotInputError(ValueError):
    pass


def plot_from_csv(text: str, title: str = "") -> str:
    """Plot the first replication found in a run CSV."""
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise PlotInputError("CSV has no data rows")
    missing = {"k", *PLOT_SERIES} - set(rows[0])
    if missing:
        raise PlotInputError(f"CSV lacks columns {sorted(missing)}")
    first = rows[0].get("replication")
    rows = [r for r in rows if r.get("replication") == first]

    def num(s):
        if s is None:
            raise PlotInputError("ragged CSV row")
        return float(s) if s.strip() else None

    try:
        ks = [float(r["k"]) for r in rows]
        series = {name: [num(r[name]) for r in rows] for name in PLOT_SERIES}
    except ValueError as exc:
        raise PlotInputError(f"non-numeric value: {exc}") from None
    series = {k: v for k, v in series.items() if any(y is not None for y in v)}
    return svgplot.line_chart(ks, series, title=title, xlabel="iteration k",
                              ylabel="distance to optimum")


def cmd_plot(args) -> int:
    try:
        text = Path(args.csv).read_text()
        svg = plot_from_csv(text, title=Path(args.csv).stem)
    except OSError as exc:
        print(f"error: {args.csv}: {exc.strerror}", file=sys.stderr)
        return EXIT_INVALID
    except (PlotInputError, csv.Error) as exc:
        print(f"error: {args.csv}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _atomic_write(Path(args.out), svg)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgd-adversary",
        description="Distributed gradient descent with adversarial perturbations.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="JSON config path or preset name (fig1..fig6)")
        p.add_argument("--seed", type=int, help="override base_seed")
        p.add_argument("--replications", type=int, help="override replications")

    p = sub.add_parser("run", help="simulate and write CSV/summary")
    common(p)
    p.add_argument("--out-dir", help="directory for relative output paths (default: cwd)")
    p.add_argument("--record-time", action="store_true",
                   help="include wall time in the summary (breaks byte-identical output)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="vary the number of adversaries")
    common(p)
    p.add_argument("--counts", required=True, help="comma-separated adversary counts, e.g. 2,5,9")
    p.add_argument("--out-dir", help="directory for relative output paths (default: cwd)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="test step size and initial condition")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("plot", help="render a run CSV as SVG")
    p.add_argument("csv")
    p.add_argument("out")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ValueError as exc:  # ConfigError and module-level validation errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
