"""Command-line front end: simulate | estimate | kernel | experiment | report.

Exit codes: 0 success, 1 experiment assertion failed, 2 usage or config
error, 3 runtime failure.  Every output artifact starts with its fully
resolved configuration as ``# key = value`` lines, so a run can be
reproduced from its own header; nothing here writes timestamps.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .estimators import EstimatorConfig, bandwidth_main, estimate_series
from .kernels import (
    MAX_KERNEL_ORDER,
    asymptotic_variance,
    box_kernel,
    kernel_moment,
    vanishing_moment_kernel,
)
from .sde import PathConfig, SdePath, simulate_path, solve_ode
from .trends import parse_trend

TREND_HELP = (
    "trend grammar: const:<c> | sin:<base>,<amp>,<omega> | "
    "poly:<c0>,<c1>,... | weier:<amp>,<decay>,<lacunarity>,<terms>"
)


def _fmt(value) -> str:
    # repr of a float is the shortest string that parses back to the same
    # double, so headers stay exact without trailing digit noise
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_lines(out, lines) -> None:
    text = "\n".join(lines) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _check_hurst(hurst: float) -> None:
    if not 0.5 < hurst < 1.0:
        raise ValueError(f"--hurst: H must lie in (0.5, 1), got {hurst}")


# ------------------------------------------------------------- simulate ----


def _cmd_simulate(args) -> int:
    _check_hurst(args.hurst)
    if args.q < 1:
        raise ValueError(f"--q: Hermite rank must be >= 1, got {args.q}")
    if not 0.0 <= args.eps <= 1.0:
        raise ValueError(f"--eps: noise amplitude must lie in [0, 1], got {args.eps}")
    trend = parse_trend(args.trend, args.horizon)
    cfg = PathConfig(
        horizon=args.horizon, n=args.n, eps=args.eps, x0=args.x0,
        order=args.q, hurst=args.hurst, m=args.m,
    )
    path = simulate_path(trend, cfg, args.seed, method=args.method)
    spec = cfg.hermite_spec()
    lines = [
        f"# trend = {args.trend}",
        f"# q = {cfg.order}",
        f"# hurst = {_fmt(cfg.hurst)}",
        f"# horizon = {_fmt(cfg.horizon)}",
        f"# n = {cfg.n}",
        f"# m = {spec.m}",
        f"# eps = {_fmt(cfg.eps)}",
        f"# x0 = {_fmt(cfg.x0)}",
        f"# seed = {args.seed}",
        f"# method = {args.method}",
        "t,Z,x,X",
    ]
    for t, z, x, big_x in zip(path.times, path.noise, path.ode, path.values):
        lines.append(f"{_fmt(float(t))},{_fmt(float(z))},{_fmt(float(x))},{_fmt(float(big_x))}")
    _write_lines(args.out, lines)
    return 0


# ------------------------------------------------------------- estimate ----


def _read_path_csv(path: str) -> tuple:
    header = {}
    rows = []
    columns = None
    with open(path, "r") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, sep, value = line.lstrip("#").partition("=")
                if sep:
                    header[key.strip()] = value.strip()
                continue
            if columns is None:
                columns = [c.strip() for c in line.split(",")]
                continue
            rows.append([float(tok) for tok in line.split(",")])
    if columns != ["t", "Z", "x", "X"]:
        raise ValueError(f"--in: expected a t,Z,x,X path file, got columns {columns}")
    data = np.asarray(rows)
    return header, data


def _cmd_estimate(args) -> int:
    header, data = _read_path_csv(args.infile)
    horizon = float(header["horizon"])
    eps = float(header["eps"])
    hurst = float(header["hurst"])
    x0 = float(header["x0"])
    n = data.shape[0] - 1
    cfg = PathConfig(
        horizon=horizon, n=n, eps=eps, x0=x0,
        order=int(header.get("q", 1)), hurst=hurst,
    )
    path = SdePath(times=data[:, 0], values=data[:, 3], ode=data[:, 2],
                   noise=data[:, 1], config=cfg, seed=int(header.get("seed", 0)))
    kernel = vanishing_moment_kernel(args.order)
    if args.bandwidth == "auto":
        if eps <= 0.0:
            raise ValueError("--bandwidth auto needs a noisy path (eps > 0)")
        phi = bandwidth_main(eps, args.order, hurst)
        rule = "main"
    else:
        phi = float(args.bandwidth)
        rule = "manual"
    hi = float(kernel.support[1])
    if args.window:
        a, b = (float(tok) for tok in args.window.split(","))
    else:
        a, b = hi * phi, horizon - hi * phi
    est_cfg = EstimatorConfig(kernel=kernel, bandwidth=phi, window=(a, b),
                              horizon=horizon, eps=eps, rule=rule)
    series = estimate_series(path, est_cfg, points=args.points)
    lines = [f"# {k} = {v}" for k, v in header.items()]
    lines += [
        f"# order = {args.order}",
        f"# bandwidth = {_fmt(phi)}",
        f"# rule = {rule}",
        f"# window = {_fmt(a)},{_fmt(b)}",
        f"# points = {args.points}",
        "t,product_estimate,theta_hat,valid",
    ]
    for t, prod, theta, ok in zip(series.times, series.product, series.theta, series.valid):
        lines.append(f"{_fmt(float(t))},{_fmt(float(prod))},{_fmt(float(theta))},{bool(ok)}")
    _write_lines(args.out, lines)
    return 0


# --------------------------------------------------------------- kernel ----


def _cmd_kernel(args) -> int:
    if args.width is not None:
        if args.width <= 0:
            raise ValueError(f"--width: box width must be positive, got {args.width}")
        kernel = box_kernel(args.width)
        label = f"box:{_fmt(args.width)}"
    else:
        if not 0 <= args.order <= MAX_KERNEL_ORDER:
            raise ValueError(
                f"--order: kernel order must lie in [0, {MAX_KERNEL_ORDER}], got {args.order}"
            )
        kernel = vanishing_moment_kernel(args.order)
        label = f"legendre:{args.order}"
    hursts = [float(tok) for tok in args.hurst.split(",")]
    for h in hursts:
        _check_hurst(h)
    lo, hi = kernel.support
    lines = [
        f"# kernel = {label}",
        f"# order = {kernel.order}",
        f"# support = [{_fmt(float(lo))}, {_fmt(float(hi))}]",
    ]
    for j in range(kernel.order + 2):
        lines.append(f"moment j={j}: {_fmt(float(kernel_moment(kernel, j)))}")
    for h in hursts:
        lines.append(f"sigma2 H={_fmt(h)}: {_fmt(asymptotic_variance(kernel, h))}")
    _write_lines(args.out, lines)
    return 0


# ----------------------------------------------------------- experiment ----


def _cmd_experiment(args) -> int:
    from .experiments import load_experiment_config, run_experiment, write_report

    cfg = load_experiment_config(args.config)
    result = run_experiment(cfg, workers=args.workers)
    write_report(result, args.out)
    summary = os.path.join(args.out, "summary.txt")
    sys.stdout.write(open(summary).read())
    return 0 if result.passed else 1


def _cmd_report(args) -> int:
    results = os.path.join(args.indir, "results.csv")
    if not os.path.exists(results):
        raise ValueError(f"--in: no results.csv under {args.indir}")
    with open(results) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if header == ["eps", "sup_mse", "log_eps", "log_mse"]:
        if not rows:
            sys.stdout.write("no experiments\n")
            return 0
        for row in rows:
            sys.stdout.write(f"eps={row[0]} sup_mse={row[1]}\n")
        if len(rows) >= 2:
            log_eps = np.array([float(r[2]) for r in rows])
            log_mse = np.array([float(r[3]) for r in rows])
            slope, intercept = np.polyfit(log_eps, log_mse, 1)
            sys.stdout.write(f"refit slope={_fmt(float(slope))}, "
                             f"intercept={_fmt(float(intercept))}\n")
    elif header == ["eps", "statistic", "value"]:
        for row in rows:
            sys.stdout.write(f"{row[1]}={row[2]}\n")
    else:
        raise ValueError(f"--in: unrecognized results.csv columns {header}")
    summary = os.path.join(args.indir, "summary.txt")
    if os.path.exists(summary):
        verdicts = [ln for ln in open(summary) if "pass=" in ln]
        sys.stdout.writelines(verdicts)
    return 0


# ----------------------------------------------------------------- main ----


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hermite-trend",
        description="Simulate Hermite-noise SDE paths and estimate their trend multiplier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="write a t,Z,x,X path CSV", epilog=TREND_HELP)
    sim.add_argument("--trend", required=True, help=TREND_HELP)
    sim.add_argument("--q", type=int, default=1, help="Hermite rank (1 = fBm, 2 = Rosenblatt)")
    sim.add_argument("--hurst", "--H", type=float, default=0.7)
    sim.add_argument("--horizon", "--T", type=float, default=1.0)
    sim.add_argument("--n", type=int, default=1024, help="number of grid steps")
    sim.add_argument("--m", type=int, default=0, help="rank-grid size (0 = 8n)")
    sim.add_argument("--eps", type=float, default=0.1, help="noise amplitude in [0, 1]")
    sim.add_argument("--x0", type=float, default=1.0)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--method", choices=("exact", "euler"), default="exact")
    sim.add_argument("--out", default="-", help="output CSV path (default stdout)")
    sim.set_defaults(func=_cmd_simulate)

    est = sub.add_parser("estimate", help="kernel-estimate theta from a path CSV")
    est.add_argument("--in", dest="infile", required=True, help="simulate output CSV")
    est.add_argument("--order", type=int, default=1, help="vanishing-moment kernel order")
    est.add_argument("--bandwidth", default="auto", help="'auto' (main rule) or a number")
    est.add_argument("--window", default="", help="a,b evaluation window (default widest)")
    est.add_argument("--points", type=int, default=21)
    est.add_argument("--out", default="-")
    est.set_defaults(func=_cmd_estimate)

    ker = sub.add_parser("kernel", help="print kernel moments and asymptotic variance")
    ker.add_argument("--order", type=int, default=0)
    ker.add_argument("--width", type=float, default=None,
                     help="use a box kernel of this width instead of --order")
    ker.add_argument("--hurst", "--H", default="0.7", help="comma-separated H values")
    ker.add_argument("--out", default="-")
    ker.set_defaults(func=_cmd_kernel)

    exp = sub.add_parser("experiment", help="run a Monte Carlo experiment config")
    exp.add_argument("--config", required=True, help="flat key=value config file")
    exp.add_argument("--workers", type=int, default=1)
    exp.add_argument("--out", required=True, help="report directory")
    exp.set_defaults(func=_cmd_experiment)

    rep = sub.add_parser("report", help="re-render a summary from written results.csv")
    rep.add_argument("--in", dest="indir", required=True, help="report directory")
    rep.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - surfaced as a runtime failure
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
