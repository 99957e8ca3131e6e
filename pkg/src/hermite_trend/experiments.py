"""Replicated Monte Carlo experiments over the estimator stack.

Four experiment kinds:

* ``consistency``  — sup-MSE of the product estimate along a decreasing eps
  ladder must fall monotonically and end below a ceiling.
* ``rate-main``    — OLS slope of log sup-MSE on log eps against the
  theoretical exponent min(2, 2(k+1)/(k+2-H)).
* ``rate-alt``     — same regression for the truncated estimator against
  min(4, 2 rho/(rho-H)).
* ``clt``          — mean/variance of the normalized error at one interior t
  against the kernel's asymptotic variance.

Everything downstream of an ExperimentConfig (master seed included) is a pure
function, so reports are byte-identical across reruns and worker counts:
replication r of rung i, trend j always draws from the stream derived from
(seed, i, j, r), and results land in a preallocated array by index before any
reduction happens.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .estimators import (
    EstimatorConfig,
    alternate_estimate,
    bandwidth_alt,
    bandwidth_main,
    bias_center_term,
    kernel_estimate_product,
)
from .kernels import asymptotic_variance, box_kernel, vanishing_moment_kernel
from .rng import derive_seed
from .sde import PathConfig, simulate_path, solve_ode
from .trends import parse_trend

__all__ = [
    "ConditionViolated",
    "FitDegenerate",
    "ExperimentConfig",
    "ConsistencyReport",
    "RateFit",
    "CltReport",
    "ExperimentResult",
    "parse_experiment_config",
    "load_experiment_config",
    "theoretical_rate_main",
    "theoretical_rate_alt",
    "consistency_side_conditions",
    "run_consistency",
    "run_rate",
    "run_clt",
    "run_experiment",
    "write_report",
]

KINDS = ("consistency", "rate-main", "clt", "rate-alt")


class ConditionViolated(ValueError):
    """A side condition needed for consistency fails for the configured ladder."""


class FitDegenerate(RuntimeError):
    """Log-log regression impossible (nonpositive sup-MSE at some rung)."""


# ---------------------------------------------------------------- config ---


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    trends: tuple  # trend grammar strings; >1 entry = panel sup
    q: int
    hurst: float
    ladder: tuple  # eps values, strictly decreasing
    replications: int
    n: int
    horizon: float
    window: tuple
    seed: int
    kernel: str = ""  # "legendre:<k>" or "box:<width>"; alt kinds derive it
    rho: float = 0.0  # rate-alt only
    x0: float = 1.0
    m: int = 0  # Hermite rank-grid size; 0 = 8n
    eval_points: int = 21
    t0: float = 0.0  # clt only
    variant: str = "observable"  # rate-alt only
    ceiling: float = 0.0  # consistency only; 0 = first rung / 4
    slope_tol: float = 0.0  # 0 = kind default (0.35 main / 0.5 alt)
    var_tol: float = 0.25  # clt only

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {'|'.join(KINDS)}, got {self.kind!r}")
        if not self.trends:
            raise ValueError("at least one trend is required")
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if not 0.5 < self.hurst < 1.0:
            raise ValueError(f"hurst must lie in (1/2, 1), got {self.hurst}")
        if self.replications < 100:
            raise ValueError(f"replications must be >= 100, got {self.replications}")
        if self.m < 0:
            raise ValueError(f"rank-grid size m must be >= 0, got {self.m}")
        lad = tuple(float(e) for e in self.ladder)
        if any(not 0.0 < e <= 1.0 for e in lad):
            raise ValueError("every eps must lie in (0, 1]")
        if any(a <= b for a, b in zip(lad, lad[1:])):
            raise ValueError("eps ladder must be strictly decreasing")
        min_rungs = {"consistency": 2, "rate-main": 4, "rate-alt": 4, "clt": 1}[self.kind]
        max_rungs = 1 if self.kind == "clt" else None
        if len(lad) < min_rungs:
            raise ValueError(f"{self.kind} needs >= {min_rungs} ladder rungs, got {len(lad)}")
        if max_rungs is not None and len(lad) > max_rungs:
            raise ValueError(f"{self.kind} takes exactly {max_rungs} eps value")
        a, b = self.window
        if not (0.0 < a <= b < self.horizon):
            raise ValueError(f"window [{a}, {b}] must sit strictly inside (0, {self.horizon})")
        if self.kind == "rate-alt":
            if not self.rho > self.hurst:
                raise ValueError(f"rate-alt needs rho > hurst, got rho={self.rho}")
            if self.variant not in ("observable", "oracle"):
                raise ValueError(f"variant must be observable|oracle, got {self.variant!r}")
            if self.kernel:
                raise ValueError("rate-alt derives its kernel from rho; drop the kernel key")
        else:
            head, _, arg = self.kernel.partition(":")
            if head not in ("legendre", "box") or not arg:
                raise ValueError(
                    f"kernel must be 'legendre:<order>' or 'box:<width>', got {self.kernel!r}"
                )
        if self.kind == "clt":
            if len(self.trends) != 1:
                raise ValueError("clt uses a single trend, not a panel")
            if not a <= self.t0 <= b:
                raise ValueError(f"t0={self.t0} must lie in the window [{a}, {b}]")


def _build_kernel(cfg: ExperimentConfig):
    if cfg.kind == "rate-alt":
        # rho = k + gamma with gamma in (0, 1]
        return vanishing_moment_kernel(math.ceil(cfg.rho) - 1)
    head, _, arg = cfg.kernel.partition(":")
    if head == "legendre":
        return vanishing_moment_kernel(int(arg))
    return box_kernel(float(arg))


def _bandwidth(cfg: ExperimentConfig, kernel, eps: float) -> float:
    if cfg.kind == "rate-alt":
        return bandwidth_alt(eps, cfg.rho, cfg.hurst)
    return bandwidth_main(eps, kernel.order, cfg.hurst)


def _slope_tolerance(cfg: ExperimentConfig) -> float:
    if cfg.slope_tol > 0:
        return cfg.slope_tol
    return 0.5 if cfg.kind == "rate-alt" else 0.35


_KEY_TYPES = {
    "kind": str,
    "trend": str,
    "q": int,
    "hurst": float,
    "kernel": str,
    "rho": float,
    "eps": str,
    "replications": int,
    "n": int,
    "horizon": float,
    "window": str,
    "seed": int,
    "x0": float,
    "m": int,
    "eval_points": int,
    "t0": float,
    "variant": str,
    "ceiling": float,
    "slope_tol": float,
    "var_tol": float,
}

_REQUIRED_KEYS = ("kind", "trend", "q", "hurst", "eps", "replications", "n",
                  "horizon", "window", "seed")


def parse_experiment_config(text: str) -> ExperimentConfig:
    """Parse the flat key=value grammar (# comments, one key per line)."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        key, sep, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ValueError(f"line {lineno}: expected key = value, got {line.strip()!r}")
        if key not in _KEY_TYPES:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ValueError(f"line {lineno}: empty value for {key!r}")
        try:
            raw[key] = _KEY_TYPES[key](value)
        except ValueError as exc:
            raise ValueError(
                f"line {lineno}: cannot read {key!r} as {_KEY_TYPES[key].__name__}: {value!r}"
            ) from exc
    missing = [k for k in _REQUIRED_KEYS if k not in raw]
    if missing:
        raise ValueError(f"missing required keys: {', '.join(missing)}")
    try:
        ladder = tuple(float(tok) for tok in raw["eps"].split(","))
        window = tuple(float(tok) for tok in raw["window"].split(","))
    except ValueError as exc:
        raise ValueError(f"eps/window must be comma-separated numbers: {exc}") from exc
    if len(window) != 2:
        raise ValueError(f"window takes exactly two numbers, got {len(window)}")
    trends = tuple(tok.strip() for tok in raw["trend"].split("|"))
    for t in trends:
        parse_trend(t, raw["horizon"])  # fail fast, with the trend's own message
    kwargs = dict(
        kind=raw["kind"],
        trends=trends,
        q=raw["q"],
        hurst=raw["hurst"],
        ladder=ladder,
        replications=raw["replications"],
        n=raw["n"],
        horizon=raw["horizon"],
        window=window,
        seed=raw["seed"],
    )
    for key in ("kernel", "rho", "x0", "m", "eval_points", "t0", "variant", "ceiling",
                "slope_tol", "var_tol"):
        if key in raw:
            kwargs[key] = raw[key]
    return ExperimentConfig(**kwargs)


def load_experiment_config(path) -> ExperimentConfig:
    with open(path, "r") as fh:
        return parse_experiment_config(fh.read())


# --------------------------------------------------------- theory values ---


def theoretical_rate_main(k: int, hurst: float) -> float:
    """MSE decay exponent min(2, 2(k+1)/(k+2-H)); the cap never binds for H<1."""
    if k < 0:
        raise ValueError(f"kernel order must be >= 0, got {k}")
    if not 0.5 < hurst < 1.0:
        raise ValueError(f"hurst must lie in (1/2, 1), got {hurst}")
    return min(2.0, 2.0 * (k + 1) / (k + 2.0 - hurst))


def theoretical_rate_alt(rho: float, hurst: float) -> float:
    """MSE decay exponent min(4, 2 rho / (rho - H)) for the truncated estimator."""
    if not 0.5 < hurst < 1.0:
        raise ValueError(f"hurst must lie in (1/2, 1), got {hurst}")
    if not rho > hurst:
        raise ValueError(f"rho must exceed hurst, got rho={rho}, H={hurst}")
    return min(4.0, 2.0 * rho / (rho - hurst))


# -------------------------------------------------------------- reports ----


@dataclass(frozen=True)
class ConsistencyReport:
    eps: tuple
    sup_mse: tuple
    ceiling: float
    decreasing: bool
    final_below: bool
    passed: bool


@dataclass(frozen=True)
class RateFit:
    eps: tuple
    sup_mse: tuple
    log_eps: tuple
    log_mse: tuple
    slope: float
    intercept: float
    residual_norm: float
    theoretical: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class CltReport:
    eps: float
    count: int
    mean: float
    se: float
    variance: float
    sigma2: float
    var_lo: float
    var_hi: float
    mean_ok: bool
    var_ok: bool
    passed: bool


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    report: object  # one of the three report types

    @property
    def passed(self) -> bool:
        return self.report.passed


# ---------------------------------------------------------- replications ---


def _squared_error_block(cfg: ExperimentConfig, rung: int, trend_idx: int,
                         start: int, stop: int) -> np.ndarray:
    """Squared estimator errors on the eval grid for replications [start, stop)."""
    trend = parse_trend(cfg.trends[trend_idx], cfg.horizon)
    kernel = _build_kernel(cfg)
    eps = cfg.ladder[rung]
    est = EstimatorConfig(
        kernel=kernel, bandwidth=_bandwidth(cfg, kernel, eps), window=cfg.window,
        horizon=cfg.horizon, eps=eps,
        rule="alt" if cfg.kind == "rate-alt" else "main",
    )
    ts = est.eval_grid(cfg.eval_points)
    pc = PathConfig(horizon=cfg.horizon, n=cfg.n, eps=eps, x0=cfg.x0,
                    order=cfg.q, hurst=cfg.hurst, m=cfg.m)
    grid = np.linspace(0.0, cfg.horizon, cfg.n + 1)
    if cfg.kind == "rate-alt":
        target = np.asarray(trend.value(ts), dtype=float)
    else:
        ode = solve_ode(trend, cfg.x0, grid)
        target = np.asarray(trend.value(ts), dtype=float) * np.interp(ts, grid, ode)
    block = np.empty((stop - start, len(ts)))
    for i, r in enumerate(range(start, stop)):
        path = simulate_path(trend, pc, derive_seed(cfg.seed, rung, trend_idx, r))
        if cfg.kind == "rate-alt":
            est_vals = alternate_estimate(
                path, est, ts, trend.bound, cfg.x0, cfg.variant, trend
            )
        else:
            est_vals = kernel_estimate_product(path, est, ts)
        block[i] = (est_vals - target) ** 2
    return block


def _normalized_error_block(cfg: ExperimentConfig, start: int, stop: int) -> np.ndarray:
    """Normalized errors eps^{-alpha} (est - J(t0) - phi^{k+1} bias) per rep."""
    trend = parse_trend(cfg.trends[0], cfg.horizon)
    kernel = _build_kernel(cfg)
    eps = cfg.ladder[0]
    k = kernel.order
    phi = _bandwidth(cfg, kernel, eps)
    alpha = (k + 1.0) / (k - cfg.hurst + 2.0)
    est = EstimatorConfig(kernel=kernel, bandwidth=phi, window=cfg.window,
                          horizon=cfg.horizon, eps=eps, rule="main")
    pc = PathConfig(horizon=cfg.horizon, n=cfg.n, eps=eps, x0=cfg.x0,
                    order=cfg.q, hurst=cfg.hurst, m=cfg.m)
    grid = np.linspace(0.0, cfg.horizon, cfg.n + 1)
    ode = solve_ode(trend, cfg.x0, grid)
    center = (
        float(trend.value(cfg.t0)) * float(np.interp(cfg.t0, grid, ode))
        + phi ** (k + 1) * bias_center_term(trend, cfg.x0, cfg.t0, k, kernel)
    )
    scale = eps ** (-alpha)
    block = np.empty(stop - start)
    for i, r in enumerate(range(start, stop)):
        path = simulate_path(trend, pc, derive_seed(cfg.seed, 0, 0, r))
        block[i] = scale * (kernel_estimate_product(path, est, cfg.t0) - center)
    return block


def _run_block(task):
    cfg, rung, trend_idx, start, stop = task
    if cfg.kind == "clt":
        return rung, trend_idx, start, _normalized_error_block(cfg, start, stop)
    return rung, trend_idx, start, _squared_error_block(cfg, rung, trend_idx, start, stop)


def _gather(cfg: ExperimentConfig, workers: int) -> np.ndarray:
    """All replication results, indexed (rung, trend, rep[, eval point])."""
    n_rungs, n_trends, reps = len(cfg.ladder), len(cfg.trends), cfg.replications
    points = 1 if cfg.kind == "clt" else cfg.eval_points
    out = np.full((n_rungs, n_trends, reps, points), np.nan)
    chunk = max(1, -(-reps // (4 * max(workers, 1))))
    tasks = [
        (cfg, rung, trend_idx, start, min(start + chunk, reps))
        for rung in range(n_rungs)
        for trend_idx in range(n_trends)
        for start in range(0, reps, chunk)
    ]
    if workers <= 1:
        results = map(_run_block, tasks)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        try:
            results = list(pool.map(_run_block, tasks))
        finally:
            pool.shutdown()
    for rung, trend_idx, start, block in results:
        out[rung, trend_idx, start : start + len(block)] = block.reshape(len(block), points)
    assert not np.isnan(out).any()
    return out


# ------------------------------------------------------------- runners -----


def _sup_mse_per_rung(cfg: ExperimentConfig, workers: int) -> np.ndarray:
    blocks = _gather(cfg, workers)
    # mean over replications first (per t), then sup over trends and t
    mse = blocks.mean(axis=2)
    return mse.max(axis=(1, 2))


def consistency_side_conditions(ladder, bandwidths, hurst: float) -> None:
    """Require phi and eps^2 phi^{2H-2} to fall strictly along the ladder."""
    noise = [e**2 * p ** (2.0 * hurst - 2.0) for e, p in zip(ladder, bandwidths)]
    if any(b >= a for a, b in zip(bandwidths, bandwidths[1:])):
        raise ConditionViolated("bandwidth does not decrease along the ladder")
    if any(b >= a for a, b in zip(noise, noise[1:])):
        raise ConditionViolated(
            "eps^2 phi^{2H-2} does not decrease along the ladder; the "
            "consistency conditions fail for this bandwidth rule"
        )


def _check_side_conditions(cfg: ExperimentConfig) -> None:
    kernel = _build_kernel(cfg)
    phis = [_bandwidth(cfg, kernel, e) for e in cfg.ladder]
    consistency_side_conditions(cfg.ladder, phis, cfg.hurst)


def run_consistency(cfg: ExperimentConfig, workers: int = 1) -> ConsistencyReport:
    if cfg.kind != "consistency":
        raise ValueError(f"expected kind=consistency, got {cfg.kind}")
    _check_side_conditions(cfg)
    sup = _sup_mse_per_rung(cfg, workers)
    ceiling = cfg.ceiling if cfg.ceiling > 0 else float(sup[0]) / 4.0
    decreasing = bool(np.all(np.diff(sup) < 0))
    final_below = bool(sup[-1] < ceiling)
    return ConsistencyReport(
        eps=tuple(cfg.ladder),
        sup_mse=tuple(float(s) for s in sup),
        ceiling=float(ceiling),
        decreasing=decreasing,
        final_below=final_below,
        passed=decreasing and final_below,
    )


def run_rate(cfg: ExperimentConfig, workers: int = 1) -> RateFit:
    if cfg.kind not in ("rate-main", "rate-alt"):
        raise ValueError(f"expected a rate kind, got {cfg.kind}")
    sup = _sup_mse_per_rung(cfg, workers)
    if np.any(sup <= 0):
        raise FitDegenerate("sup-MSE nonpositive at some rung; cannot take logs")
    log_eps = np.log(np.asarray(cfg.ladder))
    log_mse = np.log(sup)
    slope, intercept = np.polyfit(log_eps, log_mse, 1)
    resid = log_mse - (slope * log_eps + intercept)
    if cfg.kind == "rate-main":
        theory = theoretical_rate_main(_build_kernel(cfg).order, cfg.hurst)
    else:
        theory = theoretical_rate_alt(cfg.rho, cfg.hurst)
    tol = _slope_tolerance(cfg)
    return RateFit(
        eps=tuple(cfg.ladder),
        sup_mse=tuple(float(s) for s in sup),
        log_eps=tuple(float(v) for v in log_eps),
        log_mse=tuple(float(v) for v in log_mse),
        slope=float(slope),
        intercept=float(intercept),
        residual_norm=float(np.sqrt(np.sum(resid**2))),
        theoretical=float(theory),
        tolerance=float(tol),
        passed=bool(abs(slope - theory) <= tol),
    )


def run_clt(cfg: ExperimentConfig, workers: int = 1) -> CltReport:
    if cfg.kind != "clt":
        raise ValueError(f"expected kind=clt, got {cfg.kind}")
    errors = _gather(cfg, workers)[0, 0, :, 0]
    kernel = _build_kernel(cfg)
    sigma2 = asymptotic_variance(kernel, cfg.hurst)
    mean = float(np.mean(errors))
    variance = float(np.var(errors, ddof=1))
    se = math.sqrt(variance / len(errors))
    var_lo, var_hi = sigma2 * (1.0 - cfg.var_tol), sigma2 * (1.0 + cfg.var_tol)
    mean_ok = abs(mean) <= 3.0 * se
    var_ok = var_lo <= variance <= var_hi
    return CltReport(
        eps=float(cfg.ladder[0]),
        count=len(errors),
        mean=mean,
        se=se,
        variance=variance,
        sigma2=float(sigma2),
        var_lo=float(var_lo),
        var_hi=float(var_hi),
        mean_ok=mean_ok,
        var_ok=var_ok,
        passed=mean_ok and var_ok,
    )


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    runner = {
        "consistency": run_consistency,
        "rate-main": run_rate,
        "rate-alt": run_rate,
        "clt": run_clt,
    }[cfg.kind]
    return ExperimentResult(config=cfg, report=runner(cfg, workers))


# -------------------------------------------------------------- reports ----


def _fmt(value) -> str:
    # shortest round-trip float formatting: exact and free of digit noise
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _config_lines(cfg: ExperimentConfig):
    """Echo the resolved config, re-parsable once the leading '# ' is dropped."""
    for f in fields(cfg):
        key, value = f.name, getattr(cfg, f.name)
        if key == "trends":
            key, value = "trend", " | ".join(value)
        elif key == "ladder":
            key, value = "eps", ",".join(_fmt(v) for v in value)
        elif isinstance(value, tuple):
            value = ",".join(_fmt(v) for v in value)
        if key == "kernel" and not value:
            continue  # rate-alt derives the kernel; nothing to echo
        yield f"# {key} = {_fmt(value)}"


def write_report(result, out_dir) -> list:
    """results.csv + summary.txt (+ rate_fit.csv for rate kinds); no timestamps.

    ``result=None`` writes header-only files, for pipelines that filtered
    every experiment out.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def emit(name, text):
        path = os.path.join(out_dir, name)
        with open(path, "w", newline="") as fh:
            fh.write(text)
        written.append(path)

    if result is None:
        emit("results.csv", "eps,sup_mse,log_eps,log_mse\n")
        emit("summary.txt", "no experiments\n")
        return written

    cfg, rep = result.config, result.report
    header = "\n".join(_config_lines(cfg))
    if isinstance(rep, CltReport):
        rows = ["eps,statistic,value"]
        for stat in ("count", "mean", "se", "variance", "sigma2", "var_lo", "var_hi"):
            rows.append(f"{_fmt(rep.eps)},{stat},{_fmt(getattr(rep, stat))}")
        emit("results.csv", "\n".join(rows) + "\n")
        summary = [
            header,
            f"mean={_fmt(rep.mean)}, se={_fmt(rep.se)}, pass={rep.mean_ok}",
            f"variance={_fmt(rep.variance)}, sigma2={_fmt(rep.sigma2)}, "
            f"band=[{_fmt(rep.var_lo)}, {_fmt(rep.var_hi)}], pass={rep.var_ok}",
            f"pass={rep.passed}",
        ]
        emit("summary.txt", "\n".join(summary) + "\n")
        return written

    rows = ["eps,sup_mse,log_eps,log_mse"]
    if isinstance(rep, RateFit):
        for e, s, le, lm in zip(rep.eps, rep.sup_mse, rep.log_eps, rep.log_mse):
            rows.append(f"{_fmt(e)},{_fmt(s)},{_fmt(le)},{_fmt(lm)}")
    else:
        for e, s in zip(rep.eps, rep.sup_mse):
            rows.append(f"{_fmt(e)},{_fmt(s)},{_fmt(math.log(e))},{_fmt(math.log(s))}")
    emit("results.csv", "\n".join(rows) + "\n")

    if isinstance(rep, RateFit):
        center_e = sum(rep.log_eps) / len(rep.log_eps)
        center_m = sum(rep.log_mse) / len(rep.log_mse)
        fit_rows = ["log_eps,log_mse,fitted,theory_line"]
        for le, lm in zip(rep.log_eps, rep.log_mse):
            fitted = rep.slope * le + rep.intercept
            theory = rep.theoretical * (le - center_e) + center_m
            fit_rows.append(f"{_fmt(le)},{_fmt(lm)},{_fmt(fitted)},{_fmt(theory)}")
        emit("rate_fit.csv", "\n".join(fit_rows) + "\n")
        summary = [
            header,
            f"slope={_fmt(rep.slope)}, theory={_fmt(rep.theoretical)}, pass={rep.passed}",
            f"tolerance={_fmt(rep.tolerance)}, intercept={_fmt(rep.intercept)}, "
            f"residual_norm={_fmt(rep.residual_norm)}",
        ]
    else:
        summary = [header]
        for e, s in zip(rep.eps, rep.sup_mse):
            summary.append(f"eps={_fmt(e)} sup_mse={_fmt(s)}")
        summary.append(
            f"decreasing={rep.decreasing}, final={_fmt(rep.sup_mse[-1])}, "
            f"ceiling={_fmt(rep.ceiling)}, pass={rep.passed}"
        )
    emit("summary.txt", "\n".join(summary) + "\n")
    return written
