"""Kernel-type estimators of the trend multiplier.

The product estimator smooths path increments against a vanishing-moment
kernel: (1/phi) sum_j G((s_j - t)/phi) dX_j, estimating J(t) = theta(t) x_t.
Dividing by X_t (behind a floor guard) yields theta itself.  A truncated
variant multiplies by the indicator of the path staying above a decaying
threshold, in either an observable form (increments of dX/X) or an oracle
form that consumes the true trend and driving noise and therefore only makes
sense inside a simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .kernels import Kernel, kernel_moment
from .sde import SdePath
from .trends import TrendFunction

__all__ = [
    "EstimatorConfig",
    "EstimateSeries",
    "bandwidth_main",
    "bandwidth_alt",
    "default_division_floor",
    "kernel_estimate_product",
    "kernel_estimate_theta",
    "estimate_series",
    "bias_center_term",
    "indicator_path",
    "alternate_estimate",
]


# ---------------------------------------------------------------- config ---


@dataclass(frozen=True)
class EstimatorConfig:
    """Kernel, bandwidth, and evaluation window for one estimation pass.

    The window constraint keeps the kernel support inside [0, horizon] for
    every evaluation point, in both orientations (s - t and t - s), so no
    estimate is ever truncated at the boundary.
    """

    kernel: Kernel
    bandwidth: float
    window: tuple
    horizon: float
    eps: float = 0.0
    rule: str = "manual"

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")
        a, b = self.window
        if not (0.0 < a <= b < self.horizon):
            raise ValueError(
                f"window [{a}, {b}] must sit strictly inside (0, {self.horizon})"
            )
        lo, hi = self.kernel.support
        phi = self.bandwidth
        reach_lo = min(a - hi * phi, a + lo * phi)
        reach_hi = max(b - lo * phi, b + hi * phi)
        if reach_lo < 0.0 or reach_hi > self.horizon:
            raise ValueError(
                f"kernel window [{reach_lo:.6g}, {reach_hi:.6g}] overflows "
                f"[0, {self.horizon}]; shrink the bandwidth or the window"
            )

    def eval_grid(self, points: int = 21) -> np.ndarray:
        a, b = self.window
        return np.linspace(a, b, points)


@dataclass(frozen=True)
class EstimateSeries:
    times: np.ndarray
    product: np.ndarray  # estimates of J(t) = theta(t) x_t
    theta: np.ndarray  # NaN where the division guard fired
    valid: np.ndarray  # False exactly where the guard fired


# ------------------------------------------------------------- bandwidth ---


def bandwidth_main(eps: float, k: int, hurst: float) -> float:
    """phi = eps^{1/(k - H + 2)}, the rate-optimal choice for order k."""
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    if not 0.5 < hurst < 1.0:
        raise ValueError(f"hurst must lie in (1/2, 1), got {hurst}")
    if k < 0:
        raise ValueError(f"kernel order must be >= 0, got {k}")
    return eps ** (1.0 / (k - hurst + 2.0))


def bandwidth_alt(eps: float, rho: float, hurst: float) -> float:
    """phi = eps^{1/(rho - H)} for the truncated estimator, rho > H."""
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    if not rho > hurst:
        raise ValueError(f"smoothness rho must exceed hurst, got rho={rho}, H={hurst}")
    return eps ** (1.0 / (rho - hurst))


def default_division_floor(x0: float, bound_constant: float, horizon: float) -> float:
    """Half the worst-case noiseless level, x0 e^{-LT} / 2."""
    return 0.5 * x0 * math.exp(-bound_constant * horizon)


# ----------------------------------------------------------- estimators ----


def _weighted_increment_sum(
    times: np.ndarray,
    increments: np.ndarray,
    kernel: Kernel,
    bandwidth: float,
    eval_times: np.ndarray,
    reflect: bool = False,
) -> np.ndarray:
    """(1/phi) sum_j G(arg_j) dI_j with midpoint kernel arguments."""
    mids = 0.5 * (times[:-1] + times[1:])
    out = np.empty(len(eval_times))
    for i, t in enumerate(eval_times):
        arg = (t - mids) if reflect else (mids - t)
        weights = kernel.evaluate(arg / bandwidth)
        out[i] = float(weights @ increments) / bandwidth
    return out


def kernel_estimate_product(path: SdePath, cfg: EstimatorConfig, t):
    """Estimate J(t) = theta(t) x_t by kernel smoothing of the increments."""
    scalar = np.ndim(t) == 0
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    est = _weighted_increment_sum(
        path.times, np.diff(path.values), cfg.kernel, cfg.bandwidth, ts
    )
    return float(est[0]) if scalar else est


def kernel_estimate_theta(path: SdePath, cfg: EstimatorConfig, t, division_floor: float):
    """Product estimate divided by X_t; NaN wherever |X_t| < division_floor."""
    scalar = np.ndim(t) == 0
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    prod = _weighted_increment_sum(
        path.times, np.diff(path.values), cfg.kernel, cfg.bandwidth, ts
    )
    level = np.interp(ts, path.times, path.values)
    valid = np.abs(level) >= division_floor
    theta = np.where(valid, prod / np.where(valid, level, 1.0), np.nan)
    return (float(theta[0]) if scalar else theta)


def estimate_series(
    path: SdePath,
    cfg: EstimatorConfig,
    points: int = 21,
    division_floor: float = None,
) -> EstimateSeries:
    """Product and theta estimates over the evaluation window."""
    if division_floor is None:
        division_floor = 0.5 * path.config.x0
    ts = cfg.eval_grid(points)
    prod = _weighted_increment_sum(
        path.times, np.diff(path.values), cfg.kernel, cfg.bandwidth, ts
    )
    level = np.interp(ts, path.times, path.values)
    valid = np.abs(level) >= division_floor
    theta = np.where(valid, prod / np.where(valid, level, 1.0), np.nan)
    return EstimateSeries(times=ts, product=prod, theta=theta, valid=valid)


# ------------------------------------------------------------ bias term ----


def bias_center_term(
    trend: TrendFunction, x0: float, t: float, k: int, kernel: Kernel
) -> float:
    """J^{(k+1)}(t) m_{k+1}(G) / (k+1)!, the center of the normalized error.

    Derivatives of J = theta * x come from the Leibniz rule with
    x^{(m+1)} = (theta x)^{(m)}, seeded by x(t) = x0 exp(int_0^t theta).
    Raises DerivativeUnavailable through trend.derivative when the trend
    cannot certify theta^{(k+1)}.
    """
    integral, _ = quad(trend.value, 0.0, t, limit=200)
    theta_derivs = [float(trend.derivative(i)(t)) for i in range(k + 2)]
    d = [x0 * math.exp(integral)]  # d[m] = x^{(m)}(t)
    for m in range(k + 2):
        d.append(sum(math.comb(m, i) * theta_derivs[i] * d[m - i] for i in range(m + 1)))
    return d[k + 2] * kernel_moment(kernel, k + 1) / math.factorial(k + 1)


# ------------------------------------------------------ truncated variant --


def indicator_path(times: np.ndarray, values: np.ndarray, x0: float, bound_constant: float) -> np.ndarray:
    """Latched indicator of the running minimum staying above x0 e^{-Lt} / 2.

    Latching (once False, stays False) keeps the event path monotone even
    though the threshold itself decays.
    """
    threshold = 0.5 * x0 * np.exp(-bound_constant * times)
    ok = np.minimum.accumulate(values) >= threshold
    return np.logical_and.accumulate(ok)


def alternate_estimate(
    path: SdePath,
    cfg: EstimatorConfig,
    t,
    bound_constant: float,
    x0: float,
    variant: str = "observable",
    trend: TrendFunction = None,
):
    """Truncated estimate I(A_T) (1/phi) sum_j G((t - s_j)/phi) dY_j.

    variant "observable" builds dY = I dX / X from the path alone; variant
    "oracle" builds dY = theta I dt + eps (2/x0) e^{LT} I dZ from the true
    trend and driving noise, so it is only available in simulations.
    """
    indicator = indicator_path(path.times, path.values, x0, bound_constant)
    ind_left = indicator[:-1].astype(float)
    if variant == "observable":
        x_left = path.values[:-1]
        safe = np.where(ind_left > 0, x_left, 1.0)
        dy = ind_left * np.diff(path.values) / safe
    elif variant == "oracle":
        if trend is None:
            raise ValueError("variant 'oracle' needs the true trend")
        dt = path.times[1] - path.times[0]
        amp = path.config.eps * (2.0 / x0) * math.exp(bound_constant * path.config.horizon)
        theta_left = np.asarray(trend.value(path.times[:-1]), dtype=float)
        dy = ind_left * (theta_left * dt + amp * np.diff(path.noise))
    else:
        raise ValueError(f"unknown variant {variant!r} (expected 'observable' or 'oracle')")
    scalar = np.ndim(t) == 0
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    est = float(indicator[-1]) * _weighted_increment_sum(
        path.times, dy, cfg.kernel, cfg.bandwidth, ts, reflect=True
    )
    return float(est[0]) if scalar else est
