"""Exact simulation of fractional Gaussian noise and fractional Brownian motion.

fGn with Hurst index h in (1/2, 1) is sampled by circulant embedding of the
Toeplitz autocovariance (Davies-Harte).  The embedding is exact: the returned
vector has the target autocovariance in every coordinate, not asymptotically.
If the circulant eigenvalues fail to be nonnegative the sampler falls back to
a dense Cholesky factorisation of the covariance; ``EmbeddingFailure`` is
raised only when both routes fail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .rng import philox_generator

__all__ = [
    "EmbeddingFailure",
    "FgnSpec",
    "GaussianPath",
    "fgn_autocovariance",
    "sample_fgn",
    "sample_fbm",
]


class EmbeddingFailure(RuntimeError):
    """Neither circulant embedding nor dense factorisation could produce the path."""


# ---------------------------------------------------------------- types ----


@dataclass(frozen=True)
class FgnSpec:
    """Unit-variance stationary fractional Gaussian noise.

    Parameters
    ----------
    hurst : float
        Hurst index, strictly inside (1/2, 1).
    n : int
        Number of samples, >= 1.
    step : float
        Time spacing between consecutive samples (metadata used by samplers
        that integrate the noise; the marginal law does not depend on it).
    """

    hurst: float
    n: int
    step: float = 1.0

    def __post_init__(self):
        if not 0.5 < self.hurst < 1.0:
            raise ValueError(f"hurst must lie strictly in (0.5, 1), got {self.hurst}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not self.step > 0.0:
            raise ValueError(f"step must be positive, got {self.step}")


@dataclass(frozen=True)
class GaussianPath:
    """Sampled Gaussian path plus the spec and seed that produced it."""

    times: np.ndarray
    values: np.ndarray
    spec: FgnSpec
    seed: int


# ----------------------------------------------------------- covariance ----


def fgn_autocovariance(lag, hurst: float):
    """Autocovariance of unit-variance fGn.

    r(lag) = ((|lag|+1)^(2h) - 2|lag|^(2h) + ||lag|-1|^(2h)) / 2.  Accepts a
    scalar or an array of lags; r(0) = 1 for every admissible h.
    """
    if not 0.5 < hurst < 1.0:
        raise ValueError(f"hurst must lie strictly in (0.5, 1), got {hurst}")
    scalar = np.ndim(lag) == 0
    k = np.abs(np.asarray(lag, dtype=float))
    two_h = 2.0 * hurst
    out = 0.5 * ((k + 1.0) ** two_h - 2.0 * k**two_h + np.abs(k - 1.0) ** two_h)
    return float(out) if scalar else out


# Circulant eigenvalues depend only on (n, hurst); memoised across paths.
_EIG_CACHE: dict[tuple[int, float], np.ndarray] = {}


def _circulant_eigenvalues(n: int, hurst: float) -> np.ndarray:
    key = (n, hurst)
    eig = _EIG_CACHE.get(key)
    if eig is None:
        r = fgn_autocovariance(np.arange(n + 1), hurst)
        row = np.concatenate([r, r[-2:0:-1]])  # first row of the 2n circulant
        eig = np.fft.fft(row).real
        _EIG_CACHE[key] = eig
    return eig


# -------------------------------------------------------------- sampling ---


def _sample_circulant(eig: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    m = 2 * n
    w = np.zeros(m, dtype=complex)
    head = rng.standard_normal(2)
    u = rng.standard_normal(n - 1)
    v = rng.standard_normal(n - 1)
    w[0] = np.sqrt(eig[0]) * head[0]
    w[n] = np.sqrt(eig[n]) * head[1]
    w[1:n] = np.sqrt(0.5 * eig[1:n]) * (u + 1j * v)
    w[n + 1 :] = np.conj(w[1:n][::-1])
    # FFT of a conjugate-symmetric vector is real; /sqrt(m) restores covariance.
    return np.fft.fft(w).real[:n] / np.sqrt(m)


def _sample_dense(spec: FgnSpec, rng: np.random.Generator) -> np.ndarray:
    cov = toeplitz(fgn_autocovariance(np.arange(spec.n), spec.hurst))
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise EmbeddingFailure(
            f"circulant eigenvalues negative and Cholesky failed for {spec}"
        ) from exc
    return chol @ rng.standard_normal(spec.n)


def sample_fgn(spec: FgnSpec, seed: int) -> GaussianPath:
    """Draw one exact fGn path.  Pure function of (spec, seed)."""
    rng = philox_generator(seed)
    eig = _circulant_eigenvalues(spec.n, spec.hurst)
    # Tiny negative eigenvalues are FFT roundoff on a genuinely PSD embedding.
    if eig.min() >= -1e-12 * eig.max():
        values = _sample_circulant(np.clip(eig, 0.0, None), spec.n, rng)
    else:
        values = _sample_dense(spec, rng)
    times = spec.step * np.arange(spec.n, dtype=float)
    return GaussianPath(times=times, values=values, spec=spec, seed=int(seed))


def sample_fbm(hurst: float, horizon: float, n: int, seed: int) -> GaussianPath:
    """Fractional Brownian motion on [0, horizon] observed at n+1 uniform times.

    B_0 = 0 and increments are (horizon/n)^hurst times exact unit fGn, so the
    path covariance is (s^(2h) + t^(2h) - |t-s|^(2h)) / 2 without
    discretisation bias at the grid times.
    """
    if not horizon > 0.0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    spec = FgnSpec(hurst=hurst, n=n, step=horizon / n)
    noise = sample_fgn(spec, seed)
    values = np.concatenate([[0.0], np.cumsum(spec.step**hurst * noise.values)])
    times = np.linspace(0.0, horizon, n + 1)
    return GaussianPath(times=times, values=values, spec=spec, seed=int(seed))
