"""Trend (multiplier) function library with certified bounds and derivatives.

Every trend carries a certified bound on sup |theta| over [0, horizon] (used
by pathwise error bounds and by the truncated estimator's threshold) and an
analytic derivative factory.  Rough trends expose Hoelder metadata
(k, gamma, rho = k + gamma) and deliberately refuse derivative orders beyond
what the class guarantees.

A small grammar builds trends from strings, e.g. ``const:0.5``,
``sin:0,0.5,6.283185307179586``, ``poly:1,-0.5,0.25``,
``weier:0.3,0.5,3,12``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "DerivativeUnavailable",
    "TrendFunction",
    "constant_trend",
    "sinusoid_trend",
    "polynomial_trend",
    "weierstrass_trend",
    "parse_trend",
]


class DerivativeUnavailable(ValueError):
    """Requested derivative order is not guaranteed for this trend's class."""


@dataclass(frozen=True)
class TrendFunction:
    """A multiplier t -> theta(t) on [0, horizon] with certified metadata.

    bound      : certified sup_{[0, horizon]} |theta|.
    smoothness : "smooth" (every derivative available) or "holder".
    gamma, holder_constant, holder_k : for "holder" trends the k-th derivative
    is gamma-Hoelder with the given constant; rho = k + gamma.
    """

    label: str
    horizon: float
    bound: float
    value: Callable = field(compare=False, repr=False)
    _deriv: Callable = field(compare=False, repr=False)
    smoothness: str = "smooth"
    holder_k: int = 0
    gamma: float = 1.0
    holder_constant: float = 0.0

    def __call__(self, t):
        return self.value(t)

    def derivative(self, order: int) -> Callable:
        if order < 0:
            raise ValueError(f"derivative order must be >= 0, got {order}")
        if order == 0:
            return self.value
        fn = self._deriv(order)
        if fn is None:
            raise DerivativeUnavailable(
                f"trend {self.label!r} guarantees derivatives only up to order "
                f"{self.holder_k}; order {order} requested"
            )
        return fn

    @property
    def rho(self) -> float:
        """Smoothness index k + gamma; infinity for smooth trends."""
        return math.inf if self.smoothness == "smooth" else self.holder_k + self.gamma


# ---------------------------------------------------------- constructors ---


def _as_output(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def constant_trend(level: float, horizon: float = 1.0) -> TrendFunction:
    level = float(level)

    def value(t):
        return _as_output(np.full_like(np.asarray(t, dtype=float), level))

    def deriv(order):
        return lambda t: _as_output(np.zeros_like(np.asarray(t, dtype=float)))

    return TrendFunction(
        label=f"const:{level:g}",
        horizon=float(horizon),
        bound=abs(level),
        value=value,
        _deriv=deriv,
    )


def sinusoid_trend(
    offset: float, amplitude: float, omega: float, horizon: float = 1.0
) -> TrendFunction:
    """theta(t) = offset + amplitude * sin(omega t)."""
    offset, amplitude, omega = float(offset), float(amplitude), float(omega)

    def value(t):
        return _as_output(offset + amplitude * np.sin(omega * np.asarray(t, dtype=float)))

    def deriv(order):
        # d^m/dt^m sin(omega t) = omega^m sin(omega t + m pi/2)
        shift = order * math.pi / 2.0
        scale = amplitude * omega**order

        def fn(t):
            return _as_output(scale * np.sin(omega * np.asarray(t, dtype=float) + shift))

        return fn

    return TrendFunction(
        label=f"sin:{offset:g},{amplitude:g},{omega:g}",
        horizon=float(horizon),
        bound=abs(offset) + abs(amplitude),
        value=value,
        _deriv=deriv,
    )


def polynomial_trend(coeffs, horizon: float = 1.0) -> TrendFunction:
    """theta(t) = sum_i coeffs[i] t^i; bound certified as sum |c_i| horizon^i."""
    coeffs = tuple(float(c) for c in coeffs)
    if not coeffs:
        raise ValueError("polynomial trend needs at least one coefficient")
    poly = np.polynomial.Polynomial(coeffs)
    bound = sum(abs(c) * float(horizon) ** i for i, c in enumerate(coeffs))

    def deriv(order):
        dpoly = poly.deriv(order)
        return lambda t: _as_output(dpoly(np.asarray(t, dtype=float)))

    return TrendFunction(
        label="poly:" + ",".join(f"{c:g}" for c in coeffs),
        horizon=float(horizon),
        bound=bound,
        value=lambda t: _as_output(poly(np.asarray(t, dtype=float))),
        _deriv=deriv,
    )


def weierstrass_trend(
    amplitude: float, decay: float, lacunarity: float, terms: int, horizon: float = 1.0
) -> TrendFunction:
    """Integrated Weierstrass partial sum: rough first derivative.

    theta(t) = amplitude * sum_{j<terms} decay^j lacunarity^(-j) sin(lacunarity^j t).
    theta'(t) = amplitude * sum_j decay^j cos(lacunarity^j t) is gamma-Hoelder
    with gamma = min(1, ln(1/decay)/ln(lacunarity)); derivatives of order >= 2
    are deliberately unavailable (rho = 1 + gamma < 2 in the interesting range).
    """
    amplitude, decay, lacunarity = float(amplitude), float(decay), float(lacunarity)
    terms = int(terms)
    if not 0.0 < decay < 1.0:
        raise ValueError(f"decay must lie in (0, 1), got {decay}")
    if lacunarity <= 1.0:
        raise ValueError(f"lacunarity must exceed 1, got {lacunarity}")
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")
    j = np.arange(terms)
    weights = amplitude * decay**j / lacunarity**j
    freqs = lacunarity**j
    gamma = min(1.0, math.log(1.0 / decay) / math.log(lacunarity))
    # |cos x - cos y| <= 2^(1-gamma) |x-y|^gamma, summed over the partial sum.
    holder_constant = (
        amplitude * 2.0 ** (1.0 - gamma) * float(np.sum((decay * lacunarity**gamma) ** j))
    )

    def value(t):
        t = np.asarray(t, dtype=float)
        return _as_output(np.sum(weights * np.sin(np.multiply.outer(t, freqs)), axis=-1))

    def deriv(order):
        if order > 1:
            return None

        def fn(t):
            t = np.asarray(t, dtype=float)
            return _as_output(
                amplitude * np.sum(decay**j * np.cos(np.multiply.outer(t, freqs)), axis=-1)
            )

        return fn

    return TrendFunction(
        label=f"weier:{amplitude:g},{decay:g},{lacunarity:g},{terms}",
        horizon=float(horizon),
        bound=float(np.sum(np.abs(weights))),
        value=value,
        _deriv=deriv,
        smoothness="holder",
        holder_k=1,
        gamma=gamma,
        holder_constant=holder_constant,
    )


# ---------------------------------------------------------------- parser ---


def parse_trend(text: str, horizon: float = 1.0) -> TrendFunction:
    """Build a trend from the mini-grammar ``kind:arg,arg,...``."""
    kind, sep, argstr = text.strip().partition(":")
    if not sep:
        raise ValueError(f"trend spec {text!r} lacks ':' separator")
    try:
        args = [float(a) for a in argstr.split(",")] if argstr else []
    except ValueError as exc:
        raise ValueError(f"trend spec {text!r}: non-numeric argument") from exc
    if kind == "const":
        if len(args) != 1:
            raise ValueError(f"const trend takes 1 argument, got {len(args)}")
        return constant_trend(args[0], horizon)
    if kind == "sin":
        if len(args) != 3:
            raise ValueError(f"sin trend takes 3 arguments (offset, amplitude, omega), got {len(args)}")
        return sinusoid_trend(*args, horizon=horizon)
    if kind == "poly":
        if not args:
            raise ValueError("poly trend needs at least one coefficient")
        return polynomial_trend(args, horizon)
    if kind == "weier":
        if len(args) != 4:
            raise ValueError(
                f"weier trend takes 4 arguments (amplitude, decay, lacunarity, terms), got {len(args)}"
            )
        if args[3] != int(args[3]):
            raise ValueError(f"weier term count must be an integer, got {args[3]}")
        return weierstrass_trend(args[0], args[1], args[2], int(args[3]), horizon)
    raise ValueError(f"unknown trend kind {kind!r} (expected const|sin|poly|weier)")
