"""Bank of compactly supported polynomial kernels with exact moment algebra.

A kernel is a piecewise polynomial with rational coefficients.  Construction,
moments, the autocorrelation psi(w) = int G(u) G(u+w) du, and the power-law
part of the asymptotic variance functional are all computed in exact rational
arithmetic (floats appear only in the final irrational power-law step), so
moment identities hold to full double precision rather than to solver
tolerance.

``vanishing_moment_kernel(k)`` solves the k+1 moment conditions in the even
Legendre basis with the endpoint condition G(1) = 0 for k >= 1; this yields
the box (k = 0), Epanechnikov (k = 1), and the quartic kernel (k = 3) as the
first representatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np
from scipy.integrate import quad

from . import exactpoly as xp

__all__ = [
    "Kernel",
    "KernelPiece",
    "vanishing_moment_kernel",
    "box_kernel",
    "rescale_kernel",
    "kernel_moment",
    "kernel_autocorrelation",
    "asymptotic_variance",
    "asymptotic_variance_quadrature",
    "wiener_integrability_check",
    "kernel_to_text",
    "kernel_from_text",
    "MAX_KERNEL_ORDER",
]

# Beyond this the monomial coefficients overwhelm double precision when the
# kernel is finally evaluated in floats.
MAX_KERNEL_ORDER = 12


# ---------------------------------------------------------------- types ----


@dataclass(frozen=True)
class KernelPiece:
    lo: Fraction
    hi: Fraction
    coeffs: tuple  # Fractions, ascending powers

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"piece must have lo < hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class Kernel:
    """Piecewise-polynomial kernel with declared vanishing-moment order."""

    order: int
    pieces: tuple  # KernelPiece, ordered, non-overlapping

    def __post_init__(self):
        if not self.pieces:
            raise ValueError("kernel needs at least one piece")
        for left, right in zip(self.pieces, self.pieces[1:]):
            if left.hi > right.lo:
                raise ValueError("kernel pieces overlap")

    @property
    def support(self) -> tuple:
        return (float(self.pieces[0].lo), float(self.pieces[-1].hi))

    @cached_property
    def _float_pieces(self):
        return [
            (float(p.lo), float(p.hi), np.array([float(c) for c in p.coeffs]))
            for p in self.pieces
        ]

    def evaluate(self, u):
        scalar = np.ndim(u) == 0
        arr = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.zeros_like(arr)
        last = len(self._float_pieces) - 1
        for i, (lo, hi, coeffs) in enumerate(self._float_pieces):
            mask = (arr >= lo) & (arr < hi) if i < last else (arr >= lo) & (arr <= hi)
            if mask.any():
                acc = np.zeros(int(mask.sum()))
                for c in coeffs[::-1]:
                    acc = acc * arr[mask] + c
                out[mask] = acc
        return float(out[0]) if scalar else out

    __call__ = evaluate


# ----------------------------------------------------------- construction --


@lru_cache(maxsize=None)
def _legendre_coeffs(degree: int) -> tuple:
    """Monomial coefficients of the Legendre polynomial P_degree, exact."""
    if degree == 0:
        return (Fraction(1),)
    if degree == 1:
        return (Fraction(0), Fraction(1))
    prev2, prev1 = _legendre_coeffs(degree - 2), _legendre_coeffs(degree - 1)
    shifted = (Fraction(0),) + prev1  # u * P_{degree-1}
    term1 = xp.poly_scale(shifted, Fraction(2 * degree - 1, degree))
    term2 = xp.poly_scale(prev2, Fraction(-(degree - 1), degree))
    return xp.poly_add(term1, term2)


def _monomial_moment(poly, j: int) -> Fraction:
    """Exact int_{-1}^{1} u^j poly(u) du."""
    total = Fraction(0)
    for c, coef in enumerate(poly):
        if (j + c) % 2 == 0:
            total += coef * Fraction(2, j + c + 1)
    return total


def order_k_legendre_coefficients(k: int) -> tuple:
    """Coefficients a_s of G = sum_s a_s P_{2s} solving the moment conditions.

    a_0 fixes int G = 1; a_1..a_r kill the even moments 2..2r (odd moments
    vanish by symmetry); the last coefficient enforces G(1) = 0.  The system
    is triangular thanks to Legendre orthogonality, so it solves exactly by
    forward substitution.
    """
    if k < 1:
        raise ValueError("Legendre solve only applies for k >= 1")
    r = k // 2
    a = [Fraction(0)] * (r + 2)
    a[0] = Fraction(1, 2)
    for tau in range(1, r + 1):
        acc = sum(
            a[s] * _monomial_moment(_legendre_coeffs(2 * s), 2 * tau)
            for s in range(tau)
        )
        a[tau] = -acc / _monomial_moment(_legendre_coeffs(2 * tau), 2 * tau)
    a[r + 1] = -sum(a[: r + 1])  # P_m(1) = 1 for every m
    return tuple(a)


def vanishing_moment_kernel(k: int) -> Kernel:
    """Kernel on [-1, 1] with int G = 1 and int u^j G = 0 for j = 1..k.

    k = 0 is the box G = 1/2; k = 1 the Epanechnikov kernel; k = 3 the quartic
    kernel.  Orders above MAX_KERNEL_ORDER are rejected (float evaluation of
    the resulting coefficients would lose the moment guarantees).
    """
    if k < 0:
        raise ValueError(f"order must be >= 0, got {k}")
    if k > MAX_KERNEL_ORDER:
        raise ValueError(
            f"order {k} exceeds the conditioning guard ({MAX_KERNEL_ORDER})"
        )
    if k == 0:
        piece = KernelPiece(Fraction(-1), Fraction(1), (Fraction(1, 2),))
        return Kernel(order=0, pieces=(piece,))
    poly = ()
    for s, a in enumerate(order_k_legendre_coefficients(k)):
        poly = xp.poly_add(poly, xp.poly_scale(_legendre_coeffs(2 * s), a))
    piece = KernelPiece(Fraction(-1), Fraction(1), poly)
    return Kernel(order=k, pieces=(piece,))


def box_kernel(width: float = 1.0) -> Kernel:
    """Uniform kernel of the given width centred at zero (order 0 by label)."""
    if not width > 0:
        raise ValueError(f"width must be positive, got {width}")
    half = Fraction(width) / 2
    piece = KernelPiece(-half, half, (1 / Fraction(width),))
    return Kernel(order=0, pieces=(piece,))


def rescale_kernel(kernel: Kernel, scale: float) -> Kernel:
    """Affine rescale G_s(u) = G(u/s)/s; preserves all vanishing moments."""
    s = Fraction(scale)
    if not s > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    pieces = tuple(
        KernelPiece(
            p.lo * s,
            p.hi * s,
            tuple(c / s ** (i + 1) for i, c in enumerate(p.coeffs)),
        )
        for p in kernel.pieces
    )
    return Kernel(order=kernel.order, pieces=pieces)


# ------------------------------------------------------------ functionals --


def kernel_moment(kernel: Kernel, j: int) -> float:
    """Exact int u^j G(u) du by closed-form piecewise integration."""
    if j < 0:
        raise ValueError(f"moment index must be >= 0, got {j}")
    total = Fraction(0)
    for p in kernel.pieces:
        for c, coef in enumerate(p.coeffs):
            power = j + c + 1
            total += coef * (p.hi**power - p.lo**power) / power
    return float(total)


@lru_cache(maxsize=None)
def _autocorrelation_pieces(kernel: Kernel) -> tuple:
    """Exact piecewise-polynomial psi(w) = int G(u) G(u+w) du.

    Breakpoints are the pairwise differences of piece endpoints; between
    breakpoints each piece pair contributes A(upper(w), w) - A(lower(w), w)
    with bounds either constant or constant - w, both polynomial in w.
    """
    breakpoints = sorted(
        {q.lo - p.hi for p in kernel.pieces for q in kernel.pieces}
        | {q.lo - p.lo for p in kernel.pieces for q in kernel.pieces}
        | {q.hi - p.hi for p in kernel.pieces for q in kernel.pieces}
        | {q.hi - p.lo for p in kernel.pieces for q in kernel.pieces}
    )
    out = []
    for w0, w1 in zip(breakpoints, breakpoints[1:]):
        if w0 == w1:
            continue
        mid = (w0 + w1) / 2
        acc = ()
        for p in kernel.pieces:
            for q in kernel.pieces:
                if not (q.lo - p.hi < mid < q.hi - p.lo):
                    continue
                anti = xp.biv_antiderivative_u(xp.biv_product_shifted(p.coeffs, q.coeffs))
                if p.hi <= q.hi - mid:  # upper bound is the constant p.hi
                    upper = xp.biv_substitute_u(anti, p.hi, 0)
                else:
                    upper = xp.biv_substitute_u(anti, q.hi, -1)
                if p.lo >= q.lo - mid:  # lower bound is the constant p.lo
                    lower = xp.biv_substitute_u(anti, p.lo, 0)
                else:
                    lower = xp.biv_substitute_u(anti, q.lo, -1)
                acc = xp.poly_add(acc, xp.poly_add(upper, xp.poly_scale(lower, -1)))
        out.append(KernelPiece(w0, w1, acc if acc else (Fraction(0),)))
    return tuple(out)


def kernel_autocorrelation(kernel: Kernel, w) -> float:
    """psi(w) = int G(u) G(u+w) du, evaluated from the exact piecewise form."""
    scalar = np.ndim(w) == 0
    ws = np.atleast_1d(np.asarray(w, dtype=float))
    out = np.zeros_like(ws)
    pieces = _autocorrelation_pieces(kernel)
    last = len(pieces) - 1
    for i, p in enumerate(pieces):
        lo, hi = float(p.lo), float(p.hi)
        coeffs = [float(c) for c in p.coeffs]
        mask = (ws >= lo) & (ws < hi) if i < last else (ws >= lo) & (ws <= hi)
        if mask.any():
            acc = np.zeros(int(mask.sum()))
            for c in coeffs[::-1]:
                acc = acc * ws[mask] + c
            out[mask] = acc
    return float(out[0]) if scalar else out


def _power_law_piece_integral(piece: KernelPiece, exponent: float) -> float:
    """int_piece poly(w) |w|^exponent dw for a piece not straddling zero."""
    lo, hi = float(piece.lo), float(piece.hi)
    total = 0.0
    if lo >= 0.0:
        for m, c in enumerate(piece.coeffs):
            p = m + exponent + 1.0
            total += float(c) * (hi**p - lo**p) / p
    elif hi <= 0.0:
        for m, c in enumerate(piece.coeffs):
            p = m + exponent + 1.0
            total += float(c) * (-1.0) ** m * ((-lo) ** p - (-hi) ** p) / p
    else:  # pragma: no cover - same-piece pairs force a breakpoint at 0
        raise RuntimeError("autocorrelation piece straddles zero")
    return total


def asymptotic_variance(kernel: Kernel, hurst: float) -> float:
    """h(2h-1) * int psi(w) |w|^(2h-2) dw in closed form.

    The exponent on each monomial term is m + 2h - 1 > 0, so the integral is
    proper despite the singular weight.  For the unit-width box this equals 1
    for every admissible h.
    """
    if not 0.5 < hurst < 1.0:
        raise ValueError(f"hurst must lie strictly in (0.5, 1), got {hurst}")
    exponent = 2.0 * hurst - 2.0
    total = sum(
        _power_law_piece_integral(p, exponent) for p in _autocorrelation_pieces(kernel)
    )
    return hurst * (2.0 * hurst - 1.0) * total


def _autocorrelation_numeric(kernel: Kernel, w: float) -> float:
    """psi(w) by adaptive quadrature of G(u) G(u+w); independent of the exact route."""
    a, b = kernel.support
    lo, hi = max(a, a - w), min(b, b - w)
    if hi <= lo:
        return 0.0
    kinks = sorted(
        {float(p.lo) for p in kernel.pieces}
        | {float(p.hi) for p in kernel.pieces}
        | {float(p.lo) - w for p in kernel.pieces}
        | {float(p.hi) - w for p in kernel.pieces}
    )
    kinks = [x for x in kinks if lo < x < hi]
    val, _ = quad(
        lambda u: kernel.evaluate(u) * kernel.evaluate(u + w),
        lo,
        hi,
        points=kinks or None,
        limit=200,
    )
    return val


def asymptotic_variance_quadrature(kernel: Kernel, hurst: float) -> float:
    """Adaptive-quadrature fallback for the variance functional.

    Splits at the endpoint differences, uses QUADPACK algebraic weights on the
    subintervals touching the |w|^(2h-2) singularity, and evaluates psi itself
    numerically.  Serves as the independent cross-check of the closed form.
    """
    if not 0.5 < hurst < 1.0:
        raise ValueError(f"hurst must lie strictly in (0.5, 1), got {hurst}")
    exponent = 2.0 * hurst - 2.0
    ends = sorted(
        {
            float(x - y)
            for p in kernel.pieces
            for q in kernel.pieces
            for x in (q.lo, q.hi)
            for y in (p.lo, p.hi)
        }
    )
    psi = lambda w: _autocorrelation_numeric(kernel, w)
    total = 0.0
    for w0, w1 in zip(ends, ends[1:]):
        if w0 == w1:
            continue
        if w0 >= 0.0:
            if w0 == 0.0:
                val, _ = quad(psi, w0, w1, weight="alg", wvar=(exponent, 0.0), limit=200)
            else:
                val, _ = quad(lambda w: psi(w) * w**exponent, w0, w1, limit=200)
        else:
            if w1 == 0.0:
                val, _ = quad(psi, w0, w1, weight="alg", wvar=(0.0, exponent), limit=200)
            else:
                val, _ = quad(lambda w: psi(w) * (-w) ** exponent, w0, w1, limit=200)
        total += val
    return hurst * (2.0 * hurst - 1.0) * total


def wiener_integrability_check(kernel: Kernel, hurst: float) -> bool:
    """Guard documenting that G lies in the admissible integrand class.

    Bounded piecewise polynomials with compact support always qualify when
    1/2 < hurst < 1; the check exists to make the hypothesis explicit.
    """
    if not 0.5 < hurst < 1.0:
        return False
    a, b = kernel.support
    grid = np.linspace(a, b, 2001)
    return bool(np.isfinite(a) and np.isfinite(b) and np.all(np.isfinite(kernel.evaluate(grid))))


# ---------------------------------------------------------- serialization --


def kernel_to_text(kernel: Kernel) -> str:
    """Lossless text form: declared order plus per-piece rational coefficients."""
    lines = [f"order {kernel.order}"]
    for p in kernel.pieces:
        coeffs = " ".join(str(c) for c in p.coeffs)
        lines.append(f"piece {p.lo} {p.hi} {coeffs}")
    return "\n".join(lines) + "\n"


def kernel_from_text(text: str) -> Kernel:
    order = None
    pieces = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "order" and len(fields) == 2:
            order = int(fields[1])
        elif fields[0] == "piece" and len(fields) >= 4:
            lo, hi = Fraction(fields[1]), Fraction(fields[2])
            coeffs = tuple(Fraction(f) for f in fields[3:])
            pieces.append(KernelPiece(lo, hi, coeffs))
        else:
            raise ValueError(f"unrecognised kernel line {lineno}: {raw!r}")
    if order is None or not pieces:
        raise ValueError("kernel text needs an 'order' line and at least one piece")
    return Kernel(order=order, pieces=tuple(pieces))
