"""Centered B-splines as exact piecewise polynomials.

``Q_1`` is the indicator of ``[-1/2, 1/2]`` and ``Q_{n+1} = Q_n * Q_1``; the
convolution is carried out symbolically so every coefficient stays rational.
Polynomials are coefficient lists in ascending degree of the absolute
variable ``x``.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

Poly = tuple[Fraction, ...]


def _trim(p) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _padd(p, q) -> Poly:
    n = max(len(p), len(q))
    return _trim(
        (p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)
    )


def _peval(p, x):
    acc = Fraction(0) if isinstance(x, Fraction) else 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _shift(p, c) -> Poly:
    """Coefficients of ``p(x + c)``."""
    out = [Fraction(0)] * len(p)
    for i, a in enumerate(p):
        for j in range(i + 1):
            out[j] += a * comb(i, j) * c ** (i - j)
    return tuple(out)


@dataclass(frozen=True)
class PiecewisePolynomial:
    breakpoints: tuple[Fraction, ...]
    pieces: tuple[Poly, ...]
    _float_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if len(self.pieces) != len(self.breakpoints) - 1:
            raise ValueError("need exactly one piece per interval")
        if any(b >= c for b, c in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    @property
    def support(self) -> tuple[Fraction, Fraction]:
        return self.breakpoints[0], self.breakpoints[-1]

    def __call__(self, x):
        if isinstance(x, (Fraction, int)):
            return eval_exact(self, Fraction(x))
        return eval_float(self, x)


def _box(lo: Fraction, hi: Fraction) -> PiecewisePolynomial:
    return PiecewisePolynomial((lo, hi), ((Fraction(1),),))


def _bivariate_product(f: Poly, g: Poly) -> dict[tuple[int, int], Fraction]:
    """Expand ``f(t) * g(x - t)`` as ``{(deg_x, deg_t): coeff}``."""
    out: dict[tuple[int, int], Fraction] = {}
    for qdeg, gc in enumerate(g):
        if gc == 0:
            continue
        for r in range(qdeg + 1):
            # (x - t)^qdeg = sum C(qdeg, r) x^r (-t)^(qdeg - r)
            w = gc * comb(qdeg, r) * (-1) ** (qdeg - r)
            for pdeg, fc in enumerate(f):
                if fc == 0:
                    continue
                key = (r, pdeg + qdeg - r)
                out[key] = out.get(key, Fraction(0)) + w * fc
    return out


def _definite_in_t(terms, lower: tuple[Fraction, Fraction], upper: tuple[Fraction, Fraction]) -> Poly:
    """Integrate ``sum c x^r t^s`` over ``t`` between two linear functions of x.

    A limit ``(alpha, beta)`` stands for ``alpha + beta * x``.
    """
    result: Poly = ()
    for (r, s), c in terms.items():
        for (alpha, beta), sign in ((upper, 1), (lower, -1)):
            # x^r * (alpha + beta x)^(s+1) / (s+1)
            lin = [Fraction(0)] * (r + s + 2)
            for j in range(s + 2):
                lin[r + j] += comb(s + 1, j) * alpha ** (s + 1 - j) * beta ** j
            scale = sign * c / (s + 1)
            result = _padd(result, [scale * v for v in lin])
    return result


def convolve(f: PiecewisePolynomial, g: PiecewisePolynomial) -> PiecewisePolynomial:
    """Exact convolution ``(f * g)(x) = integral f(t) g(x - t) dt``."""
    knots = sorted({u + v for u in f.breakpoints for v in g.breakpoints})
    acc: list[Poly] = [() for _ in range(len(knots) - 1)]
    for i, fp in enumerate(f.pieces):
        u0, u1 = f.breakpoints[i], f.breakpoints[i + 1]
        for j, gp in enumerate(g.pieces):
            v0, v1 = g.breakpoints[j], g.breakpoints[j + 1]
            terms = _bivariate_product(fp, gp)
            if not terms:
                continue
            for idx in range(len(knots) - 1):
                x0, x1 = knots[idx], knots[idx + 1]
                if x1 <= u0 + v0 or x0 >= u1 + v1:
                    continue
                mid = (x0 + x1) / 2
                # Active limits on this interval: t in [max(u0, x-v1), min(u1, x-v0)].
                lower = (u0, Fraction(0)) if u0 >= mid - v1 else (-v1, Fraction(1))
                upper = (u1, Fraction(0)) if u1 <= mid - v0 else (-v0, Fraction(1))
                lo_mid = lower[0] + lower[1] * mid
                hi_mid = upper[0] + upper[1] * mid
                if hi_mid <= lo_mid:
                    continue
                acc[idx] = _padd(acc[idx], _definite_in_t(terms, lower, upper))
    return _simplify(PiecewisePolynomial(tuple(knots), tuple(acc)))


def _simplify(f: PiecewisePolynomial) -> PiecewisePolynomial:
    """Drop zero pieces at the ends and merge equal neighbours."""
    bps = list(f.breakpoints)
    pcs = list(f.pieces)
    while pcs and not pcs[0]:
        pcs.pop(0)
        bps.pop(0)
    while pcs and not pcs[-1]:
        pcs.pop()
        bps.pop()
    i = 0
    while i + 1 < len(pcs):
        if pcs[i] == pcs[i + 1]:
            del pcs[i + 1]
            del bps[i + 1]
        else:
            i += 1
    return PiecewisePolynomial(tuple(bps), tuple(pcs))


@lru_cache(maxsize=None)
def bspline(n: int) -> PiecewisePolynomial:
    if n < 1:
        raise ValueError("order must be positive")
    half = Fraction(1, 2)
    q1 = _box(-half, half)
    q = q1
    for _ in range(n - 1):
        q = convolve(q, q1)
    return q


def eval_exact(f: PiecewisePolynomial, x) -> Fraction:
    """Exact value; zero outside the closed support.

    At an interior breakpoint the right-hand piece is used, at the right end
    of the support the last piece, so ``Q_1`` is 1 on all of ``[-1/2, 1/2]``.
    """
    x = Fraction(x)
    lo, hi = f.support
    if x < lo or x > hi:
        return Fraction(0)
    idx = min(bisect_right(f.breakpoints, x) - 1, len(f.pieces) - 1)
    return _peval(f.pieces[idx], x)


def _float_tables(f: PiecewisePolynomial):
    tabs = f._float_cache.get("tabs")
    if tabs is None:
        deg = max((len(p) for p in f.pieces), default=1)
        left = np.zeros((len(f.pieces), deg))
        right = np.zeros((len(f.pieces), deg))
        for i, p in enumerate(f.pieces):
            # Re-expand around each end so values near a vanishing end keep
            # their relative accuracy.
            for tab, c in ((left, f.breakpoints[i]), (right, f.breakpoints[i + 1])):
                coeffs = _shift(p, c)
                tab[i, :len(coeffs)] = [float(v) for v in coeffs]
        bps = np.array([float(b) for b in f.breakpoints])
        tabs = (bps, left, right)
        f._float_cache["tabs"] = tabs
    return tabs


def eval_float(f: PiecewisePolynomial, x):
    """Double-precision evaluation; accepts a scalar or an array."""
    bps, left, right = _float_tables(f)
    xa = np.asarray(x, dtype=float)
    idx = np.clip(np.searchsorted(bps, xa, side="right") - 1, 0, len(f.pieces) - 1)
    lo_b = bps[idx]
    hi_b = bps[idx + 1]
    use_left = (xa - lo_b) <= (hi_b - xa)
    u = np.where(use_left, xa - lo_b, xa - hi_b)
    coeffs = np.where(use_left[..., None], left[idx], right[idx])
    val = np.zeros_like(xa)
    for j in range(coeffs.shape[-1] - 1, -1, -1):
        val = val * u + coeffs[..., j]
    val = np.where((xa < bps[0]) | (xa > bps[-1]), 0.0, val)
    if np.ndim(x) == 0:
        return float(val)
    return val


def integrate(f: PiecewisePolynomial) -> Fraction:
    total = Fraction(0)
    for i, p in enumerate(f.pieces):
        anti = (Fraction(0),) + tuple(c / (k + 1) for k, c in enumerate(p))
        total += _peval(anti, f.breakpoints[i + 1]) - _peval(anti, f.breakpoints[i])
    return total
