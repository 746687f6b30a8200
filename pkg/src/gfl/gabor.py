"""Zak transform and the finite matrices that decide the frame property.

For ``ab = p/q`` (coprime) three matrices are built from a compactly
supported window ``g``:

* ``zz_matrix``     p x q, shifted Zak values with a DFT phase,
* ``theta_matrix``  p x q, periodised samples ``g(x + aqn + al + k/b)``,
* ``phi_matrix_*``  q x p, the symbol of the sampling operator in the
  shift-invariant space spanned by ``g(. - j/b)``.

At ``(x, t) = (0, 0)`` the symbol matrix is built exactly; everywhere else
entries are complex doubles.  All sums are finite: the summation index is
restricted to the range where the argument of ``g`` meets its support.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor

import numpy as np

from .bspline import PiecewisePolynomial, eval_exact, eval_float
from .exact import RationalMatrix, format_rational

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class LatticeParams:
    a: Fraction
    b: Fraction
    p: int
    q: int

    @property
    def density(self) -> Fraction:
        return Fraction(self.p, self.q)

    def to_json(self) -> dict:
        return {"a": format_rational(self.a), "b": format_rational(self.b),
                "p": self.p, "q": self.q}


@dataclass(frozen=True)
class EvaluationPoint:
    x: float = 0.0
    t: float = 0.0


def lattice_params(a, b) -> LatticeParams:
    a, b = Fraction(a), Fraction(b)
    if a <= 0 or b <= 0:
        raise ValueError("lattice parameters must be positive")
    ab = a * b
    return LatticeParams(a, b, ab.numerator, ab.denominator)


def _index_range(lo, hi, offset, step):
    """Integers j with ``lo <= offset + step*j <= hi`` (step > 0)."""
    return range(ceil((lo - offset) / step), floor((hi - offset) / step) + 1)


def zak(g: PiecewisePolynomial, alpha, x: float, t: float) -> complex:
    """``sum_n g(x - alpha n) exp(2 pi i alpha n t)``."""
    alpha_f = float(alpha)
    lo, hi = (float(v) for v in g.support)
    ns = np.arange(ceil((x - hi) / alpha_f), floor((x - lo) / alpha_f) + 1)
    vals = eval_float(g, x - alpha_f * ns)
    return complex(np.sum(vals * np.exp(1j * TWO_PI * alpha_f * ns * t)))


def zz_matrices(g: PiecewisePolynomial, params: LatticeParams, xs, ts) -> np.ndarray:
    """Zibulski-Zeevi matrices on the product grid ``xs x ts``.

    Returns an array of shape ``(len(xs), len(ts), p, q)`` with entry
    ``Z_a g(x + ak/p, t - bl) * exp(2 pi i kl/q)``.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    p, q = params.p, params.q
    a = float(params.a)
    lo, hi = (float(v) for v in g.support)
    out = np.empty((len(xs), len(ts), p, q), dtype=complex)
    ls = np.arange(q)
    for k in range(p):
        u = xs + a * k / p
        ns = np.arange(ceil((u.min() - hi) / a), floor((u.max() - lo) / a) + 1)
        G = eval_float(g, u[:, None] - a * ns[None, :])  # (X, N)
        # exp(2 pi i a n (t - b l)) with the a*b*n*l part reduced mod 1 exactly.
        base = np.exp(1j * TWO_PI * a * ts[:, None] * ns[None, :])  # (T, N)
        lat = np.exp(-1j * TWO_PI * ((p * np.outer(ls, ns)) % q) / q)  # (L, N)
        E = base[:, None, :] * lat[None, :, :]  # (T, L, N)
        block = np.einsum("xn,tln->xtl", G, E)
        out[:, :, k, :] = block * np.exp(1j * TWO_PI * ((k * ls) % q) / q)
    return out


def zz_matrix(g: PiecewisePolynomial, params: LatticeParams, pt: EvaluationPoint = EvaluationPoint()) -> np.ndarray:
    return zz_matrices(g, params, [pt.x], [pt.t])[0, 0]


def theta_matrix(g: PiecewisePolynomial, params: LatticeParams, pt: EvaluationPoint = EvaluationPoint()) -> np.ndarray:
    p, q = params.p, params.q
    a, b = float(params.a), float(params.b)
    aq = a * q
    lo, hi = (float(v) for v in g.support)
    out = np.empty((p, q), dtype=complex)
    for k in range(p):
        for l in range(q):
            off = pt.x + a * l + k / b
            ns = np.arange(ceil((lo - off) / aq), floor((hi - off) / aq) + 1)
            vals = eval_float(g, off + aq * ns)
            out[k, l] = np.sum(vals * np.exp(-1j * TWO_PI * aq * ns * pt.t))
    return out


def theta_matrix_exact(g: PiecewisePolynomial, params: LatticeParams) -> RationalMatrix:
    """``theta_matrix`` at ``(0, 0)`` in exact arithmetic."""
    a, b, p, q = params.a, params.b, params.p, params.q
    aq = a * q
    lo, hi = g.support
    rows = []
    for k in range(p):
        row = []
        for l in range(q):
            off = a * l + Fraction(k) / b
            row.append(sum((eval_exact(g, off + aq * n) for n in _index_range(lo, hi, off, aq)), Fraction(0)))
        rows.append(row)
    return RationalMatrix.from_rows(rows)


def phi_entry_exact(g: PiecewisePolynomial, a: Fraction, b: Fraction, q: int, s: int, n: int) -> Fraction:
    """``sum_j g(aqj + as - n/b)``; the symbol entry at (0, 0)."""
    aq = a * q
    off = a * s - Fraction(n) / b
    lo, hi = g.support
    return sum((eval_exact(g, aq * j + off) for j in _index_range(lo, hi, off, aq)), Fraction(0))


def phi_matrix_exact(g: PiecewisePolynomial, params: LatticeParams) -> RationalMatrix:
    a, b, p, q = params.a, params.b, params.p, params.q
    return RationalMatrix.from_rows(
        [[phi_entry_exact(g, a, b, q, s, n) for n in range(p)] for s in range(q)]
    )


def phi_matrix_float(g: PiecewisePolynomial, params: LatticeParams, pt: EvaluationPoint = EvaluationPoint()) -> np.ndarray:
    p, q = params.p, params.q
    a, b = float(params.a), float(params.b)
    aq = a * q
    lo, hi = (float(v) for v in g.support)
    out = np.empty((q, p), dtype=complex)
    for s in range(q):
        for n in range(p):
            off = pt.x + a * s - n / b
            js = np.arange(ceil((lo - off) / aq), floor((hi - off) / aq) + 1)
            vals = eval_float(g, off + aq * js)
            out[s, n] = np.sum(vals * np.exp(1j * TWO_PI * js * pt.t))
    return out


def singular_values(M) -> np.ndarray:
    return np.linalg.svd(np.asarray(M), compute_uv=False)


def min_singular_value(M) -> float:
    """Smallest of the ``min(rows, cols)`` singular values."""
    M = np.asarray(M)
    if M.size == 0:
        raise ValueError("empty matrix")
    return float(singular_values(M).min())


def numerical_rank(M, rtol: float = 1e-9) -> int:
    sv = singular_values(M)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def complex_matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "re": [float(v) for v in M.real.ravel()],
        "im": [float(v) for v in M.imag.ravel()],
    }


def complex_matrix_from_json(obj: dict) -> np.ndarray:
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float)
    return (re + 1j * im).reshape(int(obj["rows"]), int(obj["cols"]))
