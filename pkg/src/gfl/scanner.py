"""Floating-point exploration of the frame set of a window.

Each lattice point ``(a, b)`` with rational density is probed by the smallest
``p``-th singular value of the Zibulski-Zeevi matrix over a uniform grid of
the fundamental domain ``[0, a) x [0, 1/a)``.  A small value is evidence, not
proof: only points backed by an exact certificate are labelled
``certified-nonframe``, and the strongest positive label is
``no-obstruction-found``.
"""

from __future__ import annotations

import csv
import io
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import floor
from typing import Optional

import numpy as np

from .bspline import PiecewisePolynomial, bspline
from .exact import format_rational
from .gabor import LatticeParams, lattice_params, zz_matrices
from .obstruction import (
    ObstructionCertificate,
    a_range,
    certify_conj1,
    certify_conj2,
    check_family2,
)

log = logging.getLogger(__name__)

DEGENERATE_BELOW = 1e-8
CLEAR_ABOVE = 1e-6
DEFAULT_GRID = 64
DEFAULT_CAP = 64

CSV_COLUMNS = ("a", "b", "p", "q", "min_sigma", "argmin_x", "argmin_t", "verdict")


class Verdict(str, Enum):
    CERTIFIED = "certified-nonframe"
    DEGENERATE = "numerically-degenerate"
    NO_OBSTRUCTION = "no-obstruction-found"
    KNOWN = "known-obstruction"


@dataclass(frozen=True)
class ScanRegion:
    a_min: Fraction
    a_max: Fraction
    b_min: Fraction
    b_max: Fraction
    a_steps: int
    b_steps: int
    grid_n: int = DEFAULT_GRID
    rational_denominator_cap: int = DEFAULT_CAP

    def __post_init__(self):
        if not (0 < self.a_min < self.a_max and 0 < self.b_min < self.b_max):
            raise ValueError("need 0 < a_min < a_max and 0 < b_min < b_max")
        if min(self.a_steps, self.b_steps, self.grid_n, self.rational_denominator_cap) < 1:
            raise ValueError("steps, grid and cap must be positive")


@dataclass(frozen=True)
class ScanRecord:
    a: Fraction
    b: Fraction
    p: int
    q: int
    min_sigma: float
    argmin_x: float
    argmin_t: float
    verdict: Verdict
    borderline: bool = False
    certificate: Optional[ObstructionCertificate] = field(default=None, repr=False, compare=False)

    def to_row(self) -> dict:
        return {
            "a": format_rational(self.a),
            "b": format_rational(self.b),
            "p": self.p,
            "q": self.q,
            "min_sigma": repr(self.min_sigma),
            "argmin_x": repr(self.argmin_x),
            "argmin_t": repr(self.argmin_t),
            "verdict": self.verdict.value,
        }

    def to_json(self) -> dict:
        out = self.to_row()
        out["min_sigma"] = self.min_sigma
        out["argmin_x"] = self.argmin_x
        out["argmin_t"] = self.argmin_t
        out["borderline"] = self.borderline
        out["certified"] = self.certificate is not None
        return out


def known_obstruction_filter(a, b, n: int) -> bool:
    """Older obstruction family: ``b > 3/2`` and ``|b - round(b)| <= 1/(nq)``."""
    a, b = Fraction(a), Fraction(b)
    q = (a * b).denominator
    if b <= Fraction(3, 2):
        return False
    nearest = floor(b + Fraction(1, 2))
    return abs(b - nearest) <= Fraction(1, n * q)


def grid_points(params: LatticeParams, grid_n: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform grid of ``[0, a) x [0, 1/a)`` starting at the origin.

    Coordinates are ``a * (i / n)`` so that the grid for ``2n`` contains the
    grid for ``n`` bit for bit.
    """
    a = float(params.a)
    frac = np.arange(grid_n) / grid_n
    return a * frac, frac / a


def sigma_p_on_grid(g: PiecewisePolynomial, params: LatticeParams, grid_n: int):
    """Return ``(min sigma_p, argmin_x, argmin_t)`` over the grid.

    ``sigma_p`` is the p-th singular value of the p x q matrix; when ``p > q``
    the rank can never reach ``p`` and the value is 0.
    """
    xs, ts = grid_points(params, grid_n)
    if params.p > params.q:
        return 0.0, 0.0, 0.0
    best = (np.inf, 0.0, 0.0)
    # Chunk over x to keep the batched matrices within ~32 MB.
    step = max(1, 2_000_000 // (grid_n * params.p * params.q))
    for start in range(0, len(xs), step):
        chunk = xs[start:start + step]
        sv = np.linalg.svd(zz_matrices(g, params, chunk, ts), compute_uv=False)[..., -1]
        i, j = np.unravel_index(np.argmin(sv), sv.shape)
        if sv[i, j] < best[0]:
            best = (float(sv[i, j]), float(chunk[i]), float(ts[j]))
    return best


def classify(min_sigma: float, degenerate_below: float = DEGENERATE_BELOW,
             clear_above: float = CLEAR_ABOVE) -> tuple[Verdict, bool]:
    if min_sigma < degenerate_below:
        return Verdict.DEGENERATE, False
    return Verdict.NO_OBSTRUCTION, min_sigma < clear_above


def find_certificate(a, b) -> Optional[ObstructionCertificate]:
    """Exact certificate if ``(a, b)`` lies in one of the proven families."""
    a, b = Fraction(a), Fraction(b)
    # family 2: a = 1/(2m), b = (2k+1)/2
    if a.numerator == 1 and a.denominator % 2 == 0 and (2 * b).denominator == 1:
        m, twok1 = a.denominator // 2, (2 * b).numerator
        if twok1 % 2 == 1:
            try:
                check_family2(m, (twok1 - 1) // 2)
            except ValueError:
                pass
            else:
                return certify_conj2(m, (twok1 - 1) // 2)
    # family 1: ab = (2k+1)/(2(2m+1)) = p/q, so 2k+1 = p*d and 2(2m+1) = q*d, d odd.
    ab = a * b
    p, q = ab.numerator, ab.denominator
    if q % 2 or p % 2 == 0:
        return None
    m_cap = int(1 / a) + 2
    d = 1
    while True:
        two_m1 = q * d
        if two_m1 // 2 - 1 > 2 * m_cap:
            break
        if two_m1 % 4 == 2:
            m = (two_m1 // 2 - 1) // 2
            k = (p * d - 1) // 2
            if m >= 1 and m + 1 <= k <= 2 * m:
                lo, hi = a_range(m, k)
                if lo <= a <= hi:
                    return certify_conj1(m, k, a)
        d += 2
    return None


def _threads() -> int:
    env = os.environ.get("GFL_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _snap(lo: Fraction, hi: Fraction, steps: int, cap: int) -> list[Fraction]:
    if steps == 1:
        return [lo.limit_denominator(cap)]
    return [(lo + (hi - lo) * Fraction(i, steps - 1)).limit_denominator(cap) for i in range(steps)]


def probe_point(g: PiecewisePolynomial, a, b, grid_n: int = DEFAULT_GRID, order: Optional[int] = 2,
                certify: bool = True) -> ScanRecord:
    params = lattice_params(a, b)
    sigma, ax, at = sigma_p_on_grid(g, params, grid_n)
    cert = find_certificate(params.a, params.b) if certify else None
    verdict, borderline = classify(sigma)
    if cert is not None:
        verdict, borderline = Verdict.CERTIFIED, False
    elif order is not None and known_obstruction_filter(params.a, params.b, order):
        verdict, borderline = Verdict.KNOWN, False
    return ScanRecord(params.a, params.b, params.p, params.q, sigma, ax, at,
                      verdict, borderline, cert)


def _infer_order(g: PiecewisePolynomial) -> Optional[int]:
    lo, hi = g.support
    width = hi - lo
    if width.denominator == 1 and g == bspline(int(width)):
        return int(width)
    return None


def scan_region(g: PiecewisePolynomial, region: ScanRegion, order: Optional[int] = None) -> list[ScanRecord]:
    """Probe every snapped ``(a, b)`` of the region.

    Points whose reduced ``q`` exceeds the denominator cap are skipped and
    logged.  Output is sorted by ``(a, b)`` independent of scheduling.
    """
    if order is None:
        order = _infer_order(g)
    cap = region.rational_denominator_cap
    a_vals = _snap(Fraction(region.a_min), Fraction(region.a_max), region.a_steps, cap)
    b_vals = _snap(Fraction(region.b_min), Fraction(region.b_max), region.b_steps, cap)
    points = []
    for a in a_vals:
        for b in b_vals:
            q = (a * b).denominator
            if q > cap:
                log.info("skip a=%s b=%s: q=%d exceeds cap %d", a, b, q, cap)
                continue
            points.append((a, b))

    def work(ab):
        return probe_point(g, ab[0], ab[1], region.grid_n, order)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        records = list(pool.map(work, points))
    log.info("scanned %d of %d points", len(records), len(a_vals) * len(b_vals))
    return sorted(records, key=lambda r: (r.a, r.b))


def sweep_hyperbola_conj1(m: int, k: int, samples: int) -> list[ObstructionCertificate]:
    """Certificates at ``samples`` equally spaced ``a`` across ``a_range``."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    lo, hi = a_range(m, k)
    out = []
    for i in range(samples):
        a = lo + (hi - lo) * Fraction(i, samples - 1)
        out.append(certify_conj1(m, k, a))
    return out


def hyperbola2_b_interval(m: int, k: int) -> tuple[Fraction, Fraction]:
    check_family2(m, k)
    center = Fraction(2 * k + 1, 2)
    half = Fraction(1, 2 * m) * Fraction(k - m, 2)
    return center - half, center + half


def sweep_hyperbola_conj2(m: int, k: int, samples: int, grid_n: int = DEFAULT_GRID,
                          b_interval: Optional[tuple[Fraction, Fraction]] = None) -> list[ScanRecord]:
    """Numerical sweep along ``ab = (2k+1)/(4m)``.

    Only the centre ``b = (2k+1)/2`` is ever certified; every other point is
    labelled from its singular value alone.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    lo, hi = b_interval if b_interval is not None else hyperbola2_b_interval(m, k)
    check_family2(m, k)
    density = Fraction(2 * k + 1, 4 * m)
    center = Fraction(2 * k + 1, 2)
    g = bspline(2)
    out = []
    for i in range(samples):
        b = lo + (hi - lo) * Fraction(i, samples - 1)
        a = density / b
        params = lattice_params(a, b)
        sigma, ax, at = sigma_p_on_grid(g, params, grid_n)
        verdict, borderline = classify(sigma)
        cert = None
        if b == center:
            cert = certify_conj2(m, k)
            verdict, borderline = Verdict.CERTIFIED, False
        out.append(ScanRecord(a, b, params.p, params.q, sigma, ax, at, verdict, borderline, cert))
    return out


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow(r.to_row())
    return buf.getvalue()
