"""Exact non-frame certificates for Gabor systems of the hat function Q_2.

Two parameter families are handled.

Family 1: ``ab = (2k+1)/(2(2m+1))`` with ``m+1 <= k <= 2m`` and ``a`` in the
closed interval returned by :func:`a_range`.  The symbol matrix at (0, 0) is
``q x p`` with ``q = 2(2m+1)``, ``p = 2k+1``.

Family 2: ``a = 1/(2m)``, ``b = (2k+1)/2`` with ``k > m``, ``2k+1 < 4m`` and
``gcd(4m, 2k+1) = 1``; the symbol matrix is ``4m x (2k+1)``.

For each family the column differences ``A[s, n] = Phi[s, n] - Phi[s, 2k+1-n]``
carry all the structure (vanishing rows, reflection antisymmetry, closed-form
values, rank at most ``k - 1``).  The closed forms here are checked against the
direct evaluation in :func:`a_sn_direct`, which is the oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Optional

from .bspline import bspline
from .exact import (
    RationalMatrix,
    format_rational,
    nullspace_exact,
    parse_rational,
)
from .gabor import lattice_params, phi_entry_exact, phi_matrix_exact


class CertificateError(RuntimeError):
    """Raised when the symbol matrix unexpectedly has independent columns."""

    def __init__(self, message: str, matrix: Optional[RationalMatrix] = None):
        super().__init__(message)
        self.matrix = matrix


def _q2():
    return bspline(2)


# ---------------------------------------------------------------------------
# parameter validation
# ---------------------------------------------------------------------------

def check_family1(m: int, k: int) -> None:
    if m < 1 or not (m + 1 <= k <= 2 * m):
        raise ValueError(f"need m >= 1 and m+1 <= k <= 2m, got m={m}, k={k}")


def check_family2(m: int, k: int) -> None:
    if m < 1 or k <= m:
        raise ValueError(f"need k > m >= 1, got m={m}, k={k}")
    if 2 * k + 1 >= 4 * m:
        raise ValueError(f"need 2k+1 < 4m (ab < 1), got m={m}, k={k}")
    if gcd(4 * m, 2 * k + 1) != 1:
        raise ValueError(
            f"gcd(4m, 2k+1) = gcd({4 * m}, {2 * k + 1}) = {gcd(4 * m, 2 * k + 1)}; "
            "the family requires coprimality"
        )


def is_coprime_family1(m: int, k: int) -> bool:
    return gcd(2 * k + 1, 2 * (2 * m + 1)) == 1


def a_range(m: int, k: int) -> tuple[Fraction, Fraction]:
    """Closed interval of admissible ``a`` for family 1."""
    check_family1(m, k)
    return (
        Fraction(2 * k + 1, 4 * k * m + 3 * k + m + 1),
        Fraction(2 * k + 1, 4 * k * m + k + 3 * m + 1),
    )


def _check_a(m: int, k: int, a: Fraction) -> Fraction:
    a = Fraction(a)
    lo, hi = a_range(m, k)
    if not lo <= a <= hi:
        raise ValueError(
            f"a={format_rational(a)} outside [{format_rational(lo)}, {format_rational(hi)}]"
        )
    return a


def b_of(m: int, k: int, a: Fraction) -> Fraction:
    return Fraction(2 * k + 1, 2 * (2 * m + 1)) / Fraction(a)


def a_samples(m: int, k: int, count: int) -> list[Fraction]:
    """``count`` equally spaced rationals across ``a_range``, ends included."""
    if count < 2:
        raise ValueError("need at least 2 samples")
    lo, hi = a_range(m, k)
    return [lo + (hi - lo) * Fraction(i, count - 1) for i in range(count)]


# ---------------------------------------------------------------------------
# family 1: scalar quantities
# ---------------------------------------------------------------------------

def x_sn(m: int, k: int, s: int, n: int) -> Fraction:
    if not (0 <= s <= 4 * m + 1 and 0 <= n <= 2 * k):
        raise ValueError(f"(s, n) = ({s}, {n}) out of range")
    return Fraction(s, 2 * (2 * m + 1)) - Fraction(n, 2 * k + 1)


def x_sn_tilde(m: int, k: int, s: int, n: int) -> Fraction:
    if not (0 <= s <= 4 * m - 1 and 1 <= n <= 2 * k):
        raise ValueError(f"(s, n) = ({s}, {n}) out of range")
    return Fraction(s, 4 * m) - Fraction(n, 2 * k + 1)


def y_of(a, m: int) -> Fraction:
    a = Fraction(a)
    if a <= 0:
        raise ValueError("a must be positive")
    return 1 / (2 * a * (2 * m + 1))


def phi_entry(m: int, k: int, a, s: int, n: int) -> Fraction:
    """Symbol entry at (0, 0) for family 1, evaluated by direct summation."""
    a = Fraction(a)
    return phi_entry_exact(_q2(), a, b_of(m, k, a), 2 * (2 * m + 1), s, n)


def phi_entry_closed(m: int, k: int, a, s: int, n: int) -> Fraction:
    """Two-term evaluation picked by the sign of ``X_sn``."""
    if not (1 <= s <= 4 * m + 1 and 1 <= n <= 2 * k):
        raise ValueError(f"(s, n) = ({s}, {n}) out of range")
    a = _check_a(m, k, a)
    x = x_sn(m, k, s, n)
    if x == 0:
        raise AssertionError("X_sn vanished inside the admissible range")
    scale = 2 * a * (2 * m + 1)
    ls = (-1, 0) if x > 0 else (0, 1)
    q2 = _q2()
    return sum((q2(scale * (l + x)) for l in ls), Fraction(0))


def a_sn_direct(m: int, k: int, a, s: int, n: int) -> Fraction:
    return phi_entry(m, k, a, s, n) - phi_entry(m, k, a, s, 2 * k + 1 - n)


def a_sn_closed(m: int, k: int, a, s: int, n: int) -> Fraction:
    """Closed-form value of ``A[s, n]`` for even ``k`` and ``m >= 2``.

    Rows 0 and 2m+1 vanish and rows past 2m+1 follow by reflection; rows
    1..2m split into four blocks by ``s <= m`` and ``n <= k/2``.  In the
    four-way blocks the branch conditions of the lemma statements overlap, so
    they are tested in the order that reproduces the underlying case split on
    ``X' = X[s, 2k+1-n]``: ``X' <= -Y`` vs ``X' > -Y`` and ``X' < Y-1`` vs
    ``X' >= Y-1``.
    """
    if k % 2 or m < 2:
        raise ValueError("no closed form; use a_sn_direct")
    if not (0 <= s <= 4 * m + 1 and 1 <= n <= k):
        raise ValueError(f"(s, n) = ({s}, {n}) out of range")
    a = _check_a(m, k, a)
    if s in (0, 2 * m + 1):
        return Fraction(0)
    if s > 2 * m + 1:
        return -a_sn_closed(m, k, a, 4 * m + 2 - s, n)
    b = b_of(m, k, a)
    y = y_of(a, m)
    half = k // 2
    if n <= half:
        if s <= m:
            x = x_sn(m, k, s, n)
            if 0 < x < y:
                return 2 * n / b
            if -y < x < 0:
                return 2 * a * s
        else:
            xr = x_sn(m, k, s, 2 * k + 1 - n)
            if y - 1 <= xr <= -y:
                return 1 - a * s + n / b
            if -y < xr < y - 1:
                return -1 - a * s + (2 * k + 1 + n) / b
            if -1 < xr < y - 1:
                return 2 * n / b
            if -y < xr < 0:
                return 2 * a * (2 * m + 1 - s)
    else:
        if s <= m:
            xr = x_sn(m, k, s, 2 * k + 1 - n)
            if y - 1 <= xr <= -y:
                return 1 + a * s - n / b
            if -y < xr < y - 1:
                return -1 + a * s + (2 * k + 1 - n) / b
            if -1 < xr < y - 1:
                return 2 * a * s
            if -y < xr < 0:
                return (2 * k + 1 - 2 * n) / b
        else:
            x = x_sn(m, k, s, n)
            if 0 < x < y:
                return 2 * a * (2 * m + 1 - s)
            if -y < x < 0:
                return (2 * k + 1 - 2 * n) / b
    raise ValueError(f"no closed form for (s, n) = ({s}, {n}); use a_sn_direct")


def build_A(m: int, k: int, a) -> RationalMatrix:
    a = _check_a(m, k, a)
    return RationalMatrix.from_rows(
        [[a_sn_direct(m, k, a, s, n) for n in range(1, k + 1)] for s in range(1, 2 * m + 1)]
    )


# ---------------------------------------------------------------------------
# family 1: index sets and counting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndexSetReport:
    S1a: frozenset
    S2a: frozenset
    S3a: frozenset
    S4a: frozenset
    I11: frozenset
    I12: frozenset
    I21: frozenset
    I22: frozenset
    W: tuple[Fraction, ...]
    V: Fraction

    @property
    def S(self) -> frozenset:
        return self.S1a | self.S2a

    @property
    def T(self) -> frozenset:
        return self.S3a | self.S4a


def w_n(m: int, k: int, n: int) -> Fraction:
    return Fraction(2 * (2 * m + 1) * n, 2 * k + 1)


def v_of(m: int, a) -> Fraction:
    return 2 * m + 1 - 1 / Fraction(a)


def alpha_of(m: int, k: int) -> Fraction:
    """``1/a`` at the right end of ``a_range``."""
    return 2 * m + 1 - Fraction(k - m, 2 * k + 1)


def beta_of(m: int, k: int) -> Fraction:
    """``1/a`` at the left end of ``a_range``."""
    return 2 * m + 1 + Fraction(k - m, 2 * k + 1)


def i_sets(m: int, k: int) -> tuple[frozenset, frozenset, frozenset, frozenset]:
    """``(I11, I12, I21, I22)`` by exact membership tests."""
    if k % 2:
        raise ValueError("index sets are defined for even k")
    check_family1(m, k)
    h = k // 2
    p = 2 * k + 1

    def collect(reflect: bool, sign: int, ns) -> frozenset:
        out = set()
        for n in ns:
            val = Fraction(2 * n * (2 * m + 1) + sign * (k - m), p)
            if val.denominator != 1:
                continue
            s = 2 * m + 1 - val.numerator if reflect else val.numerator
            if 1 <= s <= m:
                out.add(s)
        return frozenset(out)

    first, second = range(1, h + 1), range(h + 1, k + 1)
    return (
        collect(False, +1, first),
        collect(True, +1, second),
        collect(False, -1, first),
        collect(True, -1, second),
    )


def s_sets(m: int, k: int, a) -> IndexSetReport:
    """Enumerate ``S_1a .. S_4a`` from the values of ``A`` (direct route)."""
    if k % 2:
        raise ValueError("S-sets are defined for even k")
    a = _check_a(m, k, a)
    b = b_of(m, k, a)
    h = k // 2
    s1, s2, s3, s4 = set(), set(), set(), set()
    for s in range(1, m + 1):
        r = 2 * m + 1 - s
        for n in range(1, h + 1):
            val = a_sn_direct(m, k, a, r, n)
            if val == 1 - a * r + n / b:
                s1.add(s)
            if val == -1 - a * r + (2 * k + 1 + n) / b:
                s3.add(s)
        for n in range(h + 1, k + 1):
            val = a_sn_direct(m, k, a, s, n)
            if val == 1 + a * s - n / b:
                s2.add(s)
            if val == -1 + a * s + (2 * k + 1 - n) / b:
                s4.add(s)
    I11, I12, I21, I22 = i_sets(m, k)
    return IndexSetReport(
        frozenset(s1), frozenset(s2), frozenset(s3), frozenset(s4),
        I11, I12, I21, I22,
        tuple(w_n(m, k, n) for n in range(1, k + 1)),
        v_of(m, a),
    )


def sign_weight(n: int) -> int:
    """+1 for n = 0, 1 (mod 4), -1 for n = 2, 3 (mod 4)."""
    return 1 if n % 4 in (0, 1) else -1


def cardinality_floor_sum(m: int, k: int) -> int:
    """Signed floor sum counting ``S`` at ``1/a = alpha``.

    Equals ``k - m`` whenever ``gcd(k - m, 2k + 1) = 1``.
    """
    if k % 2:
        raise ValueError("defined for even k")
    check_family1(m, k)
    d = k - m
    p = 2 * k + 1
    return sum(sign_weight(n) * (n * d // p) for n in range(1, 2 * k + 1)) + d


def cardinality_lattice_sums(m: int, k: int) -> tuple[int, int]:
    """``(#S_1, #S_2)`` at ``1/a = alpha`` as lattice-point counts."""
    if k % 2:
        raise ValueError("defined for even k")
    check_family1(m, k)
    d = k - m
    p = 2 * k + 1
    ns = range(1, k // 2 + 1)
    s2 = sum(4 * n * d // p for n in ns) - sum((4 * n - 2) * d // p for n in ns)
    s1 = sum((4 * n + 1) * d // p for n in ns) - sum((4 * n - 1) * d // p for n in ns)
    return s1, s2


# ---------------------------------------------------------------------------
# family 2
# ---------------------------------------------------------------------------

def family2_params(m: int, k: int):
    check_family2(m, k)
    return lattice_params(Fraction(1, 2 * m), Fraction(2 * k + 1, 2))


def phi_entry_tilde(m: int, k: int, s: int, n: int) -> Fraction:
    return phi_entry_exact(_q2(), Fraction(1, 2 * m), Fraction(2 * k + 1, 2), 4 * m, s, n)


def a_tilde_direct(m: int, k: int, s: int, n: int) -> Fraction:
    return phi_entry_tilde(m, k, s, n) - phi_entry_tilde(m, k, s, 2 * k + 1 - n)


def a_tilde_closed(m: int, k: int, s: int, n: int) -> Fraction:
    """Closed form of ``A~[s, n]`` for even ``k``; row ``s = m`` has none."""
    check_family2(m, k)
    if k % 2:
        raise ValueError("no closed form; use a_tilde_direct")
    if not (0 <= s <= 4 * m - 1 and 1 <= n <= k):
        raise ValueError(f"(s, n) = ({s}, {n}) out of range")
    if s in (0, 2 * m):
        return Fraction(0)
    if s > 2 * m:
        return -a_tilde_closed(m, k, 4 * m - s, n)
    if s == m:
        raise ValueError("no closed form for row m; use a_tilde_direct")
    b = Fraction(2 * k + 1, 2)
    half = Fraction(1, 2)
    r = s if s < m else 2 * m - s
    lead = Fraction(r, m)
    if s < m:
        if n <= k // 2:
            x = x_sn_tilde(m, k, s, n)
            if 0 < x < half:
                return 2 * n / b
            if -half < x < 0:
                return lead
        else:
            x = x_sn_tilde(m, k, s, 2 * k + 1 - n)
            if -half < x < 0:
                return (2 * k + 1 - 2 * n) / b
            if -1 < x < -half:
                return lead
    else:
        if n <= k // 2:
            x = x_sn_tilde(m, k, s, 2 * k + 1 - n)
            if -half < x < 0:
                return lead
            if -1 < x < -half:
                return 2 * n / b
        else:
            x = x_sn_tilde(m, k, s, n)
            if 0 < x < half:
                return lead
            if -half < x < 0:
                return (2 * k + 1 - 2 * n) / b
    raise ValueError(f"no closed form for (s, n) = ({s}, {n}); use a_tilde_direct")


def build_A_tilde(m: int, k: int) -> RationalMatrix:
    check_family2(m, k)
    return RationalMatrix.from_rows(
        [[a_tilde_direct(m, k, s, n) for n in range(1, k + 1)] for s in range(1, 2 * m)]
    )


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ObstructionCertificate:
    conjecture: int
    m: int
    k: int
    a: Fraction
    b: Fraction
    p: int
    q: int
    rank: int
    gamma: tuple[int, ...]
    phi_matrix: RationalMatrix = field(repr=False)
    verified: bool

    def to_json(self) -> dict:
        return {
            "conjecture": self.conjecture,
            "m": self.m,
            "k": self.k,
            "a": format_rational(self.a),
            "b": format_rational(self.b),
            "p": self.p,
            "q": self.q,
            "rank": self.rank,
            "gamma": list(self.gamma),
            "matrix": self.phi_matrix.to_json(),
            "verified": self.verified,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ObstructionCertificate":
        return cls(
            conjecture=int(obj["conjecture"]),
            m=int(obj["m"]),
            k=int(obj["k"]),
            a=parse_rational(obj["a"]),
            b=parse_rational(obj["b"]),
            p=int(obj["p"]),
            q=int(obj["q"]),
            rank=int(obj["rank"]),
            gamma=tuple(int(v) for v in obj["gamma"]),
            phi_matrix=RationalMatrix.from_json(obj["matrix"]),
            verified=bool(obj["verified"]),
        )


def _certify(conjecture: int, m: int, k: int, a: Fraction, b: Fraction) -> ObstructionCertificate:
    params = lattice_params(a, b)
    phi = phi_matrix_exact(_q2(), params)
    ns = nullspace_exact(phi)
    if not ns.basis:
        raise CertificateError(
            f"symbol matrix has independent columns for m={m}, k={k}, "
            f"a={format_rational(a)}, b={format_rational(b)}",
            matrix=phi,
        )
    cert = ObstructionCertificate(
        conjecture=conjecture, m=m, k=k, a=a, b=b, p=params.p, q=params.q,
        rank=ns.rank, gamma=ns.basis[0], phi_matrix=phi, verified=False,
    )
    ok = verify_certificate(cert)
    if not ok:
        raise CertificateError("null vector failed re-verification", matrix=phi)
    return replace(cert, verified=True)


def certify_conj1(m: int, k: int, a) -> ObstructionCertificate:
    """Certificate for family 1.

    ``ab`` is reduced to lowest terms before the matrix is built, so a
    non-coprime ``(m, k)`` is certified through its reduced ``(p, q)``.
    """
    a = _check_a(m, k, a)
    return _certify(1, m, k, a, b_of(m, k, a))


@lru_cache(maxsize=None)
def certify_conj2(m: int, k: int) -> ObstructionCertificate:
    check_family2(m, k)
    return _certify(2, m, k, Fraction(1, 2 * m), Fraction(2 * k + 1, 2))


def verify_certificate(cert: ObstructionCertificate) -> bool:
    """Rebuild the symbol matrix from ``(a, b)`` and recheck ``Phi @ gamma``."""
    try:
        params = lattice_params(cert.a, cert.b)
    except ValueError:
        return False
    if (params.p, params.q) != (cert.p, cert.q):
        return False
    phi = phi_matrix_exact(_q2(), params)
    if phi != cert.phi_matrix:
        return False
    if len(cert.gamma) != phi.cols or not any(cert.gamma):
        return False
    return not any(phi.matvec(cert.gamma))
