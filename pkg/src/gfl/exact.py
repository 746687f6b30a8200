"""Exact rational arithmetic and dense linear algebra over Q.

Rationals are :class:`fractions.Fraction`; matrices are immutable row-major
tuples of them.  Rank and nullspace go through fraction-free (Bareiss)
elimination on an integer-scaled copy of the matrix, so intermediate values
are integers whose size is bounded by the minors of the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Rational = Fraction


def make_rational(num: int, den: int = 1) -> Fraction:
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    return Fraction(num, den)


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"num/den"``, an integer or a decimal string exactly.

    ``"2.5"`` becomes ``5/2``; no float is ever involved.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    if not s:
        raise ValueError("empty rational")
    try:
        if "/" in s:
            num, den = s.split("/", 1)
            return make_rational(int(num), int(den))
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse rational {text!r}: {exc}") from None


def format_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class RationalMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RationalMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, tuple(Fraction(x) for r in rows for x in r))

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return self.entries[j::self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix.from_rows([self.col(j) for j in range(self.cols)])

    def matvec(self, v: Sequence) -> tuple[Fraction, ...]:
        if len(v) != self.cols:
            raise ValueError("dimension mismatch")
        return tuple(
            sum((a * b for a, b in zip(self.row(i), v)), Fraction(0))
            for i in range(self.rows)
        )

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [format_rational(x) for x in self.entries],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RationalMatrix":
        return cls(
            int(obj["rows"]),
            int(obj["cols"]),
            tuple(parse_rational(x) for x in obj["entries"]),
        )


@dataclass(frozen=True)
class NullspaceResult:
    rank: int
    basis: tuple[tuple[int, ...], ...]


def _integer_rows(M: RationalMatrix) -> list[list[int]]:
    # Scaling a row by a nonzero constant changes neither rank nor kernel.
    out = []
    for r in M.to_rows():
        d = lcm(*(x.denominator for x in r)) if r else 1
        out.append([x.numerator * (d // x.denominator) for x in r])
    return out


def _bareiss_echelon(A: list[list[int]], ncols: int) -> list[int]:
    """Reduce integer rows ``A`` in place to row echelon form.

    Returns the pivot columns.  Pivot choice is the largest magnitude entry
    in the current column (ties to the topmost row).
    """
    nrows = len(A)
    prev = 1
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        if r == nrows:
            break
        best = max(range(r, nrows), key=lambda i: (abs(A[i][c]), -i))
        if A[best][c] == 0:
            continue
        A[r], A[best] = A[best], A[r]
        piv = A[r][c]
        for i in range(r + 1, nrows):
            lead = A[i][c]
            row_i = A[i]
            row_r = A[r]
            for j in range(c + 1, ncols):
                q, rem = divmod(piv * row_i[j] - lead * row_r[j], prev)
                if rem:
                    raise ArithmeticError("inexact Bareiss division")
                row_i[j] = q
            row_i[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return pivots


def rank_exact(M: RationalMatrix) -> int:
    if M.rows == 0 or M.cols == 0:
        raise ValueError("empty matrix")
    return len(_bareiss_echelon(_integer_rows(M), M.cols))


def primitive_vector(v: Iterable[Fraction]) -> tuple[int, ...]:
    """Scale a rational vector to integers with content 1, first nonzero > 0."""
    v = [Fraction(x) for x in v]
    d = lcm(*(x.denominator for x in v)) if v else 1
    ints = [x.numerator * (d // x.denominator) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def nullspace_exact(M: RationalMatrix) -> NullspaceResult:
    if M.rows == 0 or M.cols == 0:
        raise ValueError("empty matrix")
    E = _integer_rows(M)
    pivots = _bareiss_echelon(E, M.cols)
    free = [c for c in range(M.cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            pc = pivots[r]
            acc = sum((E[r][j] * v[j] for j in range(pc + 1, M.cols)), Fraction(0))
            v[pc] = -acc / E[r][pc]
        vec = primitive_vector(v)
        if any(M.matvec(vec)):
            raise ArithmeticError("nullspace vector failed exact check")
        basis.append(vec)
    return NullspaceResult(rank=len(pivots), basis=tuple(basis))
