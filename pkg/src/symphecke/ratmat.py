"""Exact rational matrices, heights and integer normal forms.

Entries are :class:`fractions.Fraction`, which keeps every value in lowest
terms with a positive denominator, so ``denom`` and ``height`` can read the
numerator and denominator directly.

The matrix text format is ``rows;separated,by,commas`` with entries ``a`` or
``a/b``, e.g. ``1/2,3;4,5/6``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

from .errors import NonIntegralError, ParseError, RankDeficientError, ShapeError

__all__ = [
    "RatMatrix",
    "SnfResult",
    "denom",
    "height",
    "smith_normal_form",
    "hermite_normal_form",
    "parse_matrix",
    "ext_gcd",
]

_ENTRY_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not _ENTRY_RE.match(s):
            raise ParseError(f"bad rational entry {x!r}")
        num, _, den = s.partition("/")
        if den and int(den) == 0:
            raise ParseError(f"zero denominator in {x!r}")
        return Fraction(int(num), int(den) if den else 1)
    # numpy integers and other exact integral types
    if hasattr(x, "__index__"):
        return Fraction(x.__index__())
    raise TypeError(f"cannot build an exact rational from {type(x).__name__}")


class RatMatrix:
    """Immutable dense matrix of exact rationals.

    >>> M = RatMatrix([[1, "1/2"], [0, 3]])
    >>> M.to_text()
    '1,1/2;0,3'
    """

    __slots__ = ("_rows", "_hash")

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(_to_fraction(x) for x in row) for row in rows)
        if not data or not data[0]:
            raise ShapeError("matrix must have at least one row and one column")
        width = len(data[0])
        if any(len(r) != width for r in data):
            raise ShapeError("ragged rows")
        self._rows = data
        self._hash = None

    @classmethod
    def _from_fractions(cls, rows: tuple[tuple[Fraction, ...], ...]) -> RatMatrix:
        obj = cls.__new__(cls)
        obj._rows = rows
        obj._hash = None
        return obj

    @classmethod
    def from_ints(cls, rows: Sequence[Sequence[int]]) -> RatMatrix:
        return cls._from_fractions(tuple(tuple(Fraction(int(x)) for x in r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        return cls.from_ints([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RatMatrix:
        return cls.from_ints([[0] * cols for _ in range(rows)])

    @classmethod
    def diag(cls, *values) -> RatMatrix:
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def parse(cls, text: str) -> RatMatrix:
        return parse_matrix(text)

    # -- shape and access ---------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return len(self._rows), len(self._rows[0])

    @property
    def nrows(self) -> int:
        return len(self._rows)

    @property
    def ncols(self) -> int:
        return len(self._rows[0])

    @property
    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def entries(self) -> tuple[Fraction, ...]:
        """Row-major entries."""
        return tuple(x for r in self._rows for x in r)

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        i, j = idx
        return self._rows[i][j]

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self._rows for x in r)

    def is_diagonal(self) -> bool:
        return all(x == 0 for i, r in enumerate(self._rows) for j, x in enumerate(r) if i != j)

    def to_int_rows(self) -> list[list[int]]:
        if not self.is_integral():
            raise NonIntegralError("matrix has non-integral entries")
        return [[x.numerator for x in r] for r in self._rows]

    # -- arithmetic ---------------------------------------------------------

    @property
    def T(self) -> RatMatrix:
        return RatMatrix._from_fractions(tuple(zip(*self._rows)))

    def __matmul__(self, other: RatMatrix) -> RatMatrix:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        cols = tuple(zip(*other._rows))
        return RatMatrix._from_fractions(
            tuple(tuple(sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols) for r in self._rows)
        )

    def __add__(self, other: RatMatrix) -> RatMatrix:
        if self.shape != other.shape:
            raise ShapeError("shape mismatch")
        return RatMatrix._from_fractions(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows))
        )

    def __sub__(self, other: RatMatrix) -> RatMatrix:
        return self + (-other)

    def __neg__(self) -> RatMatrix:
        return RatMatrix._from_fractions(tuple(tuple(-a for a in r) for r in self._rows))

    def scale(self, c) -> RatMatrix:
        c = _to_fraction(c)
        return RatMatrix._from_fractions(tuple(tuple(c * a for a in r) for r in self._rows))

    def __mul__(self, c) -> RatMatrix:
        if isinstance(c, RatMatrix):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def det(self) -> Fraction:
        """Determinant by fraction-exact Gaussian elimination."""
        if not self.is_square():
            raise ShapeError("determinant of a non-square matrix")
        a = [list(r) for r in self._rows]
        n = len(a)
        result = Fraction(1)
        for c in range(n):
            p = next((i for i in range(c, n) if a[i][c] != 0), None)
            if p is None:
                return Fraction(0)
            if p != c:
                a[c], a[p] = a[p], a[c]
                result = -result
            piv = a[c][c]
            result *= piv
            for i in range(c + 1, n):
                if a[i][c]:
                    f = a[i][c] / piv
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return result

    def inverse(self) -> RatMatrix:
        if not self.is_square():
            raise ShapeError("inverse of a non-square matrix")
        n = self.nrows
        a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self._rows)]
        for c in range(n):
            p = next((i for i in range(c, n) if a[i][c] != 0), None)
            if p is None:
                raise RankDeficientError("matrix is singular")
            a[c], a[p] = a[p], a[c]
            piv = a[c][c]
            a[c] = [x / piv for x in a[c]]
            for i in range(n):
                if i != c and a[i][c]:
                    f = a[i][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return RatMatrix._from_fractions(tuple(tuple(r[n:]) for r in a))

    # -- identity -----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._rows)
        return self._hash

    def to_text(self) -> str:
        return ";".join(",".join(str(x) for x in r) for r in self._rows)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"RatMatrix({self.to_text()!r})"


def parse_matrix(text: str) -> RatMatrix:
    """Parse ``a,b;c,d`` text into a :class:`RatMatrix`.

    Raises ParseError on malformed entries, ragged rows or zero denominators.
    """
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty matrix text")
    rows = [r.split(",") for r in text.strip().split(";")]
    try:
        return RatMatrix(rows)
    except ShapeError as exc:
        raise ParseError(str(exc)) from exc


def denom(M: RatMatrix) -> int:
    """Largest lowest-terms denominator among the entries."""
    return max(x.denominator for x in M.entries())


def height(M: RatMatrix) -> int:
    """Largest of ``|numerator|`` and ``denominator`` over all entries."""
    return max(max(abs(x.numerator), x.denominator) for x in M.entries())


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def content(values: Iterable[int]) -> int:
    return reduce(gcd, values, 0)


def int_matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list[list[int]]:
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in A]


def int_identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


# -- Hermite normal form ------------------------------------------------------


def hnf_rows(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style HNF of a full-row-rank integer matrix given as nested lists."""
    A = [list(r) for r in rows]
    m, n = len(A), len(A[0])
    r = 0
    for c in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            b = A[i][c]
            if b == 0:
                continue
            a = A[r][c]
            g, x, y = ext_gcd(a, b)
            ag, bg = a // g, b // g
            Ar, Ai = A[r], A[i]
            A[r] = [x * u + y * v for u, v in zip(Ar, Ai)]
            A[i] = [ag * v - bg * u for u, v in zip(Ar, Ai)]
        p = A[r][c]
        if p == 0:
            continue
        if p < 0:
            A[r] = [-u for u in A[r]]
            p = -p
        for i in range(r):
            f = A[i][c] // p
            if f:
                A[i] = [u - f * v for u, v in zip(A[i], A[r])]
        r += 1
    if r < m:
        raise RankDeficientError("matrix does not have full row rank")
    return A


def hermite_normal_form(M: RatMatrix) -> RatMatrix:
    """Unique row-style Hermite normal form.

    Pivots move strictly right going down, are positive, and entries above a
    pivot lie in ``[0, pivot)``. The row span over Z is unchanged.
    """
    if M.nrows > M.ncols:
        raise RankDeficientError("more rows than columns cannot have full row rank")
    return RatMatrix.from_ints(hnf_rows(M.to_int_rows()))


# -- Smith normal form --------------------------------------------------------


@dataclass(frozen=True)
class SnfResult:
    """``U @ M @ V == D`` with U, V unimodular and D a divisor chain."""

    U: RatMatrix
    D: RatMatrix
    V: RatMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        k = min(self.D.shape)
        return tuple(self.D[i, i].numerator for i in range(k))


def snf_int(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Smith form on nested int lists; returns ``(U, D, V)``."""
    A = [list(r) for r in rows]
    m, n = len(A), len(A[0])
    U = int_identity(m)
    V = int_identity(n)

    def row_axpy(dst, src, c):
        A[dst] = [x + c * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def col_axpy(dst, src, c):
        for R in A:
            R[dst] += c * R[src]
        for R in V:
            R[dst] += c * R[src]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for R in A:
            R[i], R[j] = R[j], R[i]
        for R in V:
            R[i], R[j] = R[j], R[i]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    v = abs(A[i][j])
                    if v and (best is None or v < best[0]):
                        best = (v, i, j)
            if best is None:
                return U, A, V
            _, i, j = best
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    row_axpy(i, t, -(A[i][t] // p))
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    col_axpy(j, t, -(A[t][j] // p))
                    dirty = dirty or A[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            row_axpy(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return U, A, V


def smith_normal_form(M: RatMatrix) -> SnfResult:
    """Smith normal form with unimodular witnesses.

    Raises NonIntegralError for matrices with fractional entries.
    """
    U, D, V = snf_int(M.to_int_rows())
    return SnfResult(RatMatrix.from_ints(U), RatMatrix.from_ints(D), RatMatrix.from_ints(V))
