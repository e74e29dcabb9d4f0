"""Symplectic similitudes, Sp_2g(Z) and its principal congruence subgroups.

The alternating form is fixed as ``J = [[0, I_g], [-I_g, 0]]``; a matrix
``M`` is a similitude with factor ``nu`` when ``M.T @ J @ M == nu * J``.
Coordinates ``0..g-1`` are called ``e_i`` and ``g..2g-1`` are ``f_i``; the
pair ``(e_i, f_i)`` is the i-th hyperbolic pair.

Generators (pinned, changing them changes spectral regression values):

* g = 1: ``S, S^-1, T, T^-1`` with ``S = [[0,-1],[1,0]]``, ``T = [[1,1],[0,1]]``.
* g >= 2: ``J, J^-1``, then ``T_B, T_B^-1`` for ``B = E_ii`` (i = 1..g) and
  ``B = E_ij + E_ji`` (i < j), then ``diag(U, U^-T), inverse`` for the
  elementary transvections ``U = I + E_{i,i+1}``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Iterator, Sequence

from .errors import NegativeSimilitude, NonIntegralError, NotSimilitude, ShapeError, UnsupportedGenus
from .ratmat import RatMatrix, content, int_identity, int_matmul

__all__ = [
    "standard_form",
    "SimilitudeElement",
    "GeneratorSet",
    "similitude_character",
    "in_gamma",
    "standard_generators",
    "primitive_part",
]


@lru_cache(maxsize=None)
def standard_form(g: int) -> RatMatrix:
    n = 2 * g
    rows = [[0] * n for _ in range(n)]
    for i in range(g):
        rows[i][g + i] = 1
        rows[g + i][i] = -1
    return RatMatrix.from_ints(rows)


def _genus_of(M: RatMatrix) -> int:
    n, m = M.shape
    if n != m or n % 2:
        raise ShapeError(f"expected a square matrix of even size, got {M.shape}")
    return n // 2


def similitude_character(M: RatMatrix) -> Fraction:
    """Return ``nu`` with ``M.T J M = nu J``.

    Raises NotSimilitude if no such scalar exists and NegativeSimilitude if
    the scalar is negative (zero counts as not a similitude).
    """
    g = _genus_of(M)
    J = standard_form(g)
    P = M.T @ J @ M
    nu = P[0, g]
    if nu == 0 or P != J.scale(nu):
        raise NotSimilitude("M^T J M is not a nonzero multiple of J")
    if nu < 0:
        raise NegativeSimilitude(f"similitude factor {nu} is negative")
    return nu


class SimilitudeElement:
    """A matrix certified in GSp_2g(Q)+ together with its similitude factor."""

    __slots__ = ("g", "matrix", "nu")

    def __init__(self, matrix: RatMatrix | str | Sequence[Sequence], *, _nu: Fraction | None = None):
        if isinstance(matrix, str):
            matrix = RatMatrix.parse(matrix)
        elif not isinstance(matrix, RatMatrix):
            matrix = RatMatrix(matrix)
        self.g = _genus_of(matrix)
        self.matrix = matrix
        self.nu = similitude_character(matrix) if _nu is None else _nu

    @classmethod
    def _trusted(cls, matrix: RatMatrix, nu) -> SimilitudeElement:
        # skips the MᵀJM check for matrices built from certified pieces
        obj = cls.__new__(cls)
        obj.g = matrix.nrows // 2
        obj.matrix = matrix
        obj.nu = Fraction(nu)
        return obj

    @classmethod
    def from_ints(cls, rows: Sequence[Sequence[int]]) -> SimilitudeElement:
        return cls(RatMatrix.from_ints(rows))

    @classmethod
    def identity(cls, g: int) -> SimilitudeElement:
        return cls._trusted(RatMatrix.identity(2 * g), 1)

    @property
    def dim(self) -> int:
        return 2 * self.g

    def is_integral(self) -> bool:
        return self.matrix.is_integral()

    def det(self) -> Fraction:
        return self.nu**self.g

    def to_int_rows(self) -> list[list[int]]:
        return self.matrix.to_int_rows()

    def __matmul__(self, other: SimilitudeElement) -> SimilitudeElement:
        if not isinstance(other, SimilitudeElement):
            return NotImplemented
        return SimilitudeElement._trusted(self.matrix @ other.matrix, self.nu * other.nu)

    def inverse(self) -> SimilitudeElement:
        # M^-1 = nu^-1 J^-1 M^T J
        J = standard_form(self.g)
        inv = (-J) @ self.matrix.T @ J
        return SimilitudeElement._trusted(inv.scale(1 / self.nu), 1 / self.nu)

    def scale(self, c) -> SimilitudeElement:
        c = Fraction(c)
        if c == 0:
            raise ValueError("cannot scale by zero")
        return SimilitudeElement._trusted(self.matrix.scale(c), self.nu * c * c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimilitudeElement):
            return NotImplemented
        return self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    def __repr__(self) -> str:
        return f"SimilitudeElement({self.matrix.to_text()!r}, nu={self.nu})"


def in_gamma(M: SimilitudeElement, q: int = 1) -> bool:
    """True iff M lies in the principal congruence subgroup of level q."""
    if M.nu != 1 or not M.is_integral():
        return False
    if q == 1:
        return True
    n = M.dim
    return all((M.matrix[i, j].numerator - (i == j)) % q == 0 for i in range(n) for j in range(n))


def primitive_part(M: SimilitudeElement) -> tuple[SimilitudeElement, int]:
    """Split an integral similitude as ``content * primitive``."""
    rows = M.to_int_rows()
    c = content(x for r in rows for x in r)
    return SimilitudeElement._trusted(
        RatMatrix.from_ints([[x // c for x in r] for r in rows]), M.nu / (c * c)
    ), c


@dataclass(frozen=True)
class GeneratorSet:
    """A finite symmetric list of elements of Sp_2g(Z).

    Order matters: Cayley graphs and word lifts are indexed by position.
    """

    g: int
    elements: tuple[SimilitudeElement, ...]

    def __post_init__(self):
        for x in self.elements:
            if x.g != self.g:
                raise ShapeError("generator of the wrong genus")
            if not in_gamma(x, 1):
                raise NotSimilitude(f"generator {x.matrix.to_text()} is not in Sp_2g(Z)")
        counts = Counter(x.matrix for x in self.elements)
        for x in self.elements:
            if counts[x.inverse().matrix] != counts[x.matrix]:
                raise ValueError("generator set is not closed under inverses")

    @classmethod
    def symmetric_closure(cls, g: int, mats: Iterable) -> GeneratorSet:
        """Interleave each element with its inverse (skipped for involutions)."""
        out: list[SimilitudeElement] = []
        for m in mats:
            x = m if isinstance(m, SimilitudeElement) else SimilitudeElement(m)
            out.append(x)
            inv = x.inverse()
            if inv != x:
                out.append(inv)
        return cls(g, tuple(out))

    def __iter__(self) -> Iterator[SimilitudeElement]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, i: int) -> SimilitudeElement:
        return self.elements[i]

    def inverse_index(self) -> list[int]:
        """Position of an inverse for every generator, pairing duplicates one to one."""
        pool: dict[RatMatrix, list[int]] = {}
        for i, x in enumerate(self.elements):
            pool.setdefault(x.matrix, []).append(i)
        used: dict[RatMatrix, int] = {}
        out = []
        for x in self.elements:
            inv = x.inverse().matrix
            k = used.get(inv, 0)
            out.append(pool[inv][k % len(pool[inv])])
            used[inv] = k + 1
        return out


def _block(g: int, A, B, C, D) -> list[list[int]]:
    return [A[i] + B[i] for i in range(g)] + [C[i] + D[i] for i in range(g)]


@lru_cache(maxsize=None)
def standard_generators(g: int) -> GeneratorSet:
    """The pinned symmetric generating set of Sp_2g(Z)."""
    if not isinstance(g, int) or g < 1:
        raise UnsupportedGenus(f"genus must be a positive integer, got {g!r}")
    if g == 1:
        S = [[0, -1], [1, 0]]
        T = [[1, 1], [0, 1]]
        return GeneratorSet.symmetric_closure(1, [SimilitudeElement.from_ints(S), SimilitudeElement.from_ints(T)])
    I = int_identity(g)
    Z = [[0] * g for _ in range(g)]
    mats = [_block(g, Z, I, [[-x for x in r] for r in I], Z)]
    syms = []
    for i in range(g):
        B = [[0] * g for _ in range(g)]
        B[i][i] = 1
        syms.append(B)
    for i in range(g):
        for j in range(i + 1, g):
            B = [[0] * g for _ in range(g)]
            B[i][j] = B[j][i] = 1
            syms.append(B)
    mats += [_block(g, I, B, Z, I) for B in syms]
    for i in range(g - 1):
        U = int_identity(g)
        U[i][i + 1] = 1
        Uinv_T = int_identity(g)
        Uinv_T[i + 1][i] = -1
        mats.append(_block(g, U, Z, Z, Uinv_T))
    return GeneratorSet.symmetric_closure(g, [SimilitudeElement.from_ints(m) for m in mats])


# -- elementary Γ moves on nested int lists -----------------------------------
#
# Each returns an integral matrix X in Sp_2g(Z). Left multiplication X @ A
# performs the stated row operation (plus a compensating one that keeps X
# symplectic); A @ X.T performs the same operation on columns.


def move_add(g: int, dst: int, src: int, c: int) -> list[list[int]]:
    """Row ``dst += c * row src``.

    Side effects by case (i, j pair indices):
    e_i += c e_j  also does  f_j -= c f_i;
    f_i += c f_j  also does  e_j -= c e_i;
    e_i += c f_j  also does  e_j += c f_i  (i != j);
    f_i += c e_j  also does  f_j += c e_i  (i != j).
    """
    if dst == src:
        raise ValueError("dst and src must differ")
    X = int_identity(2 * g)
    de, se = dst < g, src < g
    i, j = dst % g, src % g
    if de == se:
        if de:
            X[i][j] += c
            X[g + j][g + i] -= c
        else:
            X[g + i][g + j] += c
            X[j][i] -= c
    elif de:
        X[i][g + j] += c
        if i != j:
            X[j][g + i] += c
    else:
        X[g + i][j] += c
        if i != j:
            X[g + j][i] += c
    return X


def move_pair_swap(g: int, i: int, j: int) -> list[list[int]]:
    """Exchange hyperbolic pairs i and j."""
    X = int_identity(2 * g)
    if i != j:
        for a, b in ((i, j), (g + i, g + j)):
            X[a][a] = X[b][b] = 0
            X[a][b] = X[b][a] = 1
    return X


def move_pair_flip(g: int, i: int) -> list[list[int]]:
    """Row e_i <- row f_i, row f_i <- -row e_i."""
    X = int_identity(2 * g)
    X[i][i] = X[g + i][g + i] = 0
    X[i][g + i] = 1
    X[g + i][i] = -1
    return X


def move_pair_negate(g: int, i: int) -> list[list[int]]:
    X = int_identity(2 * g)
    X[i][i] = X[g + i][g + i] = -1
    return X


def sp_inverse_int(X: Sequence[Sequence[int]], g: int) -> list[list[int]]:
    """Inverse of an element of Sp_2g(Z): ``-J X^T J``."""
    n = 2 * g
    # (-J X^T J)[a][b] computed without building J
    XT = [[X[j][i] for j in range(n)] for i in range(n)]

    def jrow(M, a):  # row a of J @ M
        return M[a + g] if a < g else [-x for x in M[a - g]]

    JXT = [jrow(XT, a) for a in range(n)]
    # (JXT) @ J: column b of result is  col_{b-g}(JXT) if b >= g else -col_{b+g}(JXT)
    out = [[(r[b - g] if b >= g else -r[b + g]) for b in range(n)] for r in JXT]
    return [[-x for x in r] for r in out]


def is_symplectic_int(X: Sequence[Sequence[int]], g: int, nu: int = 1) -> bool:
    J = standard_form(g).to_int_rows()
    XT = [list(r) for r in zip(*X)]
    return int_matmul(int_matmul(XT, J), X) == [[nu * x for x in r] for r in J]


def gcd_all(rows: Iterable[Iterable[int]]) -> int:
    out = 0
    for r in rows:
        for x in r:
            out = gcd(out, x)
    return out
