"""Symplectic elementary divisors and matrix complexity.

An integral ``M`` in GSp_2g(Q)+ factors as ``kappa @ delta @ lambda_`` with
``kappa, lambda_`` in Sp_2g(Z) and ``delta = diag(a_1..a_g, b_1..b_g)``,
``a_i * b_i = nu``, ``a_i | a_{i+1}``, ``a_g | b_g``. Only ``delta`` is unique.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import InternalCheckFailed, NonIntegralError
from .ratmat import RatMatrix, denom, int_identity, int_matmul, snf_int
from .symplectic import (
    SimilitudeElement,
    gcd_all,
    in_gamma,
    move_add,
    move_pair_flip,
    move_pair_negate,
    move_pair_swap,
    primitive_part,
    sp_inverse_int,
)

__all__ = [
    "ElemDivForm",
    "symplectic_elementary_divisors",
    "symplectic_divisor_chain",
    "complexity_N",
    "min_complexity_double_coset",
    "primitive_integral_representative",
]


@dataclass(frozen=True)
class ElemDivForm:
    kappa: SimilitudeElement
    delta: SimilitudeElement
    lambda_: SimilitudeElement
    a: tuple[int, ...]
    b: tuple[int, ...]

    @property
    def nu(self) -> int:
        return self.a[0] * self.b[0]

    def product(self) -> SimilitudeElement:
        return self.kappa @ self.delta @ self.lambda_

    def is_valid_for(self, M: SimilitudeElement) -> bool:
        g = len(self.a)
        nu = self.nu
        return (
            in_gamma(self.kappa, 1)
            and in_gamma(self.lambda_, 1)
            and self.product().matrix == M.matrix
            and self.delta.matrix == RatMatrix.diag(*self.a, *self.b)
            and all(x > 0 for x in self.a + self.b)
            and all(x * y == nu for x, y in zip(self.a, self.b))
            and all(self.a[i + 1] % self.a[i] == 0 for i in range(g - 1))
            and self.b[g - 1] % self.a[g - 1] == 0
        )


class _Reducer:
    """Carries ``A = L @ M @ Rt.T`` while applying elementary Γ moves."""

    def __init__(self, rows: list[list[int]], g: int):
        self.g = g
        self.A = [list(r) for r in rows]
        self.L = int_identity(2 * g)
        self.Rt = int_identity(2 * g)

    def left(self, X):
        self.A = int_matmul(X, self.A)
        self.L = int_matmul(X, self.L)

    def right(self, X):
        # A @ X.T: the row move X acting on columns
        self.A = [list(r) for r in zip(*int_matmul(X, [list(c) for c in zip(*self.A)]))]
        self.Rt = int_matmul(X, self.Rt)

    def active(self, t: int) -> list[int]:
        g = self.g
        return list(range(t, g)) + list(range(g + t, 2 * g))

    def bring_to_pivot(self, t: int, index: int, side: str):
        """Move row (or column) ``index`` to position e_t."""
        g = self.g
        apply = self.left if side == "row" else self.right
        k = index % g
        if k != t:
            apply(move_pair_swap(g, k, t))
        if index >= g:
            apply(move_pair_flip(g, t))

    def clear_line(self, t: int, side: str) -> bool:
        """Reduce the pivot column (side='row' moves) or row modulo the pivot.

        Returns True when everything except the pivot became zero.
        """
        g = self.g
        apply = self.left if side == "row" else self.right
        p = self.A[t][t]
        # e rows first, then f_j (j != t), then f_t: later moves only disturb f_t
        order = [i for i in range(t + 1, g)] + [g + j for j in range(t + 1, g)] + [g + t]
        for k in order:
            v = self.A[k][t] if side == "row" else self.A[t][k]
            if v:
                apply(move_add(g, k, t, -(v // p)))
        if side == "row":
            return all(self.A[k][t] == 0 for k in order)
        return all(self.A[t][k] == 0 for k in order)

    def reduce(self):
        g = self.g
        for t in range(g):
            act = self.active(t)
            while True:
                best = None
                for i in act:
                    for j in act:
                        v = abs(self.A[i][j])
                        if v and (best is None or v < best[0]):
                            best = (v, i, j)
                if best is None:
                    raise InternalCheckFailed("active block vanished; input was singular")
                _, i, j = best
                self.bring_to_pivot(t, i, "row")
                self.bring_to_pivot(t, j, "col")
                if not self.clear_line(t, "row"):
                    continue
                if not self.clear_line(t, "col"):
                    continue
                p = self.A[t][t]
                bad = next((i for i in act for j in act if self.A[i][j] % p), None)
                if bad is None:
                    break
                self.left(move_add(g, t, bad, 1))
            if self.A[t][t] < 0:
                self.left(move_pair_negate(g, t))


def symplectic_divisor_chain(M: SimilitudeElement) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """``(a, b)`` from the Smith chain ``d_1 | ... | d_2g``: ``a_i = d_i``, ``b_i = d_{2g+1-i}``."""
    _, D, _ = snf_int(M.to_int_rows())
    d = [D[i][i] for i in range(M.dim)]
    g = M.g
    return tuple(d[:g]), tuple(reversed(d[g:]))


def symplectic_elementary_divisors(M: SimilitudeElement) -> ElemDivForm:
    """Decompose an integral positive similitude as ``kappa @ delta @ lambda_``.

    The divisor chain comes from the Smith form; the witnesses come from a
    greedy symplectic reduction. Both are checked against each other and
    the product is checked against ``M`` before returning.
    """
    if not M.is_integral():
        raise NonIntegralError("elementary divisors need an integral matrix")
    g = M.g
    a, b = symplectic_divisor_chain(M)
    red = _Reducer(M.to_int_rows(), g)
    red.reduce()
    A = red.A
    got_a = tuple(A[i][i] for i in range(g))
    got_b = tuple(A[g + i][g + i] for i in range(g))
    if (got_a, got_b) != (a, b):
        raise InternalCheckFailed(f"reduction gave {got_a, got_b}, Smith chain gives {a, b}")
    nu = int(M.nu)
    kappa = SimilitudeElement._trusted(RatMatrix.from_ints(sp_inverse_int(red.L, g)), 1)
    lam_rows = sp_inverse_int(red.Rt, g)
    lam = SimilitudeElement._trusted(RatMatrix.from_ints([list(r) for r in zip(*lam_rows)]), 1)
    delta = SimilitudeElement._trusted(RatMatrix.diag(*a, *b), nu)
    form = ElemDivForm(kappa, delta, lam, a, b)
    if not form.is_valid_for(M):
        raise InternalCheckFailed("decomposition failed verification")
    return form


def complexity_N(M: SimilitudeElement) -> int | Fraction:
    """``max(denom M, |det M * denom(M)^(2g)|)`` for the standard representation.

    denom is the largest entry denominator, so the second term need not be
    an integer when denominators differ (``diag(3/2, 5/3)`` gives 45/2).
    The exact value is returned, as an int whenever it is integral.
    """
    d = denom(M.matrix)
    value = max(Fraction(d), abs(M.det() * d**M.dim))
    return value.numerator if value.denominator == 1 else value


def primitive_integral_representative(M: SimilitudeElement) -> SimilitudeElement:
    """The unique primitive integral positive multiple of M."""
    L = lcm(*(x.denominator for x in M.matrix.entries()))
    scaled = M.scale(L)
    prim, _ = primitive_part(scaled)
    return prim


def min_complexity_double_coset(M: SimilitudeElement) -> int:
    """Smallest N over primitive integral matrices in the double coset of M's primitive multiple."""
    prim = primitive_integral_representative(M)
    form = symplectic_elementary_divisors(prim)
    out = 1
    for x in form.a + form.b:
        out *= x
    if Fraction(out) != prim.det():
        raise InternalCheckFailed("det(delta) differs from det of the primitive representative")
    return out
