"""Shared generators and independent oracles for the test suite.

The oracles deliberately avoid the package's own reduction code: they use
sympy determinants, brute-force enumeration, or closed formulas.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from functools import reduce
from math import gcd

import numpy as np
import sympy

from symphecke.ratmat import RatMatrix
from symphecke.symplectic import SimilitudeElement, standard_generators


def random_word(rng: random.Random, g: int, max_len: int = 12) -> SimilitudeElement:
    gens = standard_generators(g)
    x = SimilitudeElement.identity(g)
    for _ in range(rng.randint(0, max_len)):
        x = x @ gens[rng.randrange(len(gens))]
    return x


def diag_elem(*d) -> SimilitudeElement:
    return SimilitudeElement(RatMatrix.diag(*d))


def normal_forms(g: int, nu_max: int, primitive: bool = False) -> list[tuple[int, ...]]:
    """All diag(a, b) with a_i b_i = nu, a_i | a_{i+1}, a_g | b_g, nu <= nu_max."""
    out = []
    for nu in range(1, nu_max + 1):
        divs = [d for d in range(1, nu + 1) if nu % d == 0]
        for a in itertools.product(divs, repeat=g):
            if any(a[i + 1] % a[i] for i in range(g - 1)):
                continue
            b = tuple(nu // x for x in a)
            if b[-1] % a[-1]:
                continue
            if primitive and a[0] != 1:
                continue
            out.append(tuple(a) + b)
    return out


# -- oracles ------------------------------------------------------------------------


def determinantal_divisors(rows) -> list[int]:
    """Invariant factors from gcds of k x k minors (sympy determinants)."""
    M = sympy.Matrix(rows)
    n, m = M.shape
    prev = 1
    out = []
    for k in range(1, min(n, m) + 1):
        dk = 0
        for r in itertools.combinations(range(n), k):
            for c in itertools.combinations(range(m), k):
                dk = gcd(dk, int(M.extract(list(r), list(c)).det()))
        if dk == 0:
            out.extend([0] * (min(n, m) - k + 1))
            break
        out.append(dk // prev)
        prev = dk
    return out


def cyclic_sublattice_count(n: int) -> int:
    """Index-n sublattices of Z^2 with cyclic quotient, via HNF (a, b; 0, d)."""
    count = 0
    for a in range(1, n + 1):
        if n % a:
            continue
        d = n // a
        count += sum(1 for b in range(d) if reduce(gcd, (a, b, d)) == 1)
    return count


def lagrangian_count_f2(g: int) -> int:
    """Maximal isotropic subspaces of F_2^{2g} under the standard form, brute force."""
    dim = 2 * g
    J = np.zeros((dim, dim), dtype=np.int64)
    J[:g, g:] = np.eye(g, dtype=np.int64)
    J[g:, :g] = -np.eye(g, dtype=np.int64)
    vecs = [np.array(v) for v in itertools.product((0, 1), repeat=dim)]
    seen = set()
    for basis in itertools.combinations(vecs[1:], g):
        B = np.array(basis)
        if np.linalg.matrix_rank(B) < g:  # rank over Q bounds rank over F_2 from above
            continue
        span = {tuple(np.array(c) @ B % 2) for c in itertools.product((0, 1), repeat=g)}
        if len(span) != 2**g:
            continue
        if np.any((B @ J @ B.T) % 2):
            continue
        seen.add(frozenset(span))
    return len(seen)


def sl2_order_bruteforce(q: int) -> int:
    r = np.arange(q)
    a, b, c, d = np.meshgrid(r, r, r, r, indexing="ij")
    return int(np.count_nonzero((a * d - b * c) % q == 1 % q))


def sp4_mod2_bruteforce() -> int:
    J = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])  # -1 = 1 mod 2
    bits = (np.arange(2**16)[:, None] >> np.arange(16)) & 1
    M = bits.reshape(-1, 4, 4)
    P = np.einsum("nji,jk,nkl->nil", M, J, M) % 2
    return int(np.count_nonzero(np.all(P == J, axis=(1, 2))))


def complexity_formula(rows) -> Fraction:
    """max(denom, |det * denom^n|) evaluated with sympy rationals."""
    M = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows])
    den = max(int(sympy.fraction(x)[1]) for x in M)
    det = M.det()
    val = abs(det * den ** M.shape[0])
    best = max(sympy.Integer(den), val)
    return Fraction(int(best.p), int(best.q))


def as_fraction_rows(M: SimilitudeElement) -> list[list[Fraction]]:
    return [list(r) for r in M.matrix.rows]
