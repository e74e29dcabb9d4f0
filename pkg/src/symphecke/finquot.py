"""Finite symplectic quotients Sp_2g(Z/qZ) and subgroups generated inside them.

Closures run breadth-first directly modulo q (no CRT splitting) and record a
word for every element, so each element has an exact lift to Sp_2g(Z).
Elements are stored as residue arrays and hashed through a base-q packing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import ClosureBudgetExceeded, NonIntegralError, PreconditionError
from .hecke import prime_power_parts
from .ratmat import content
from .symplectic import GeneratorSet, SimilitudeElement, in_gamma, standard_form, standard_generators

__all__ = [
    "FiniteSymplecticGroup",
    "GeneratedSubgroup",
    "group_order",
    "reduce_mod",
    "generated_subgroup",
    "quotient_index_of_gamma_gamma",
    "surjectivity_check",
    "bounded_image_experiment",
    "ImageRow",
    "DEFAULT_CLOSURE_CAP",
]

logger = logging.getLogger(__name__)

DEFAULT_CLOSURE_CAP = 10**7
WORD_POLICIES = ("shortlex", "revlex")


def group_order(g: int, q: int) -> int:
    """|Sp_2g(Z/qZ)|, multiplicative over the prime-power parts of q."""
    if q < 2:
        raise PreconditionError("modulus must be at least 2")
    out = 1
    for pk in prime_power_parts(q):
        p = min(d for d in range(2, pk + 1) if pk % d == 0)
        k = 0
        while pk > 1:
            pk //= p
            k += 1
        term = p ** ((k - 1) * (2 * g * g + g)) * p ** (g * g)
        for i in range(1, g + 1):
            term *= p ** (2 * i) - 1
        out *= term
    return out


@dataclass(frozen=True)
class FiniteSymplecticGroup:
    """Sp_2g(Z/qZ) with elements as ``(2g, 2g)`` integer arrays of residues."""

    g: int
    q: int

    def __post_init__(self):
        if self.q < 2:
            raise PreconditionError("modulus must be at least 2")

    @property
    def dim(self) -> int:
        return 2 * self.g

    def order(self) -> int:
        return group_order(self.g, self.q)

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=np.int64)

    def multiply(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % self.q

    def contains(self, a: np.ndarray) -> bool:
        a = np.asarray(a, dtype=np.int64) % self.q
        J = np.array(standard_form(self.g).to_int_rows(), dtype=np.int64)
        return bool(np.array_equal((a.T @ J @ a) % self.q, J % self.q))


def reduce_mod(M: SimilitudeElement, q: int) -> np.ndarray:
    """Entrywise reduction of an element of Sp_2g(Z) modulo q."""
    if not in_gamma(M, 1):
        raise PreconditionError("reduce_mod expects an element of Sp_2g(Z)")
    return _reduce_rows(M, q)


def _reduce_rows(M: SimilitudeElement, q: int) -> np.ndarray:
    return np.array([[x % q for x in r] for r in M.to_int_rows()], dtype=np.int64)


class _KeyIndex:
    """Sorted-array map from packed keys to element indices."""

    def __init__(self, dtype):
        self.keys = np.empty(0, dtype=dtype)
        self.idx = np.empty(0, dtype=np.int64)

    def find(self, keys: np.ndarray) -> np.ndarray:
        if len(self.keys) == 0:
            return np.full(len(keys), -1, dtype=np.int64)
        # sorted queries keep searchsorted cache-friendly
        qo = np.argsort(keys, kind="stable")
        sk = keys[qo]
        pos = np.minimum(np.searchsorted(self.keys, sk), len(self.keys) - 1)
        out = np.empty(len(keys), dtype=np.int64)
        out[qo] = np.where(self.keys[pos] == sk, self.idx[pos], -1)
        return out

    def add(self, keys: np.ndarray, indices: np.ndarray):
        allk = np.concatenate([self.keys, keys])
        alli = np.concatenate([self.idx, indices])
        order = np.argsort(allk, kind="stable")
        self.keys, self.idx = allk[order], alli[order]


class GeneratedSubgroup:
    """Breadth-first closure of generators reduced mod q, with words.

    ``elements[i]`` equals the ordered product ``gens[w_1] @ ... @ gens[w_k]``
    mod q, where ``w = word(i)``; element 0 is the identity with empty word.
    ``neighbors[i, k]`` is the index of ``elements[i] @ gens[k]``.
    """

    def __init__(
        self,
        gens: GeneratorSet,
        q: int,
        cap: int = DEFAULT_CLOSURE_CAP,
        policy: str = "shortlex",
    ):
        if policy not in WORD_POLICIES:
            raise ValueError(f"unknown word policy {policy!r}")
        self.parent = FiniteSymplecticGroup(gens.g, q)
        self.gens = gens
        self.q = q
        self.policy = policy
        n = self.parent.dim
        self._powers = self._make_powers(q, n * n)
        self._gens_mod = np.array([_reduce_rows(x, q) for x in gens], dtype=np.int64).reshape(len(gens), n, n)
        self._build(cap)

    @staticmethod
    def _make_powers(q: int, length: int):
        if q ** length < 2**63:
            return np.array([q**i for i in range(length)], dtype=np.int64)
        return np.array([q**i for i in range(length)], dtype=object)

    def _encode(self, flat: np.ndarray) -> np.ndarray:
        if self._powers.dtype == object:
            return flat.astype(object) @ self._powers
        return flat @ self._powers

    def _products(self, frontier: np.ndarray, Gcat: np.ndarray, r: int) -> np.ndarray:
        q, n = self.q, self.parent.dim
        F = len(frontier)
        if n * q * q < 2**52:
            # float64 BLAS is exact for these magnitudes
            prod = frontier.reshape(F * n, n).astype(np.float64) @ Gcat.astype(np.float64)
            prod = np.fmod(prod, q).astype(np.int64)
        else:
            prod = (frontier.reshape(F * n, n).astype(object) @ Gcat.astype(object)) % q
            prod = prod.astype(np.int64)
        return prod.reshape(F, n, r, n).transpose(0, 2, 1, 3).reshape(F * r, n * n)

    def _build(self, cap: int):
        q, n = self.q, self.parent.dim
        r = len(self.gens)
        order = list(range(r)) if self.policy == "shortlex" else list(range(r - 1, -1, -1))
        ident = np.eye(n, dtype=np.int64) % q
        elems = [ident[None]]
        parents = [np.array([-1], dtype=np.int64)]
        gen_of = [np.array([-1], dtype=np.int64)]
        depth = [np.array([0], dtype=np.int64)]
        index = _KeyIndex(self._powers.dtype)
        index.add(self._encode(ident.reshape(1, -1)), np.array([0], dtype=np.int64))
        nbr_rows: list[np.ndarray] = []
        total = 1
        # all generator products of a frontier as one (F*n, n) @ (n, r*n) product
        Gcat = np.concatenate(list(self._gens_mod[order]), axis=1) if r else None
        frontier_start, frontier = 0, ident[None]
        level = 0
        while len(frontier) and r:
            F = len(frontier)
            flat = self._products(frontier, Gcat, r)
            keys = self._encode(flat)
            found = index.find(keys)
            unseen = np.flatnonzero(found < 0)
            if len(unseen):
                uk, first = np.unique(keys[unseen], return_index=True)
                first_pos = unseen[first]
                o = np.argsort(first_pos, kind="stable")
                first_pos = first_pos[o]
                new_ids = np.arange(total, total + len(first_pos), dtype=np.int64)
                total += len(first_pos)
                if total > cap:
                    raise ClosureBudgetExceeded(f"closure exceeds cap of {cap} elements")
                index.add(keys[first_pos], new_ids)
                new_elems = flat[first_pos].reshape(-1, n, n)
                elems.append(new_elems)
                parents.append(frontier_start + first_pos // r)
                gen_of.append(np.array(order, dtype=np.int64)[first_pos % r])
                depth.append(np.full(len(first_pos), level + 1, dtype=np.int64))
                found = index.find(keys)
            else:
                new_elems = np.empty((0, n, n), dtype=np.int64)
            # neighbour table in natural generator order
            nb = np.empty((F, r), dtype=np.int64)
            nb[:, order] = found.reshape(F, r)
            nbr_rows.append(nb)
            frontier_start = frontier_start + F
            frontier = new_elems
            level += 1
        self.elements = np.concatenate(elems).astype(np.int64)
        self.parents = np.concatenate(parents)
        self.gen_index = np.concatenate(gen_of)
        self.depth = np.concatenate(depth)
        self.neighbors = np.concatenate(nbr_rows) if nbr_rows else np.empty((1, 0), dtype=np.int64)
        self._index = index
        logger.debug("closure mod %d: %d elements, %d levels", q, total, level)

    # -- queries ----------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def index_of(self, element) -> int:
        a = np.asarray(element, dtype=np.int64).reshape(1, -1) % self.q
        return int(self._index.find(self._encode(a))[0])

    def __contains__(self, element) -> bool:
        return self.index_of(element) >= 0

    def word(self, i: int) -> list[int]:
        out = []
        while self.parents[i] >= 0:
            out.append(int(self.gen_index[i]))
            i = int(self.parents[i])
        return out[::-1]

    def lift(self, i: int) -> SimilitudeElement:
        """Exact evaluation of the recorded word in Sp_2g(Z)."""
        x = SimilitudeElement.identity(self.parent.g)
        for k in self.word(i):
            x = x @ self.gens[k]
        return x

    def lifts(self) -> np.ndarray:
        """Exact lifts of all elements, computed level by level along the BFS tree.

        Uses int64 while entries stay far from overflow, Python ints otherwise.
        """
        n = self.parent.dim
        G = np.array([x.to_int_rows() for x in self.gens], dtype=np.int64).reshape(len(self.gens), n, n)
        gmax = int(np.abs(G).max()) if len(G) else 1
        out = np.zeros((len(self), n, n), dtype=np.int64)
        out[0] = np.eye(n, dtype=np.int64)
        limit = 2**62 // max(1, n * gmax)
        top = int(self.depth.max())
        for d in range(1, top + 1):
            ids = np.flatnonzero(self.depth == d)
            par = out[self.parents[ids]]
            if out.dtype != object and int(np.abs(par).max()) >= limit:
                out = out.astype(object)
                G = G.astype(object)
            out[ids] = np.einsum("fij,fjk->fik", par, G[self.gen_index[ids]])
        return out


@lru_cache(maxsize=8)
def _cached_closure(gens: GeneratorSet, q: int, cap: int, policy: str) -> GeneratedSubgroup:
    return GeneratedSubgroup(gens, q, cap, policy)


def generated_subgroup(
    gens: GeneratorSet | Sequence[SimilitudeElement],
    q: int,
    cap: int = DEFAULT_CLOSURE_CAP,
    policy: str = "shortlex",
    g: int | None = None,
) -> GeneratedSubgroup:
    """Closure of ``gens`` reduced mod q.

    ``gens`` may be a plain sequence (then ``g`` is needed if it is empty).
    Raises ClosureBudgetExceeded when the closure exceeds ``cap`` elements.
    """
    if q < 2:
        raise PreconditionError("modulus must be at least 2")
    if not isinstance(gens, GeneratorSet):
        gens = list(gens)
        genus = gens[0].g if gens else g
        if genus is None:
            raise PreconditionError("genus needed for an empty generator list")
        gens = GeneratorSet(genus, tuple(gens))
    return _cached_closure(gens, q, cap, policy)


def _check_primitive_integral(M: SimilitudeElement):
    if not M.is_integral():
        raise NonIntegralError("expected an integral similitude")
    if content(x for r in M.to_int_rows() for x in r) != 1:
        raise PreconditionError("entries share a common factor; primitivize first")


def quotient_index_of_gamma_gamma(
    M: SimilitudeElement, cap: int = DEFAULT_CLOSURE_CAP, policy: str = "shortlex"
) -> int:
    """``[Sp_2g(Z/qZ) : π_q(Γ_γ)]`` with ``q = nu(M)``, which equals ``[Γ : Γ_γ]``.

    Each element of the closure is tested through its exact word lift ``x``:
    it lies in π_q(Γ_γ) iff ``M x M^-1`` is integral. Because Γ(q) ⊆ Γ_γ the
    answer does not depend on which lift is used.
    """
    _check_primitive_integral(M)
    nu = M.nu
    if nu.denominator != 1 or nu < 2:
        raise PreconditionError("nu must be an integer >= 2 (nu = 1 means Γ_γ = Γ)")
    q = int(nu)
    g = M.g
    if group_order(g, q) > cap:
        raise ClosureBudgetExceeded(f"|Sp_{2 * g}(Z/{q})| = {group_order(g, q)} exceeds cap {cap}")
    H = generated_subgroup(standard_generators(g), q, cap, policy)
    # M x M^-1 = M x adj / q with adj = q M^-1 = J^-1 M^T J integral, so the
    # test is M x adj ≡ 0 mod q; reducing every factor first keeps int64 exact
    X = (H.lifts() % q).astype(np.int64)
    gam = _reduce_rows(M, q)
    J = standard_form(g)
    adj = np.array([[x % q for x in r] for r in ((-J) @ M.matrix.T @ J).to_int_rows()], dtype=np.int64)
    P = np.einsum("ij,fjk,kl->fil", gam, X, adj)
    members = int(np.count_nonzero(np.all((P % q) == 0, axis=(1, 2))))
    if len(H) % members:
        raise PreconditionError("filtered set is not a subgroup; generators do not match the group")
    return len(H) // members


def surjectivity_check(g: int, q: int, cap: int = DEFAULT_CLOSURE_CAP) -> bool:
    """Does the closure of the standard generators mod q exhaust Sp_2g(Z/qZ)."""
    target = group_order(g, q)
    if target > cap:
        raise ClosureBudgetExceeded(f"|Sp_{2 * g}(Z/{q})| = {target} exceeds cap {cap}")
    return len(generated_subgroup(standard_generators(g), q, cap)) == target


@dataclass(frozen=True)
class ImageRow:
    q: int
    subgroup_order: int | None
    index: int | None
    skipped: bool = False
    reason: str = ""


@dataclass(frozen=True)
class ImageExperiment:
    rows: tuple[ImageRow, ...]
    max_index: int | None = field(default=None)


def bounded_image_experiment(
    gens: GeneratorSet, q_list: Iterable[int], cap: int = DEFAULT_CLOSURE_CAP
) -> ImageExperiment:
    """Index of the image of ⟨gens⟩ in Sp_2g(Z/qZ) for each q."""
    rows = []
    for q in q_list:
        try:
            H = generated_subgroup(gens, q, cap)
        except ClosureBudgetExceeded as exc:
            rows.append(ImageRow(q, None, None, True, str(exc)))
            continue
        total = group_order(gens.g, q)
        rows.append(ImageRow(q, len(H), total // len(H)))
    done = [r.index for r in rows if not r.skipped]
    return ImageExperiment(tuple(rows), max(done) if done else None)
