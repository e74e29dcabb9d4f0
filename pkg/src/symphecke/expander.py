"""Cayley graphs of finite symplectic quotients and their expansion.

A Cayley graph here joins ``x`` to ``x @ s`` for every generator ``s``; the
arc ``(x, s)`` and the arc ``(x s, s^-1)`` are the same undirected edge.
Coinciding generators give multi-edges and identity generators give loops,
so the adjacency matrix is ``sum_s P_s`` and every vertex has degree ``r``.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.csgraph
import scipy.sparse.linalg

from .errors import ClosureBudgetExceeded, DisconnectedGraph, PreconditionError
from .finquot import DEFAULT_CLOSURE_CAP, GeneratedSubgroup, generated_subgroup
from .symplectic import GeneratorSet, standard_generators

__all__ = [
    "CayleyGraph",
    "is_bth_power_free",
    "build_cayley",
    "spectral_gap",
    "second_eigenpair",
    "edge_expansion_sweep",
    "edge_expansion_exact",
    "edge_expansion",
    "cheeger_bounds",
    "expander_scan",
    "ScanRow",
    "DENSE_LIMIT",
]

logger = logging.getLogger(__name__)

DENSE_LIMIT = 5000
EXACT_LIMIT = 20


def is_bth_power_free(n: int, b: int) -> bool:
    """True iff no prime's b-th power divides n."""
    if n < 1 or b < 2:
        raise PreconditionError("need n >= 1 and b >= 2")
    p = 2
    while p**b <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            if k >= b:
                return False
        p += 1
    return True


class CayleyGraph:
    """An r-regular multigraph stored as an ``(n, r)`` table of arc targets.

    ``targets[v, k]`` is the vertex reached from ``v`` along generator ``k``.
    ``labels`` optionally holds the group element of each vertex.
    """

    def __init__(self, targets: np.ndarray, labels: np.ndarray | None = None):
        targets = np.asarray(targets, dtype=np.int64)
        if targets.ndim != 2:
            raise ValueError("targets must be a 2-d array")
        self.targets = targets
        self.labels = labels
        self._eig: tuple[float, np.ndarray] | None = None

    @property
    def n(self) -> int:
        return self.targets.shape[0]

    @property
    def r(self) -> int:
        return self.targets.shape[1]

    def adjacency(self) -> scipy.sparse.csr_matrix:
        rows = np.repeat(np.arange(self.n), self.r)
        A = scipy.sparse.csr_matrix(
            (np.ones(self.n * self.r), (rows, self.targets.ravel())), shape=(self.n, self.n)
        )
        A.sum_duplicates()
        return A

    def degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency().sum(axis=1)).ravel()

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edge multiset, each edge once as ``(min, max)``."""
        counts: dict[tuple[int, int], int] = {}
        for v in range(self.n):
            for w in self.targets[v]:
                key = (min(v, int(w)), max(v, int(w)))
                counts[key] = counts.get(key, 0) + 1
        out = []
        for (u, w), c in sorted(counts.items()):
            # non-loop edges are seen from both ends
            out.extend([(u, w)] * (c if u == w else c // 2))
        return out

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        k, _ = scipy.sparse.csgraph.connected_components(self.adjacency(), directed=False)
        return k == 1

    def boundary(self, mask: np.ndarray) -> int:
        """Number of edges leaving the vertex set given by a boolean mask."""
        mask = np.asarray(mask, dtype=bool)
        return int(np.count_nonzero(mask[:, None] & ~mask[self.targets]))


def build_cayley(H: GeneratedSubgroup, gens: GeneratorSet | None = None) -> CayleyGraph:
    """Cayley graph of the finite group H with respect to ``gens`` reduced mod q.

    With ``gens`` omitted (or equal to H's own generators) the neighbour
    table recorded during the closure is reused.
    """
    if gens is None or gens == H.gens:
        return CayleyGraph(H.neighbors.copy(), H.elements)
    n = H.parent.dim
    q = H.q
    G = np.array([[[x % q for x in r] for r in s.to_int_rows()] for s in gens], dtype=np.int64)
    targets = np.empty((len(H), len(gens)), dtype=np.int64)
    for k in range(len(gens)):
        prod = np.einsum("fij,jk->fik", H.elements, G[k]) % q
        for v in range(len(H)):
            idx = H.index_of(prod[v])
            if idx < 0:
                raise PreconditionError("H is not closed under the given generators")
            targets[v, k] = idx
    return CayleyGraph(targets, H.elements)


def _dense_eigenpair(G: CayleyGraph) -> tuple[float, np.ndarray]:
    A = G.adjacency().toarray() / G.r
    w, V = scipy.linalg.eigh(A)
    return float(w[-2]), V[:, -2]


def _sparse_eigenpair(G: CayleyGraph, tol: float) -> tuple[float, np.ndarray]:
    n = G.n
    A = G.adjacency() / G.r
    ones = np.ones(n) / math.sqrt(n)

    def mv(x):
        x = np.asarray(x).ravel()
        y = A @ x
        return y - ones * (ones @ x)

    op = scipy.sparse.linalg.LinearOperator((n, n), matvec=mv, dtype=np.float64)
    rng = np.random.default_rng(0)
    v0 = rng.standard_normal(n)
    w, V = scipy.sparse.linalg.eigsh(op, k=1, which="LA", v0=v0 - ones * (ones @ v0), tol=tol, maxiter=100000)
    return float(w[0]), V[:, 0]


def second_eigenpair(G: CayleyGraph, tol: float = 1e-12) -> tuple[float, np.ndarray]:
    """Second-largest eigenvalue of ``A / r`` and an eigenvector for it.

    Dense symmetric solve up to ``DENSE_LIMIT`` vertices; above that Lanczos
    on ``A / r`` with the constant vector deflated.
    """
    if G._eig is None:
        if not G.is_connected():
            raise DisconnectedGraph("graph is not connected")
        if G.n < 2:
            raise PreconditionError("need at least two vertices")
        G._eig = _dense_eigenpair(G) if G.n <= DENSE_LIMIT else _sparse_eigenpair(G, tol)
    return G._eig


def spectral_gap(G: CayleyGraph) -> float:
    """``1 - lambda_2`` of the degree-normalised adjacency matrix."""
    lam2, _ = second_eigenpair(G)
    return 1.0 - lam2


def edge_expansion_exact(G: CayleyGraph) -> float:
    """``min |dX| / |X|`` over nonempty X with ``|X| <= n/2``, by enumeration."""
    n = G.n
    if n > EXACT_LIMIT:
        raise PreconditionError(f"exact enumeration limited to {EXACT_LIMIT} vertices")
    if not G.is_connected():
        raise DisconnectedGraph("graph is not connected")
    masks = np.arange(1, 2**n, dtype=np.int64)
    sizes = np.zeros(len(masks), dtype=np.int64)
    for v in range(n):
        sizes += (masks >> v) & 1
    masks = masks[sizes <= n // 2]
    sizes = sizes[sizes <= n // 2]
    cut = np.zeros(len(masks), dtype=np.int64)
    for v in range(n):
        inside = (masks >> v) & 1
        for w in G.targets[v]:
            cut += inside & (1 - ((masks >> int(w)) & 1))
    return float(np.min(cut / sizes))


def edge_expansion_sweep(G: CayleyGraph) -> float:
    """Best prefix cut along the second eigenvector, an upper bound on expansion.

    Every prefix X of the eigenvector order is scored as ``|dX| / min(|X|, n - |X|)``.
    """
    _, vec = second_eigenpair(G)
    return _sweep(G, vec)


def edge_expansion(G: CayleyGraph) -> float:
    """Exact expansion for small graphs, the sweep bound otherwise."""
    if G.n <= EXACT_LIMIT:
        return edge_expansion_exact(G)
    return edge_expansion_sweep(G)


def _sweep(G: CayleyGraph, vec: np.ndarray) -> float:
    n = G.n
    order = np.argsort(vec, kind="stable")
    inside = np.zeros(n, dtype=bool)
    cut = 0
    best = math.inf
    T = G.targets
    for k, u in enumerate(order[:-1], start=1):
        nb = T[u]
        loops = int(np.count_nonzero(nb == u))
        into = int(np.count_nonzero(inside[nb]))
        cut += (G.r - loops - into) - into
        inside[u] = True
        best = min(best, cut / min(k, n - k))
    return float(best)


@dataclass(frozen=True)
class ScanRow:
    q: int
    n: int | None
    gap: float | None
    sweep: float | None
    excluded_reason: str = ""


def _scan_one(args) -> ScanRow:
    gens, q, cap = args
    try:
        H = generated_subgroup(gens, q, cap)
    except ClosureBudgetExceeded:
        return ScanRow(q, None, None, None, "closure_budget_exceeded")
    G = build_cayley(H)
    if G.n < 2:
        return ScanRow(q, G.n, None, None, "trivial_group")
    gap = spectral_gap(G)
    sweep = edge_expansion_sweep(G)
    logger.info("q=%d n=%d gap=%.6g sweep=%.6g", q, G.n, gap, sweep)
    return ScanRow(q, G.n, gap, sweep)


def expander_scan(
    gens: GeneratorSet | None = None,
    b: int = 2,
    q_max: int = 10,
    cap: int = DEFAULT_CLOSURE_CAP,
    g: int = 1,
    n_jobs: int = 1,
) -> list[ScanRow]:
    """Spectral gap and sweep expansion for every b-th-power-free ``2 <= q <= q_max``."""
    if gens is None:
        gens = standard_generators(g)
    moduli = [q for q in range(2, q_max + 1) if is_bth_power_free(q, b)]
    jobs = [(gens, q, cap) for q in moduli]
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as ex:
            return list(ex.map(_scan_one, jobs))
    return [_scan_one(j) for j in jobs]


def cheeger_bounds(gap: float) -> tuple[float, float]:
    """Bounds ``(gap / 2, sqrt(2 gap))`` on the normalised expansion ``h / r``."""
    return gap / 2.0, math.sqrt(2.0 * gap)
