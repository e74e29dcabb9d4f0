"""Hecke degrees ``[Γ : Γ_γ]`` by enumerating the Γ-orbit of ``γ^-1 Z^2g``.

``Γ_γ = Γ ∩ γ^-1 Γ γ`` is the stabiliser of the lattice ``γ^-1 Z^2g`` in
``Γ = Sp_2g(Z)``, so the orbit size is the index. Lattices are canonicalised
as ``(scale, HNF basis)``; the basis rows span ``scale * lattice``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import gcd, lcm

from .errors import InternalCheckFailed, NonIntegralError, OrbitBudgetExceeded, PreconditionError
from .ratmat import RatMatrix, content, hnf_rows, int_matmul
from .symplectic import SimilitudeElement, standard_generators

__all__ = [
    "Lattice",
    "lattice_from_matrix",
    "hecke_index",
    "coset_representatives",
    "in_gamma_gamma",
    "eta_coset_witnesses",
    "prime_power_parts",
    "DEFAULT_ORBIT_CAP",
]

logger = logging.getLogger(__name__)

DEFAULT_ORBIT_CAP = 10**7


@dataclass(frozen=True)
class Lattice:
    scale: int
    basis: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        c = content(x for r in self.basis for x in r)
        if gcd(self.scale, c) != 1:
            raise ValueError("lattice representation is not reduced")

    @classmethod
    def from_rows(cls, scale: int, rows) -> Lattice:
        basis = hnf_rows(rows)
        c = gcd(scale, content(x for r in basis for x in r))
        return cls(scale // c, tuple(tuple(x // c for x in r) for r in basis))

    def basis_matrix(self) -> RatMatrix:
        return RatMatrix.from_ints(self.basis)

    def act(self, X_T) -> Lattice:
        """Image under ``x``, given ``x.T`` as nested ints (row basis times ``x.T``)."""
        # Γ preserves scale and content, so only the HNF needs recomputing
        obj = Lattice.__new__(Lattice)
        object.__setattr__(obj, "scale", self.scale)
        object.__setattr__(obj, "basis", tuple(tuple(r) for r in hnf_rows(int_matmul(self.basis, X_T))))
        return obj


def lattice_from_matrix(M: SimilitudeElement) -> Lattice:
    """Canonical form of ``M^-1 Z^2g``."""
    inv = M.inverse().matrix
    scale = lcm(*(x.denominator for x in inv.entries()))
    rows = [[(x * scale).numerator for x in col] for col in zip(*inv.rows)]
    return Lattice.from_rows(scale, rows)


def _orbit(M: SimilitudeElement, cap: int) -> list[tuple[Lattice, int, int]]:
    """BFS over the orbit as ``(lattice, parent_index, generator_index)`` records."""
    gens = standard_generators(M.g)
    gens_T = [[list(r) for r in zip(*x.to_int_rows())] for x in gens]
    start = lattice_from_matrix(M)
    seen = {start: 0}
    records = [(start, -1, -1)]
    frontier = [0]
    while frontier:
        found: dict[Lattice, tuple[int, int]] = {}
        for idx in frontier:
            lat = records[idx][0]
            for k, XT in enumerate(gens_T):
                img = lat.act(XT)
                if img not in seen and img not in found:
                    found[img] = (idx, k)
        nxt = []
        for img in sorted(found, key=lambda L: L.basis):
            seen[img] = len(records)
            records.append((img, *found[img]))
            nxt.append(seen[img])
            if len(records) > cap:
                raise OrbitBudgetExceeded(f"orbit exceeds cap of {cap} lattices")
        frontier = nxt
    return records


def _check_integral(M: SimilitudeElement):
    if not M.is_integral():
        raise NonIntegralError("hecke_index expects an integral similitude")


def hecke_index(M: SimilitudeElement, cap: int = DEFAULT_ORBIT_CAP) -> int:
    """``[Γ : Γ_γ]`` as the size of the Γ-orbit of ``M^-1 Z^2g``."""
    _check_integral(M)
    size = len(_orbit(M, cap))
    logger.debug("orbit of %s has %d lattices", M.matrix.to_text(), size)
    return size


def coset_representatives(M: SimilitudeElement, cap: int = DEFAULT_ORBIT_CAP) -> list[SimilitudeElement]:
    """Representatives ``y_1..y_k`` of ``Γ_γ \\ Γ``.

    If the BFS word ``x`` reaches the i-th orbit lattice, ``y_i = x^-1``;
    then ``y_i y_j^-1`` lies in Γ_γ only for ``i == j``.
    """
    _check_integral(M)
    gens = standard_generators(M.g)
    records = _orbit(M, cap)
    words: list[SimilitudeElement] = []
    for _, parent, k in records:
        if parent < 0:
            words.append(SimilitudeElement.identity(M.g))
        else:
            words.append(gens[k] @ words[parent])
    return [x.inverse() for x in words]


def in_gamma_gamma(M: SimilitudeElement, x: SimilitudeElement) -> bool:
    """Is ``x`` (assumed in Γ) in ``γ^-1 Γ γ``, i.e. is ``γ x γ^-1`` integral."""
    return (M @ x @ M.inverse()).is_integral()


def prime_power_parts(n: int) -> list[int]:
    """The prime-power factors of n, ordered by prime."""
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            q = 1
            while n % p == 0:
                n //= p
                q *= p
            out.append(q)
        p += 1
    if n > 1:
        out.append(n)
    return out


def _is_prime_power(q: int) -> bool:
    return q >= 2 and len(prime_power_parts(q)) == 1


def eta_coset_witnesses(delta: SimilitudeElement, q: int) -> list[SimilitudeElement]:
    """The elements ``eta_0..eta_{q-1}``: identity plus ``l`` at position (g+1, 1).

    ``delta`` must be a diagonal normal form with ``a_1 = 1`` and q a prime
    power dividing ``nu``. Every x in ``Γ ∩ δ Γ δ^-1`` has ``x[g+1, 1] ≡ 0 mod nu``
    and ``eta_k^-1 eta_l = eta_{l-k}``, so the witnesses lie in distinct cosets
    of that group mod q; both facts about the list are re-checked before
    returning. ``Γ ∩ δ Γ δ^-1`` has the same index as Γ_δ, and for Γ_δ itself
    the zero entry is at (1, g+1), so the transposes of the witnesses separate
    its cosets.
    """
    g = delta.g
    if not delta.is_integral() or not delta.matrix.is_diagonal():
        raise PreconditionError("delta must be an integral diagonal matrix")
    d = [delta.matrix[i, i].numerator for i in range(2 * g)]
    a, b = d[:g], d[g:]
    nu = int(delta.nu)
    normal = (
        all(x * y == nu for x, y in zip(a, b))
        and all(a[i + 1] % a[i] == 0 for i in range(g - 1))
        and b[-1] % a[-1] == 0
    )
    if not normal:
        raise PreconditionError("delta is not in elementary divisor normal form")
    if a[0] != 1:
        raise PreconditionError("delta is not primitive (a_1 != 1)")
    if not _is_prime_power(q) or nu % q:
        raise PreconditionError(f"{q} is not a prime power dividing nu = {nu}")

    def eta(l: int) -> SimilitudeElement:
        rows = [[int(i == j) for j in range(2 * g)] for i in range(2 * g)]
        rows[g][0] = l
        return SimilitudeElement._trusted(RatMatrix.from_ints(rows), 1)

    out = [eta(l) for l in range(q)]
    for k in range(q):
        inv_k = out[k].inverse()
        for l in range(q):
            if k == l:
                continue
            if inv_k @ out[l] != eta(l - k):
                raise InternalCheckFailed("eta product rule failed")
            if (l - k) % q == 0:
                raise InternalCheckFailed("eta witnesses are not coset-distinct")
    return out
