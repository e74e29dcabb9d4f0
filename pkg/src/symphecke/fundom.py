"""Genus-one testbed: reduction to the standard fundamental domain of SL_2(Z).

Half-plane arithmetic is floating point; the reducing matrices are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .elemdiv import min_complexity_double_coset
from .errors import NonConvergence, PreconditionError
from .ratmat import RatMatrix, height
from .symplectic import SimilitudeElement, primitive_part

__all__ = [
    "HalfPlanePoint",
    "HeckeInstance",
    "mobius",
    "reduce_to_fundamental",
    "in_fundamental_domain",
    "reduced_pair_representative",
    "height_complexity_experiment",
    "HeightRow",
]

TOL = 1e-9
MAX_STEPS = 10**4
_S = ((0, -1), (1, 0))


@dataclass(frozen=True)
class HalfPlanePoint:
    re: float
    im: float

    def __post_init__(self):
        if not (self.im > 0) or not math.isfinite(self.re) or not math.isfinite(self.im):
            raise PreconditionError(f"not a point of the upper half-plane: {self.re} + {self.im}i")

    @classmethod
    def from_complex(cls, z: complex) -> HalfPlanePoint:
        return cls(z.real, z.imag)

    def to_complex(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True)
class HeckeInstance:
    """The pair ``(tau0, gamma . tau0)`` for an integral primitive gamma with det > 0."""

    tau0: HalfPlanePoint
    gamma: SimilitudeElement

    def __post_init__(self):
        if self.gamma.g != 1:
            raise PreconditionError("only genus one is supported")
        if not self.gamma.is_integral() or primitive_part(self.gamma)[1] != 1:
            raise PreconditionError("gamma must be integral and primitive")


def mobius(m: SimilitudeElement | RatMatrix, tau: HalfPlanePoint) -> HalfPlanePoint:
    M = m.matrix if isinstance(m, SimilitudeElement) else m
    a, b, c, d = (float(M[i, j]) for i in (0, 1) for j in (0, 1))
    z = tau.to_complex()
    return HalfPlanePoint.from_complex((a * z + b) / (c * z + d))


def _nearest_int(x: float) -> int:
    # half-integers round toward zero
    f = math.floor(abs(x))
    if abs(abs(x) - f - 0.5) < 1e-12:
        n = f
    else:
        n = int(round(abs(x)))
    return int(math.copysign(n, x)) if n else 0


def _mul2(A, B):
    return (
        (A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
        (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]),
    )


def reduce_to_fundamental(tau: HalfPlanePoint) -> tuple[HalfPlanePoint, SimilitudeElement]:
    """Gauss reduction: returns ``(tau', m)`` with ``tau' = m . tau`` in the closed domain.

    Alternates translation to ``|Re| <= 1/2`` with inversion while ``|tau| < 1 - 1e-9``.
    """
    z = tau.to_complex()
    m = ((1, 0), (0, 1))
    for _ in range(MAX_STEPS):
        n = _nearest_int(z.real)
        if n:
            z -= n
            m = _mul2(((1, -n), (0, 1)), m)
        if abs(z) < 1 - TOL:
            z = -1 / z
            m = _mul2(_S, m)
        else:
            break
    else:
        raise NonConvergence("reduction did not terminate")
    return HalfPlanePoint.from_complex(z), SimilitudeElement._trusted(RatMatrix.from_ints(m), 1)


def in_fundamental_domain(tau: HalfPlanePoint, tol: float = TOL) -> bool:
    return abs(tau.re) <= 0.5 + tol and abs(tau.to_complex()) >= 1 - tol


def reduced_pair_representative(inst: HeckeInstance) -> tuple[SimilitudeElement, int, int]:
    """``(gamma', H(gamma'), N(s))`` with ``gamma' = g2 gamma g1^-1``.

    ``g1`` reduces ``tau0`` and ``g2`` reduces ``gamma . tau0``, so gamma'
    maps the reduced first coordinate to the reduced second one.
    """
    _, g1 = reduce_to_fundamental(inst.tau0)
    _, g2 = reduce_to_fundamental(mobius(inst.gamma, inst.tau0))
    gp = g2 @ inst.gamma @ g1.inverse()
    return gp, height(gp.matrix), min_complexity_double_coset(inst.gamma)


@dataclass(frozen=True)
class HeightRow:
    N: int
    H: int
    ratio: Fraction
    gamma_prime: SimilitudeElement


def height_complexity_experiment(
    tau0: HalfPlanePoint, gamma_family: Iterable[SimilitudeElement]
) -> tuple[list[HeightRow], Fraction]:
    """One row ``(N, H, H/N)`` per instance, and the largest ratio seen."""
    rows = []
    for gam in gamma_family:
        gp, H, N = reduced_pair_representative(HeckeInstance(tau0, gam))
        rows.append(HeightRow(N, H, Fraction(H, N), gp))
    return rows, max((r.ratio for r in rows), default=Fraction(0))
