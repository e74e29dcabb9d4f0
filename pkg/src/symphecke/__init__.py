"""Exact symplectic matrix computations for Hecke correspondences on A_g x A_g."""

__version__ = "0.1.0"

from .elemdiv import (
    ElemDivForm,
    complexity_N,
    min_complexity_double_coset,
    symplectic_elementary_divisors,
)
from .ratmat import RatMatrix, denom, height, hermite_normal_form, parse_matrix, smith_normal_form
from .symplectic import (
    GeneratorSet,
    SimilitudeElement,
    in_gamma,
    primitive_part,
    similitude_character,
    standard_generators,
)

__all__ = [
    "RatMatrix",
    "parse_matrix",
    "denom",
    "height",
    "smith_normal_form",
    "hermite_normal_form",
    "SimilitudeElement",
    "GeneratorSet",
    "similitude_character",
    "in_gamma",
    "standard_generators",
    "primitive_part",
    "ElemDivForm",
    "symplectic_elementary_divisors",
    "complexity_N",
    "min_complexity_double_coset",
]
