"""Idempotent (max-plus) linear algebra on finite ground sets.

Integral kernels of b-linear operators, semimetric closures, Lipschitz-type
semimodules and b-nuclear decompositions, with executable theorem checkers.
"""
from .semiring import BOOLEAN, RMAX, ZMAX, Scalar, Semiring, SemiringError, get_semiring
from .semimodule import (
    B_CLOSED,
    WEDGE_CLOSED,
    DomainError,
    GroundSet,
    Semimodule,
    admissible,
    d_x,
    membership,
    nondegenerate,
)
from .operator import (
    IntegralOperator,
    IntegrityError,
    TabulatedOperator,
    compose,
    is_integral,
    max_kernel,
)
from .semimetric import Semimetric, star_closure, validate_semimetric
from .nuclearity import NuclearDecomposition, OneDimOperator, nuclear_decompose_identity
from .theorems import check_theorem

__version__ = "0.1.0"

__all__ = [
    "BOOLEAN", "RMAX", "ZMAX", "Scalar", "Semiring", "SemiringError", "get_semiring",
    "B_CLOSED", "WEDGE_CLOSED", "DomainError", "GroundSet", "Semimodule", "admissible",
    "d_x", "membership", "nondegenerate", "IntegralOperator", "IntegrityError",
    "TabulatedOperator", "compose", "is_integral", "max_kernel", "Semimetric",
    "star_closure", "validate_semimetric", "NuclearDecomposition", "OneDimOperator",
    "nuclear_decompose_identity", "check_theorem",
]
