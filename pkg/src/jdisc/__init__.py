"""Pseudo-holomorphic discs in almost complex C^n.

Spectral machinery on the unit disc (Cauchy-Green operator, Vekua-type
linear systems with Fredholm modification), a nonlinear disc solver through
the holomorphic chart map, jet prescription, and randomized perturbation to
immersions and to transversality against jet-space submanifolds.
"""

from .cgreen import (
    DiscGrid,
    HolomorphicDatum,
    SpectralField,
    analyze,
    cauchy_green,
    cg_quadrature_oracle,
    complex_derivative,
    grid_for_degree,
    grid_inner_product,
    inner_product,
    s_chi,
    synthesize,
)
from .polynomial import PolynomialMap
from .structure import (
    RealLinearOp,
    StructureChart,
    a_from_j,
    j_from_a,
    nijenhuis_tensor,
    scalar_cr_residual,
)

__all__ = [
    "DiscGrid",
    "HolomorphicDatum",
    "PolynomialMap",
    "RealLinearOp",
    "SpectralField",
    "StructureChart",
    "a_from_j",
    "analyze",
    "cauchy_green",
    "cg_quadrature_oracle",
    "complex_derivative",
    "grid_for_degree",
    "grid_inner_product",
    "inner_product",
    "j_from_a",
    "nijenhuis_tensor",
    "s_chi",
    "scalar_cr_residual",
    "synthesize",
]

__version__ = "0.1.0"
