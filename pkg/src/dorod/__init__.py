"""Distributed-order nonlocal rod: continuum solver, equivalent spring lattice,
energy bookkeeping, and a layered-lattice homogenization demonstrator."""

from .fractional_ops import DisplacementField, FracStencil, Mesh1D
from .mslm import BoundaryCondition, LatticeModel
from .order_distributions import (
    OrderDistribution,
    beta,
    dirac,
    linear,
    parse_distribution,
    truncnorm,
    uniform,
)
from .donet import RodProblem, StressField

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition",
    "DisplacementField",
    "FracStencil",
    "LatticeModel",
    "Mesh1D",
    "OrderDistribution",
    "RodProblem",
    "StressField",
    "beta",
    "dirac",
    "linear",
    "parse_distribution",
    "truncnorm",
    "uniform",
]
