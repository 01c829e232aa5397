"""Nonlocal mass-spring lattice: stiffness assembly and static solves.

Every pair of lattice nodes is joined by a spring whose constant-order
stiffness follows closed forms: a six-case table for rows attached to body
nodes, a dedicated expression for the springs joining each boundary to its
neighbour, and a separate boundary-to-boundary spring.  Distributed-order
stiffnesses are the strength-weighted quadrature of the constant-order ones.
The left end is always fixed; the right end carries either a prescribed
displacement or a point traction.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.special import gamma

from .fractional_ops import DisplacementField, Mesh1D
from .order_distributions import OrderDistribution

__all__ = [
    "BoundaryCondition",
    "LatticeModel",
    "InsufficientConstraintsError",
    "SolverError",
    "spring_stiffness_co",
    "assemble",
    "solve_static",
    "boundary_force",
    "external_forces",
    "fit_power_slope",
]

#: order used for the "local reference" configuration; exactly 1 hits the
#: removable singularity of the nearest-neighbour closed form
LOCAL_REFERENCE_ALPHA = 1.0 - 1e-3


class InsufficientConstraintsError(ValueError):
    """The reduced static system is singular (no displacement constraint)."""


class SolverError(RuntimeError):
    """Static solve failed or is numerically untrustworthy."""

    def __init__(self, message: str, condition: float | None = None):
        self.condition = condition
        if condition is not None:
            message = f"{message} (condition estimate {condition:.3e})"
        super().__init__(message)


@dataclass(frozen=True)
class BoundaryCondition:
    """Right-end condition; the left end is always fixed at u(0) = 0."""

    kind: str  # 'dbc' (prescribed displacement) or 'tbc' (point traction)
    value: float

    def __post_init__(self):
        if self.kind not in ("dbc", "tbc"):
            raise ValueError(f"boundary condition kind must be 'dbc' or 'tbc', got {self.kind!r}")

    @classmethod
    def dbc(cls, u0: float) -> "BoundaryCondition":
        return cls("dbc", float(u0))

    @classmethod
    def tbc(cls, T0: float) -> "BoundaryCondition":
        return cls("tbc", float(T0))


@dataclass(frozen=True)
class LatticeModel:
    """Assembled lattice: symmetric spring matrix plus nodal external forces.

    ``K`` stores the equilibrium operator: off-diagonal entries are the
    spring stiffnesses k_ij > 0 and each diagonal entry is minus its row's
    off-diagonal sum, so K @ ones == 0 before boundary conditions.
    ``F_ext`` holds baked-in nodal forces (zero after assembly); solve-time
    loads are added on top of it.
    """

    mesh: Mesh1D
    EA: float
    dist: OrderDistribution
    K: np.ndarray = field(repr=False)
    F_ext: np.ndarray = field(repr=False)

    def stiffness(self, i: int, j: int) -> float:
        if i == j:
            raise ValueError("no spring joins a node to itself")
        return float(self.K[i, j])

    def with_nodal_forces(self, forces: np.ndarray) -> "LatticeModel":
        return replace(self, F_ext=np.asarray(forces, dtype=float))


# -- constant-order spring stiffness ------------------------------------------


def spring_stiffness_co(mesh: Mesh1D, EA: float, alpha: float, i: int, j: int) -> float:
    """Constant-order spring stiffness between nodes i and j (symmetric).

    Body-row pairs follow the six-case closed-form table, the two
    boundary-adjacent springs (0,1) and (n-1,n) their dedicated expression,
    and the boundary-to-boundary pair (0,n) its own closed form.  Requires
    0 < alpha < 1; the assembly handles the order-interval endpoints through
    analytic limits instead.
    """
    if i == j:
        raise ValueError("no spring joins a node to itself")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"spring stiffness defined for orders in (0, 1), got {alpha}")
    return _spring_co_extended(mesh, EA, alpha, i, j)


def _spring_co_extended(mesh: Mesh1D, EA: float, alpha: float, i: int, j: int) -> float:
    """Spring stiffness with the alpha -> 0 and alpha -> 1 analytic limits.

    At alpha = 0 every coefficient carries a factor alpha and vanishes; at
    alpha = 1 the Gamma(1-alpha) pole kills all long-range couplings while
    the 1/(1-alpha) factor of the nearest-neighbour cases cancels it,
    leaving the local chain stiffness EA/dx.
    """
    if i > j:
        i, j = j, i
    n, dx, x = mesh.n, mesh.dx, mesh.nodes
    if not (0 <= i <= n and 0 <= j <= n):
        raise ValueError("node index outside the mesh")
    if alpha == 0.0:
        return 0.0
    if alpha == 1.0:
        return EA / dx if j - i == 1 else 0.0
    if i == 0 and j == n:
        span = x[n] - x[0]
        return (EA / (2.0 * gamma(1.0 - alpha))) * (
            span**-alpha
            + alpha * dx * span ** -(1.0 + alpha)
            + alpha * (1.0 + alpha) * dx**2 * span ** -(2.0 + alpha)
        )
    if (i, j) in ((0, 1), (n - 1, n)):
        return (EA / gamma(1.0 - alpha)) * (alpha / (1.0 - alpha)) * dx**-alpha
    pref = EA * dx / (2.0 * gamma(1.0 - alpha))
    if j - i == 1:
        return pref * (alpha * (1.0 + alpha) / (1.0 - alpha)) * dx ** -(1.0 + alpha)
    r = x[j] - x[i]
    if i == 0 or j == n:
        return pref * (
            alpha * r ** -(1.0 + alpha) + alpha * (1.0 + alpha) * r ** -(2.0 + alpha) * dx
        )
    return pref * alpha * (1.0 + alpha) * r ** -(2.0 + alpha) * dx


def _pair_matrix_co(mesh: Mesh1D, EA: float, alpha: float) -> np.ndarray:
    """All constant-order stiffnesses at once; zero diagonal."""
    n, dx, x = mesh.n, mesh.dx, mesh.nodes
    K = np.zeros((n + 1, n + 1))
    if alpha == 0.0:
        return K
    if alpha == 1.0:
        idx = np.arange(n)
        K[idx, idx + 1] = K[idx + 1, idx] = EA / dx
        return K
    pref = EA * dx / (2.0 * gamma(1.0 - alpha))
    r = np.abs(x[:, None] - x[None, :])
    with np.errstate(divide="ignore"):
        body = np.where(r > 0.0, pref * alpha * (1.0 + alpha) * r ** -(2.0 + alpha) * dx, 0.0)
        # rows touching a boundary gain the slower-decaying term
        extra0 = pref * alpha * np.where(r[0] > 0.0, r[0] ** -(1.0 + alpha), 0.0)
        extran = pref * alpha * np.where(r[n] > 0.0, r[n] ** -(1.0 + alpha), 0.0)
    K[:, :] = body
    K[0, :] += extra0
    K[:, 0] += extra0
    K[n, :] += extran
    K[:, n] += extran
    # dedicated closed forms override the generic cases
    nn = pref * (alpha * (1.0 + alpha) / (1.0 - alpha)) * dx ** -(1.0 + alpha)
    idx = np.arange(1, n - 1)
    K[idx, idx + 1] = K[idx + 1, idx] = nn
    k_edge = _spring_co_extended(mesh, EA, alpha, 0, 1)
    K[0, 1] = K[1, 0] = k_edge
    K[n - 1, n] = K[n, n - 1] = k_edge
    k_corner = _spring_co_extended(mesh, EA, alpha, 0, n)
    K[0, n] = K[n, 0] = k_corner
    np.fill_diagonal(K, 0.0)
    return K


# -- assembly ------------------------------------------------------------------


def assemble(mesh: Mesh1D, EA: float, dist: OrderDistribution) -> LatticeModel:
    """Assemble the distributed-order lattice stiffness matrix.

    Each off-diagonal entry is the order quadrature of the constant-order
    stiffness; a Dirac-delta distribution collapses to a single
    constant-order evaluation.  Diagonal entries close each row to zero sum.
    """
    if mesh.n < 2:
        raise ValueError("lattice needs at least 2 intervals")
    n = mesh.n
    K = np.zeros((n + 1, n + 1))
    nodes, coeff = dist.weighted_nodes()
    for alpha_r, c in zip(nodes, coeff):
        if c == 0.0:
            continue
        K += c * _pair_matrix_co(mesh, EA, float(alpha_r))
    if not np.all(np.isfinite(K)):
        bad = nodes[0] if dist.is_dirac else None
        raise ValueError(f"non-finite stiffness encountered (order node {bad})")
    K[np.diag_indices(n + 1)] = -K.sum(axis=1)
    return LatticeModel(mesh=mesh, EA=EA, dist=dist, K=K, F_ext=np.zeros(n + 1))


# -- loads and solves ----------------------------------------------------------


def external_forces(
    model: LatticeModel,
    bc: BoundaryCondition,
    body_load: Callable[[float], float] | None = None,
) -> np.ndarray:
    """Total nodal force vector: baked-in forces, lumped body load, traction.

    The body load (a force density) is lumped trapezoidally: f(x_i) dx at
    interior nodes and half that at the two end nodes, preserving the total
    load.  Under a traction condition the point force acts on the last node.
    """
    mesh = model.mesh
    F = model.F_ext.copy()
    if body_load is not None:
        f = np.array([float(body_load(xi)) for xi in mesh.nodes])
        lump = f * mesh.dx
        lump[0] *= 0.5
        lump[-1] *= 0.5
        F += lump
    if bc.kind == "tbc":
        F[-1] += bc.value
    return F


def solve_static(
    model: LatticeModel,
    bc: BoundaryCondition,
    body_load: Callable[[float], float] | None = None,
) -> DisplacementField:
    """Static equilibrium of the lattice under the given loads.

    Solves sum_j k_ij (u_j - u_i) + F_i = 0 at every free node with u(0) = 0
    and, under a displacement condition, u(L) fixed as well.
    """
    n = model.mesh.n
    F = external_forces(model, bc, body_load)
    u = np.zeros(n + 1)
    if bc.kind == "dbc":
        free = np.arange(1, n)
        u[n] = bc.value
        fixed = np.array([0, n])
        fixed_vals = np.array([0.0, bc.value])
    else:
        free = np.arange(1, n + 1)
        fixed = np.array([0])
        fixed_vals = np.array([0.0])
    if free.size == 0:
        return DisplacementField(model.mesh, u)
    A = model.K[np.ix_(free, free)]
    rhs = -F[free] - model.K[np.ix_(free, fixed)] @ fixed_vals
    try:
        sol = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise InsufficientConstraintsError(
            f"reduced lattice system is singular: {exc}"
        ) from exc
    resid = np.max(np.abs(A @ sol - rhs))
    scale = max(np.max(np.abs(rhs)), 1.0)
    if not np.all(np.isfinite(sol)) or resid > 1e-8 * scale:
        raise SolverError(
            "lattice solve did not reach the requested accuracy",
            condition=float(np.linalg.cond(A)),
        )
    u[free] = sol
    return DisplacementField(model.mesh, u)


def boundary_force(model: LatticeModel, u, end: str) -> float:
    """Total spring force on a boundary node from all nonlocal connections."""
    vals = u.values if isinstance(u, DisplacementField) else np.asarray(u, dtype=float)
    n = model.mesh.n
    if end == "left":
        row, at = model.K[0], 0
    elif end == "right":
        row, at = model.K[n], n
    else:
        raise ValueError("end must be 'left' or 'right'")
    mask = np.arange(n + 1) != at
    return float(np.sum(row[mask] * (vals[mask] - vals[at])))


# -- stiffness decay ------------------------------------------------------------


def fit_power_slope(separations: np.ndarray, stiffnesses: np.ndarray) -> float:
    """Least-squares slope of log k against log separation."""
    r = np.asarray(separations, dtype=float)
    k = np.asarray(stiffnesses, dtype=float)
    if r.size < 2:
        raise ValueError("need at least two pairs to fit a slope")
    if np.any(r <= 0) or np.any(k <= 0):
        raise ValueError("separations and stiffnesses must be positive")
    slope, _ = np.polyfit(np.log(r), np.log(k), 1)
    return float(slope)
