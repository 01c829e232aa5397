"""Constant-order fractional operators on a uniform 1D mesh.

Provides the discrete left/right Caputo derivatives (piecewise-linear "L1"
scheme with exact integration of the power-law kernel over each cell), the
symmetric two-sided combination used as the nonlocal stress measure, and a
relative-displacement (Marchaud-type) rectangular form of the same operator.
All operators act on nodal values and are exact annihilators of constant
fields.  Order endpoints are handled by their analytic limits: at alpha = 0
the one-sided derivatives reduce to finite differences against the domain
ends, at alpha = 1 to two-point difference quotients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import gamma

__all__ = [
    "Mesh1D",
    "DisplacementField",
    "FracStencil",
    "caputo_left",
    "caputo_right",
    "caputo_left_matrix",
    "caputo_right_matrix",
    "riesz_stress_stencil",
    "marchaud_riesz_matrix",
    "first_derivative_matrix",
]


@dataclass(frozen=True)
class Mesh1D:
    """Uniform mesh of n intervals on [0, L]; nodes x_i = i * dx."""

    L: float
    n: int

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("mesh length must be positive")
        if self.n < 2:
            raise ValueError("mesh needs at least 2 intervals")

    @property
    def dx(self) -> float:
        return self.L / self.n

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.n + 1)

    @cached_property
    def midpoints(self) -> np.ndarray:
        return self.nodes[:-1] + 0.5 * self.dx


@dataclass(frozen=True)
class DisplacementField:
    """Nodal displacements on a mesh."""

    mesh: Mesh1D
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.mesh.n + 1,):
            raise ValueError(f"expected {self.mesh.n + 1} nodal values, got {vals.shape}")
        object.__setattr__(self, "values", vals)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.values, dtype=dtype)


def _values(u) -> np.ndarray:
    if isinstance(u, DisplacementField):
        return u.values
    return np.asarray(u, dtype=float)


def _check_order(alpha: float):
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"fractional order must lie in (0, 1), got {alpha}")


def _check_order_closed(alpha: float):
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"fractional order must lie in [0, 1], got {alpha}")


@dataclass(frozen=True)
class FracStencil:
    """Dense stencil: the discrete operator at node i is sum_j c[i, j] u_j."""

    alpha: float
    matrix: np.ndarray = field(repr=False)

    def apply(self, u) -> np.ndarray:
        return self.matrix @ _values(u)

    def row_sums(self) -> np.ndarray:
        return self.matrix.sum(axis=1)


# -- L1 (piecewise-linear) Caputo matrices on the nodes ----------------------


def caputo_left_matrix(mesh: Mesh1D, alpha: float) -> np.ndarray:
    """Matrix of the discrete left Caputo derivative at every node.

    Row i carries (1/Gamma(1-a)) sum_j slope_j * int_{x_j}^{x_{j+1}}
    (x_i - s)^(-a) ds with the kernel integral in closed form; row 0 is zero.
    Order endpoints use the analytic limits (difference against u(0) at
    alpha=0, backward difference quotient at alpha=1).
    """
    _check_order_closed(alpha)
    n, dx, x = mesh.n, mesh.dx, mesh.nodes
    C = np.zeros((n + 1, n + 1))
    if alpha == 0.0:
        idx = np.arange(1, n + 1)
        C[idx, idx] += 1.0
        C[idx, 0] -= 1.0
        return C
    if alpha == 1.0:
        idx = np.arange(1, n + 1)
        C[idx, idx] += 1.0 / dx
        C[idx, idx - 1] -= 1.0 / dx
        return C
    # P[i, j] = (x_i - x_j)^(1-a) for j <= i, else 0
    diff = x[:, None] - x[None, :]
    P = np.where(diff > 0.0, np.abs(diff) ** (1.0 - alpha), 0.0)
    # cell weight over [x_j, x_{j+1}] for rows i > j
    W = (P[:, :-1] - P[:, 1:]) * np.tri(n + 1, n, k=-1)
    W /= gamma(2.0 - alpha) * dx
    C[:, 1:] += W
    C[:, :-1] -= W
    return C


def caputo_right_matrix(mesh: Mesh1D, alpha: float) -> np.ndarray:
    """Matrix of the discrete right Caputo derivative (mirror of the left).

    Follows the usual sign convention carrying a leading minus, so that for
    increasing u the right derivative is negative; row n is zero.
    """
    _check_order_closed(alpha)
    n, dx, x = mesh.n, mesh.dx, mesh.nodes
    C = np.zeros((n + 1, n + 1))
    if alpha == 0.0:
        idx = np.arange(0, n)
        C[idx, idx] += 1.0
        C[idx, n] -= 1.0
        return C
    if alpha == 1.0:
        idx = np.arange(0, n)
        C[idx, idx] += 1.0 / dx
        C[idx, idx + 1] -= 1.0 / dx
        return C
    diff = x[None, :] - x[:, None]  # x_j - x_i
    Q = np.where(diff > 0.0, np.abs(diff) ** (1.0 - alpha), 0.0)
    # mask rows i <= j for cells [x_j, x_{j+1}]; minus sign of the right Caputo
    W = -(Q[:, 1:] - Q[:, :-1]) * (1.0 - np.tri(n + 1, n, k=-1))
    W /= gamma(2.0 - alpha) * dx
    C[:, 1:] += W
    C[:, :-1] -= W
    return C


def caputo_left(mesh: Mesh1D, alpha: float, u, i: int) -> float:
    """Left Caputo derivative of u at node i; zero at i = 0."""
    _check_order(alpha)
    if not 0 <= i <= mesh.n:
        raise ValueError(f"node index {i} outside [0, {mesh.n}]")
    vals = _values(u)
    if i == 0:
        return 0.0
    x, dx = mesh.nodes, mesh.dx
    j = np.arange(i)
    cell = (x[i] - x[j]) ** (1.0 - alpha) - (x[i] - x[j + 1]) ** (1.0 - alpha)
    slopes = (vals[j + 1] - vals[j]) / dx
    return float(np.dot(slopes, cell) / gamma(2.0 - alpha))


def caputo_right(mesh: Mesh1D, alpha: float, u, i: int) -> float:
    """Right Caputo derivative of u at node i; zero at i = n."""
    _check_order(alpha)
    if not 0 <= i <= mesh.n:
        raise ValueError(f"node index {i} outside [0, {mesh.n}]")
    vals = _values(u)
    if i == mesh.n:
        return 0.0
    x, dx = mesh.nodes, mesh.dx
    j = np.arange(i, mesh.n)
    cell = (x[j + 1] - x[i]) ** (1.0 - alpha) - (x[j] - x[i]) ** (1.0 - alpha)
    slopes = (vals[j + 1] - vals[j]) / dx
    return float(-np.dot(slopes, cell) / gamma(2.0 - alpha))


def riesz_stress_stencil(mesh: Mesh1D, alpha: float) -> FracStencil:
    """Symmetric stress-measure stencil: (left - right) Caputo over two.

    Reduces to the central difference quotient in the alpha -> 1 limit at
    interior nodes and annihilates constants at every order.
    """
    _check_order_closed(alpha)
    mat = 0.5 * (caputo_left_matrix(mesh, alpha) - caputo_right_matrix(mesh, alpha))
    return FracStencil(alpha, mat)


# -- midpoint variants (used by the continuum solver's conservative form) ----


def caputo_left_midpoint_matrix(mesh: Mesh1D, alpha: float) -> np.ndarray:
    """Left Caputo rows evaluated at cell midpoints; shape (n, n+1)."""
    _check_order_closed(alpha)
    n, dx, x = mesh.n, mesh.dx, mesh.nodes
    m = mesh.midpoints
    C = np.zeros((n, n + 1))
    idx = np.arange(n)
    if alpha == 0.0:
        # u(m_i) - u(0) with midpoint value from the two cell nodes
        C[idx, idx] += 0.5
        C[idx, idx + 1] += 0.5
        C[:, 0] -= 1.0
        return C
    if alpha == 1.0:
        C[idx, idx + 1] += 1.0 / dx
        C[idx, idx] -= 1.0 / dx
        return C
    diff = m[:, None] - x[None, :]
    P = np.where(diff > 0.0, np.abs(diff) ** (1.0 - alpha), 0.0)
    W = (P[:, :-1] - P[:, 1:]) * np.tri(n, n, k=-1)
    W /= gamma(2.0 - alpha) * dx
    C[:, 1:] += W
    C[:, :-1] -= W
    # half cell [x_i, m_i] carries the cell-i slope
    half = (0.5 * dx) ** (1.0 - alpha) / (gamma(2.0 - alpha) * dx)
    C[idx, idx + 1] += half
    C[idx, idx] -= half
    return C


def caputo_right_midpoint_matrix(mesh: Mesh1D, alpha: float) -> np.ndarray:
    """Right Caputo rows evaluated at cell midpoints; shape (n, n+1)."""
    _check_order_closed(alpha)
    n, dx, x = mesh.n, mesh.dx, mesh.nodes
    m = mesh.midpoints
    C = np.zeros((n, n + 1))
    idx = np.arange(n)
    if alpha == 0.0:
        C[idx, idx] += 0.5
        C[idx, idx + 1] += 0.5
        C[:, n] -= 1.0
        return C
    if alpha == 1.0:
        # leading minus of the right Caputo: minus the cell slope
        C[idx, idx + 1] -= 1.0 / dx
        C[idx, idx] += 1.0 / dx
        return C
    diff = x[None, :] - m[:, None]
    Q = np.where(diff > 0.0, np.abs(diff) ** (1.0 - alpha), 0.0)
    W = -(Q[:, 1:] - Q[:, :-1]) * (1.0 - np.tri(n, n, k=0))
    W /= gamma(2.0 - alpha) * dx
    C[:, 1:] += W
    C[:, :-1] -= W
    # half cell [m_i, x_{i+1}]; leading minus of the right Caputo
    half = (0.5 * dx) ** (1.0 - alpha) / (gamma(2.0 - alpha) * dx)
    C[idx, idx + 1] -= half
    C[idx, idx] += half
    return C


def riesz_stress_midpoint_matrix(mesh: Mesh1D, alpha: float) -> np.ndarray:
    return 0.5 * (
        caputo_left_midpoint_matrix(mesh, alpha) - caputo_right_midpoint_matrix(mesh, alpha)
    )


# -- Marchaud-type relative-displacement form ---------------------------------


def marchaud_riesz_matrix(mesh: Mesh1D, alpha: float) -> np.ndarray:
    """Rectangular-rule two-sided Marchaud operator in relative displacements.

    Row i evaluates

        (1 / 2 Gamma(1-a)) * [ (u_i - u_0) x_i^(-a) - (u_i - u_n) (L - x_i)^(-a)
            + a dx sum_{j<i} (u_i - u_j) (x_i - x_j)^(-1-a)
            - a dx sum_{j>i} (u_i - u_j) (x_j - x_i)^(-1-a) ]

    which is the form whose spatial derivative reproduces the lattice
    stiffness coefficients; it agrees with the Caputo stencil to O(dx) away
    from the order endpoints.
    """
    _check_order(alpha)
    n, dx, x = mesh.n, mesh.dx, mesh.nodes
    pref = 1.0 / (2.0 * gamma(1.0 - alpha))
    M = np.zeros((n + 1, n + 1))
    diff = x[:, None] - x[None, :]
    with np.errstate(divide="ignore"):
        kern = np.where(diff != 0.0, np.abs(diff) ** (-1.0 - alpha), 0.0)
    left = np.tril(kern, k=-1)  # j < i
    right = np.triu(kern, k=1)  # j > i
    M -= alpha * dx * left
    M += alpha * dx * right
    np.fill_diagonal(M, alpha * dx * (left.sum(axis=1) - right.sum(axis=1)))
    # end-difference terms; vanish identically at their own boundary node
    for i in range(n + 1):
        if i > 0:
            wl = x[i] ** (-alpha)
            M[i, i] += wl
            M[i, 0] -= wl
        if i < n:
            wr = (x[n] - x[i]) ** (-alpha)
            M[i, i] -= wr
            M[i, n] += wr
    return pref * M


# -- plain first derivative ----------------------------------------------------


def first_derivative_matrix(mesh: Mesh1D) -> np.ndarray:
    """Two-point central differences inside, one-sided second order at the ends."""
    n, dx = mesh.n, mesh.dx
    D = np.zeros((n + 1, n + 1))
    idx = np.arange(1, n)
    D[idx, idx + 1] = 0.5 / dx
    D[idx, idx - 1] = -0.5 / dx
    D[0, 0], D[0, 1], D[0, 2] = -1.5 / dx, 2.0 / dx, -0.5 / dx
    D[n, n], D[n, n - 1], D[n, n - 2] = 1.5 / dx, -2.0 / dx, 0.5 / dx
    return D
