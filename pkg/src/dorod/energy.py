"""Potential-energy densities, surface terms, and the equivalence chain.

Four definitions of the stored energy are computed and compared: the
continuum density (strain times nonlocal stress measure), the lattice
per-node spring energy, the continuum limit of the lattice density (which
isolates boundary/surface terms), and a span-distributed lattice density
with no boundary concentration.  Totals from all definitions must agree and
the integration-by-parts boundary decomposition must cancel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .donet import RodProblem, stress_operator
from .fractional_ops import DisplacementField, first_derivative_matrix
from .mslm import LatticeModel

__all__ = [
    "EnergyReport",
    "density_c1",
    "density_c2",
    "density_m",
    "density_m1",
    "totals",
]


@dataclass(frozen=True)
class EnergyReport:
    """Per-node energy measures and their totals.

    ``density_c1`` and ``density_c2`` are continuum densities [J/m];
    ``density_m`` and ``density_m1`` are per-node lattice energies [J].
    ``density_c2`` includes the boundary spikes (surface terms divided by
    the spacing) at the two end nodes so it overlays density_m / dx;
    ``boundary`` carries the raw surface terms (U_b(0), U_b(L)) themselves.
    The decomposition fields expose the integration-by-parts split of the
    continuum-limit total, whose end terms must cancel the surface ones.
    """

    x: np.ndarray = field(repr=False)
    density_c1: np.ndarray = field(repr=False)
    density_c2: np.ndarray = field(repr=False)
    density_m: np.ndarray = field(repr=False)
    density_m1: np.ndarray = field(repr=False)
    boundary: tuple[float, float]
    pi_c1: float
    pi_c2: float
    pi_m: float
    pi_m1: float
    pi_m_1: float
    pi_m_2: float
    pi_m_3: float

    @property
    def cancellation_residual(self) -> float:
        return self.pi_m_1 + self.pi_m_3

    def totals_dict(self) -> dict[str, float]:
        return {
            "Pi_C1": self.pi_c1,
            "Pi_C2": self.pi_c2,
            "Pi_M": self.pi_m,
            "Pi_M1": self.pi_m1,
        }


def _values(u) -> np.ndarray:
    return u.values if isinstance(u, DisplacementField) else np.asarray(u, dtype=float)


# -- continuum densities --------------------------------------------------------


def density_c1(problem: RodProblem, u) -> np.ndarray:
    """Continuum energy density: half EA times strain times stress measure."""
    mesh = problem.mesh
    vals = _values(u)
    D = first_derivative_matrix(mesh)
    frac = stress_operator(mesh, problem.dist, problem.E) @ vals / problem.E
    return 0.5 * problem.EA * (D @ vals) * frac


def _c2_parts(problem: RodProblem, u):
    mesh = problem.mesh
    vals = _values(u)
    D = first_derivative_matrix(mesh)
    S = stress_operator(mesh, problem.dist, problem.E)
    frac_u = S @ vals / problem.E
    frac_u2 = S @ (vals**2) / problem.E
    interior = problem.EA * (0.25 * (D @ frac_u2) - 0.5 * vals * (D @ frac_u))
    u_b0 = problem.EA * (0.25 * frac_u2[0] - 0.5 * vals[0] * frac_u[0])
    u_bL = problem.EA * (0.25 * frac_u2[-1] - 0.5 * vals[-1] * frac_u[-1])
    return interior, float(u_b0), float(u_bL)


def density_c2(problem: RodProblem, u) -> tuple[np.ndarray, float, float]:
    """Continuum limit of the lattice density plus the two surface terms.

    Returns (per-node density, U_b(0), U_b(L)).  The density at the end
    nodes carries +U_b(0)/dx and -U_b(L)/dx so that it compares directly
    with the per-node lattice energy divided by the spacing; the surface
    terms themselves are returned unscaled.
    """
    interior, u_b0, u_bL = _c2_parts(problem, u)
    dens = interior.copy()
    dens[0] += u_b0 / problem.mesh.dx
    dens[-1] -= u_bL / problem.mesh.dx
    return dens, u_b0, u_bL


# -- lattice densities -------------------------------------------------------------


def density_m(model: LatticeModel, u) -> np.ndarray:
    """Per-node spring energy: half of each spring's energy at each endpoint."""
    vals = _values(u)
    koff = model.K - np.diag(np.diag(model.K))
    rel = vals[None, :] - vals[:, None]
    return 0.25 * np.sum(koff * rel**2, axis=1)


def density_m1(model: LatticeModel, u) -> np.ndarray:
    """Span-distributed spring energy: no boundary concentration.

    Each spring's energy k (u_p - u_q)^2 / 2 is spread over every node of
    its span [p, q] with trapezoid-style weights (half at the span ends),
    normalized by the span length so the weights sum to one and the total
    equals the plain spring total exactly.
    """
    vals = _values(u)
    n = model.mesh.n
    out = np.zeros(n + 1)
    K = model.K
    for p in range(n + 1):
        for q in range(p + 1, n + 1):
            e_spring = 0.5 * K[p, q] * (vals[p] - vals[q]) ** 2
            if e_spring == 0.0:
                continue
            span = q - p
            share = e_spring / span
            out[p] += 0.5 * share
            out[q] += 0.5 * share
            if span > 1:
                out[p + 1 : q] += share
    return out


# -- totals ----------------------------------------------------------------------


def totals(problem: RodProblem, model: LatticeModel, u_donet, u_mslm) -> EnergyReport:
    """All four energy totals plus the boundary-cancellation decomposition.

    Continuum measures use the continuum displacement field, lattice
    measures the lattice one.  Spatial integrals are trapezoidal; the
    surface terms enter the continuum-limit total outside the integral.
    The decomposition evaluates its end-point and surface parts through
    separate expressions, so their cancellation is a numerical check.
    """
    mesh = problem.mesh
    x = mesh.nodes
    uc = _values(u_donet)
    um = _values(u_mslm)

    dens_c1 = density_c1(problem, uc)
    pi_c1 = float(np.trapezoid(dens_c1, x))

    interior_c2, u_b0, u_bL = _c2_parts(problem, uc)
    dens_c2 = interior_c2.copy()
    dens_c2[0] += u_b0 / mesh.dx
    dens_c2[-1] -= u_bL / mesh.dx
    pi_c2 = float(np.trapezoid(interior_c2, x)) + u_b0 - u_bL

    dens_m = density_m(model, um)
    pi_m = float(np.sum(dens_m))
    dens_m1 = density_m1(model, um)
    pi_m1 = float(np.sum(dens_m1))

    # integration-by-parts split of the continuum-limit total
    D = first_derivative_matrix(mesh)
    S = stress_operator(mesh, problem.dist, problem.E)
    frac_u = S @ uc / problem.E
    frac_u2 = S @ (uc**2) / problem.E
    end_expr = problem.EA * (0.25 * frac_u2 - 0.5 * uc * frac_u)
    pi_m_1 = float(end_expr[-1] - end_expr[0])
    pi_m_2 = float(np.trapezoid(0.5 * problem.EA * (D @ uc) * frac_u, x))
    pi_m_3 = u_b0 - u_bL

    return EnergyReport(
        x=x.copy(),
        density_c1=dens_c1,
        density_c2=dens_c2,
        density_m=dens_m,
        density_m1=dens_m1,
        boundary=(u_b0, u_bL),
        pi_c1=pi_c1,
        pi_c2=pi_c2,
        pi_m=pi_m,
        pi_m1=pi_m1,
        pi_m_1=pi_m_1,
        pi_m_2=pi_m_2,
        pi_m_3=pi_m_3,
    )
