"""Lattice assembly and statics: closed-form springs, solves, forces, decay."""

import math

import numpy as np
import pytest

from dorod import mslm
from dorod import order_distributions as od
from dorod.fractional_ops import Mesh1D
from dorod.mslm import BoundaryCondition
from _oracles import (
    brute_force_total_stiffness,
    gauss_seidel_relaxation,
    lumped_body_forces,
    spring_constant,
)


@pytest.fixture(scope="module")
def mesh():
    return Mesh1D(1.0, 100)


# -- constant-order springs ------------------------------------------------------


def test_nearest_neighbour_hand_value(mesh):
    # alpha = 1/2, dx = 0.01, EA = 1: (EA dx / 2 Gamma(1/2)) (a(1+a)/(1-a)) dx^(-3/2)
    k = mslm.spring_stiffness_co(mesh, 1.0, 0.5, 10, 11)
    want = 0.01 / (2.0 * math.sqrt(math.pi)) * 1.5 * 0.01**-1.5
    assert k == pytest.approx(want, rel=1e-12)
    assert k == pytest.approx(4.2314, abs=5e-5)


def test_spring_symmetry_in_indices(mesh):
    for i, j in [(3, 9), (0, 5), (2, 100), (0, 100), (0, 1), (99, 100)]:
        a = mslm.spring_stiffness_co(mesh, 2.0, 0.4, i, j)
        b = mslm.spring_stiffness_co(mesh, 2.0, 0.4, j, i)
        assert a == b


def test_boundary_adjacent_spring_closed_form(mesh):
    # the two printed forms of the same stiffness coincide
    for alpha in (0.2, 0.5, 0.8):
        k = mslm.spring_stiffness_co(mesh, 1.0, alpha, 0, 1)
        dx = mesh.dx
        via_sum = (dx / (2.0 * math.gamma(1.0 - alpha))) * (
            alpha * dx ** -(1.0 + alpha)
            + alpha * (1.0 + alpha) / (1.0 - alpha) * dx ** -(1.0 + alpha)
        )
        simplified = (1.0 / math.gamma(1.0 - alpha)) * alpha / (1.0 - alpha) * dx**-alpha
        assert k == pytest.approx(simplified, rel=1e-12)
        assert k == pytest.approx(via_sum, rel=1e-12)


def test_spring_matches_scalar_oracle(mesh):
    for i, j in [(1, 2), (5, 50), (0, 30), (40, 100), (0, 100), (50, 51)]:
        got = mslm.spring_stiffness_co(mesh, 1.0, 0.6, i, j)
        want = spring_constant(0.6, i, j, mesh.n, mesh.dx, 1.0)
        assert got == pytest.approx(want, rel=1e-12)


def test_spring_domain_errors(mesh):
    with pytest.raises(ValueError):
        mslm.spring_stiffness_co(mesh, 1.0, 0.5, 4, 4)
    for bad in (0.0, 1.0, -0.2, 1.3):
        with pytest.raises(ValueError):
            mslm.spring_stiffness_co(mesh, 1.0, bad, 1, 2)


def test_all_springs_positive(mesh):
    model = mslm.assemble(mesh, 1.0, od.uniform())
    off = model.K[~np.eye(mesh.n + 1, dtype=bool)]
    assert np.all(off > 0.0)


# -- assembly -----------------------------------------------------------------------


def test_assembled_matrix_is_symmetric(mesh):
    model = mslm.assemble(mesh, 1.0, od.beta(2, 5))
    assert np.array_equal(model.K, model.K.T)


def test_rows_sum_to_zero_before_constraints(mesh):
    model = mslm.assemble(mesh, 1.0, od.truncnorm(0.9, 0.15))
    assert np.max(np.abs(model.K @ np.ones(mesh.n + 1))) < 1e-9 * np.max(np.abs(model.K))


def test_dirac_assembly_is_single_order(mesh):
    model = mslm.assemble(mesh, 1.0, od.dirac(0.7))
    for i, j in [(0, 1), (3, 9), (0, 100), (10, 90)]:
        assert model.K[i, j] == pytest.approx(
            mslm.spring_stiffness_co(mesh, 1.0, 0.7, i, j), rel=1e-12
        )


def test_near_unit_order_keeps_only_nearest_neighbours(mesh):
    model = mslm.assemble(mesh, 1.0, od.dirac(0.999))
    k_nn = model.K[50, 51]
    far = np.abs(
        model.K[np.triu_indices(mesh.n + 1, k=2)]
    )
    assert np.max(far) < 1e-3 * k_nn


def test_assembly_matches_brute_force_double_loop():
    mesh = Mesh1D(1.0, 4)
    dist = od.uniform(n_alpha=4)
    model = mslm.assemble(mesh, 1.0, dist)
    nodes, weights = dist.nodes, dist.weights
    K_ref = brute_force_total_stiffness(
        list(nodes), list(weights), [1.0] * len(nodes), dist.delta_alpha, 4, mesh.dx, 1.0
    )
    for i in range(5):
        for j in range(5):
            if i != j:
                assert model.K[i, j] == pytest.approx(K_ref[i][j], rel=1e-10)


def test_boundary_springs_stiffer_than_body_springs(mesh):
    model = mslm.assemble(mesh, 1.0, od.uniform())
    n = mesh.n
    # same separation, one pair anchored at the boundary
    for sep in (5, 20, 60):
        k_boundary = model.K[0, sep]
        k_body = model.K[20, 20 + sep]
        assert k_boundary > k_body
    # the boundary-to-boundary spring dwarfs any body pair of near-full span
    assert model.K[0, n] > model.K[1, n - 1]


# -- statics -----------------------------------------------------------------------


def test_local_limit_traction_solve_is_linear_profile(mesh):
    model = mslm.assemble(mesh, 1.0, od.dirac(mslm.LOCAL_REFERENCE_ALPHA))
    u = mslm.solve_static(model, BoundaryCondition.tbc(10.0))
    assert np.max(np.abs(u.values - 10.0 * mesh.nodes)) < 2e-2


def test_zero_load_dbc_zero_solution(mesh):
    model = mslm.assemble(mesh, 1.0, od.uniform())
    u = mslm.solve_static(model, BoundaryCondition.dbc(0.0))
    assert np.max(np.abs(u.values)) < 1e-12


def test_softening_under_traction(mesh):
    model = mslm.assemble(mesh, 1.0, od.beta(2, 5))
    u = mslm.solve_static(model, BoundaryCondition.tbc(10.0))
    assert u.values[-1] > 10.0  # beyond the local tip displacement


def test_global_equilibrium_with_reactions(mesh):
    model = mslm.assemble(mesh, 1.0, od.linear())
    bc = BoundaryCondition.tbc(10.0)
    load = lambda x: 5.0
    u = mslm.solve_static(model, bc, load)
    F = mslm.external_forces(model, bc, load)
    residual = model.K @ u.values + F
    # reaction at the fixed node balances everything else
    assert abs(np.sum(residual[1:])) < 1e-8 * np.linalg.norm(F)
    assert np.max(np.abs(residual[1:])) < 1e-8 * np.linalg.norm(F)


def test_solution_matches_relaxation_oracle_small_lattice():
    n = 6
    mesh = Mesh1D(1.0, n)
    dist = od.beta(2, 5, n_alpha=5)
    model = mslm.assemble(mesh, 1.0, dist)
    bc = BoundaryCondition.tbc(2.0)
    u = mslm.solve_static(model, bc, lambda x: 1.0)
    K_list = [[float(model.K[i, j]) if i != j else 0.0 for j in range(n + 1)] for i in range(n + 1)]
    forces = lumped_body_forces(1.0, n, mesh.dx)
    forces[n] += 2.0
    u_ref = gauss_seidel_relaxation(K_list, forces, fixed={0: 0.0})
    assert np.allclose(u.values, u_ref, rtol=1e-10, atol=1e-12)


def test_boundary_force_zero_for_rigid_motion(mesh):
    model = mslm.assemble(mesh, 1.0, od.uniform())
    u = np.full(mesh.n + 1, 0.3)
    assert mslm.boundary_force(model, u, "left") == pytest.approx(0.0, abs=1e-12)
    assert mslm.boundary_force(model, u, "right") == pytest.approx(0.0, abs=1e-12)


def test_boundary_force_balances_applied_traction(mesh):
    model = mslm.assemble(mesh, 1.0, od.truncnorm(0.9, 0.15))
    bc = BoundaryCondition.tbc(10.0)
    u = mslm.solve_static(model, bc)
    assert mslm.boundary_force(model, u, "right") == pytest.approx(-10.0, rel=1e-8)


def test_boundary_force_local_linear_field(mesh):
    eps = 0.25
    model = mslm.assemble(mesh, 1.0, od.dirac(mslm.LOCAL_REFERENCE_ALPHA))
    u = eps * mesh.nodes
    got = mslm.boundary_force(model, u, "left")
    assert got == pytest.approx(eps, rel=5e-3)  # EA * eps with EA = 1


def test_insufficient_constraints_detected(mesh):
    model = mslm.assemble(mesh, 1.0, od.uniform())
    # strip every constraint by solving the full singular system directly
    with pytest.raises((mslm.InsufficientConstraintsError, mslm.SolverError)):
        bad = mslm.LatticeModel(
            mesh=model.mesh,
            EA=model.EA,
            dist=model.dist,
            K=np.zeros_like(model.K),
            F_ext=np.zeros(mesh.n + 1),
        )
        mslm.solve_static(bad, BoundaryCondition.tbc(1.0))


# -- stiffness decay ------------------------------------------------------------------


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
def test_interior_decay_exponent(mesh, alpha):
    model = mslm.assemble(mesh, 1.0, od.dirac(alpha))
    mid = mesh.n // 2
    js = np.arange(mid + 2, mesh.n)
    slope = mslm.fit_power_slope(mesh.nodes[js] - mesh.nodes[mid], model.K[mid, js])
    assert abs(slope + (2.0 + alpha)) < 0.05


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
def test_boundary_decay_exponent(mesh, alpha):
    model = mslm.assemble(mesh, 1.0, od.dirac(alpha))
    js = np.arange(mesh.n // 2, mesh.n)
    slope = mslm.fit_power_slope(mesh.nodes[js], model.K[0, js])
    assert abs(slope + (1.0 + alpha)) < 0.1


def test_fit_power_slope_exact_power_law():
    r = np.linspace(0.1, 1.0, 30)
    assert mslm.fit_power_slope(r, 3.0 * r**-2.5) == pytest.approx(-2.5, abs=1e-10)
