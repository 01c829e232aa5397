"""Shared fixtures: the eight published strength functions and cached runs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pytest

from dorod import donet, energy, mslm
from dorod import order_distributions as od
from dorod.fractional_ops import Mesh1D
from dorod.mslm import BoundaryCondition

CASE1_DISTS = {
    "uniform": od.uniform,
    "linear": od.linear,
    "beta": lambda n_alpha=100: od.beta(2, 5, n_alpha),
    "truncnorm": lambda n_alpha=100: od.truncnorm(0.9, 0.15, n_alpha),
}
CASE2_DISTS = {
    "uniform": od.uniform,
    "scale05": lambda n_alpha=100: od.truncnorm(0.7, 0.5, n_alpha),
    "scale025": lambda n_alpha=100: od.truncnorm(0.7, 0.25, n_alpha),
    "dirac": lambda n_alpha=100: od.dirac(0.7, n_alpha),
}

DBC_VALUE = 1.0
TBC_VALUE = 10.0
BODY_LOAD_CASE2 = 5.0


@dataclass
class PaperRun:
    """One distribution x test-case x boundary-condition solve pair."""

    case: str
    dist_name: str
    bc_kind: str
    problem: donet.RodProblem
    model: mslm.LatticeModel
    u_donet: np.ndarray
    u_mslm: np.ndarray
    report: energy.EnergyReport

    @property
    def discrepancy(self) -> float:
        scale = max(np.max(np.abs(self.u_donet)), np.max(np.abs(self.u_mslm)))
        return float(np.max(np.abs(self.u_donet - self.u_mslm)) / scale)


def _build_run(case: str, dist_name: str, bc_kind: str, n: int = 100) -> PaperRun:
    dist = (CASE1_DISTS if case == "case1" else CASE2_DISTS)[dist_name]()
    load = None if case == "case1" else (lambda x: BODY_LOAD_CASE2)
    bc = (
        BoundaryCondition.dbc(DBC_VALUE) if bc_kind == "dbc" else BoundaryCondition.tbc(TBC_VALUE)
    )
    problem = donet.RodProblem(L=1.0, E=1.0, A=1.0, n=n, dist=dist, bc=bc, body_load=load)
    model = mslm.assemble(problem.mesh, problem.EA, dist)
    u_c = donet.solve_static(problem)
    u_m = mslm.solve_static(model, bc, load)
    report = energy.totals(problem, model, u_c, u_m)
    return PaperRun(case, dist_name, bc_kind, problem, model, u_c.values, u_m.values, report)


@pytest.fixture(scope="session")
def paper_runs() -> dict[tuple[str, str, str], PaperRun]:
    """All 16 published-configuration runs, solved once per session."""
    runs = {}
    for case, dists in (("case1", CASE1_DISTS), ("case2", CASE2_DISTS)):
        for dist_name in dists:
            for bc_kind in ("dbc", "tbc"):
                runs[(case, dist_name, bc_kind)] = _build_run(case, dist_name, bc_kind)
    return runs


@pytest.fixture(scope="session")
def mesh100() -> Mesh1D:
    return Mesh1D(1.0, 100)


@pytest.fixture(scope="session")
def local_runs() -> dict[str, PaperRun]:
    """Local-reference (near-unit order atom) runs under both conditions."""
    out = {}
    dist = od.dirac(mslm.LOCAL_REFERENCE_ALPHA)
    for bc_kind in ("dbc", "tbc"):
        bc = (
            BoundaryCondition.dbc(DBC_VALUE)
            if bc_kind == "dbc"
            else BoundaryCondition.tbc(TBC_VALUE)
        )
        problem = donet.RodProblem(L=1.0, E=1.0, A=1.0, n=100, dist=dist, bc=bc)
        model = mslm.assemble(problem.mesh, problem.EA, dist)
        u_c = donet.solve_static(problem)
        u_m = mslm.solve_static(model, bc, None)
        report = energy.totals(problem, model, u_c, u_m)
        out[bc_kind] = PaperRun("local", "dirac_local", bc_kind, problem, model, u_c.values, u_m.values, report)
    return out
