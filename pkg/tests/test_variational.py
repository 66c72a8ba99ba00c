import math

import numpy as np
import pytest

from models.config import VariationalConfig
from models.fields import BoundaryData, ScalarField, VectorField
from solver import variational
from solver.helmholtz import PRECONDITION_TOLERANCE
from solver.polar_core import check_solenoidal_tangent, divergence

SMALL = VariationalConfig(test_modes=2)


def test_random_admissible_is_seeded(grid):
    a = variational.random_admissible(grid, np.random.default_rng(3), SMALL)
    b = variational.random_admissible(grid, np.random.default_rng(3), SMALL)
    assert np.array_equal(a.stacked(), b.stacked())


def test_bump_field_is_tangential(grid):
    u = variational.bump_field(grid, 1, 0.0, 1.2)
    assert not np.any(u.u_phi[:, [0, -1]])
    # Stern der Breite 2 in s verbreitert den Träger um zwei Knoten
    assert not np.any(u.stacked()[:, np.abs(grid.s) > 0.9 + 2.0 * grid.ds + 1e-9]), "Träger der Glocke"


def test_bump_basis_is_discretely_solenoidal(grid):
    for u in variational.bump_basis(grid, VariationalConfig(test_modes=3)):
        div = divergence(u).values * grid.r_col
        assert np.max(np.abs(div)) < 1e-9 * np.max(np.abs(u.stacked())), "Diskrete Divergenz der Testfelder"
        check_solenoidal_tangent(u, PRECONDITION_TOLERANCE)


def test_zero_field_pairs_to_zero(grid):
    u = variational.bump_field(grid, 1, 0.0, 1.2)
    assert variational.bilinear("B_total", VectorField.zeros(grid), u, -0.05) == 0.0
    assert variational.boundedness_ratio(VectorField.zeros(grid), u, -0.05) == 0.0
    assert math.isinf(variational.coercivity_ratio(VectorField.zeros(grid), -0.05))


def test_boundedness_on_diagonal(grid, wedge):
    u = variational.random_admissible(grid, np.random.default_rng(1), SMALL)
    coercive = variational.coercivity_ratio(u, wedge.alpha, wedge, SMALL)
    bounded = variational.boundedness_ratio(u, u, wedge.alpha, wedge, SMALL)
    assert bounded == pytest.approx(abs(coercive), rel=1e-12)


def test_coercivity_audit(grid, wedge):
    audit = variational.coercivity_audit(grid, wedge.alpha, 3, wedge, SMALL, seed=2, max_workers=1)
    row = audit.row()
    assert len(audit.coercivity) == 3
    assert audit.coercivity_constant > 0.0, "B muss auf zulässigen Feldern positiv sein"
    assert math.isfinite(audit.boundedness_constant)
    assert {"alpha", "theta"} <= set(row)


def test_audit_is_reproducible(grid, wedge):
    first = variational.coercivity_audit(grid, wedge.alpha, 2, wedge, SMALL, seed=5, max_workers=1)
    second = variational.coercivity_audit(grid, wedge.alpha, 2, wedge, SMALL, seed=5, max_workers=2)
    assert first.coercivity == second.coercivity


def test_zero_dual_problem(grid, wedge):
    v, p = variational.solve_test_function_problem(VectorField.zeros(grid), wedge.alpha, wedge, SMALL)
    assert not np.any(v.stacked()) and not np.any(p.values)


def test_dual_problem_vanishes_on_edges(grid, wedge):
    w = variational.bump_field(grid, 1, 0.0, 1.2)
    v, p = variational.solve_test_function_problem(w, wedge.alpha, wedge, SMALL)
    checks = variational.dual_problem_residual(v, p, w, wedge.alpha, SMALL.c3)
    assert checks["edge"] < 1e-6
    assert set(checks) == {"momentum", "divergence", "edge"}


def test_pressure_of_zero_source(grid):
    p = variational.pressure_recover(VectorField.zeros(grid), VectorField.zeros(grid))
    assert isinstance(p, ScalarField)
    assert not np.any(p.values)


def test_zero_boundary_data_pairs_to_zero(grid):
    v = variational.bump_field(grid, 1, 0.0, 1.2)
    assert variational.pairing_g(BoundaryData.zeros(grid), v, 0.3) == 0.0


def test_variational_residual_of_zero_problem(grid):
    zero = VectorField.zeros(grid)
    g = BoundaryData.zeros(grid)
    assert variational.variational_residual(zero, zero, g, [], 0.3, variational=SMALL) == 0.0
    samples = variational.bump_basis(grid, SMALL)[:2]
    rows = variational.variational_residuals(zero, zero, g, samples, 0.3, variational=SMALL)
    assert len(rows) == 2
    assert all(row["residual"] == 0.0 for row in rows)
