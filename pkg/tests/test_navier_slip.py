import numpy as np
import pytest

from models.config import SolverOptions, WedgeConfig
from models.fields import AngularPolynomial, BoundaryData, Grid, ScalarField, VectorField
from solver import navier_slip
from solver.manufactured import StreamCase, polynomial_case
from solver.mellin import make_line
from utils.errors import AdmissibilityError


def test_sigma_orientation():
    assert tuple(navier_slip.SIGMA) == (-1.0, 1.0)


def test_zero_data_converges_immediately(wedge, grid):
    u, p, report = navier_slip.solve_regular(VectorField.zeros(grid), BoundaryData.zeros(grid), 0, wedge)
    assert report.status == "converged"
    assert report.iterations == 1 and report.history == [0.0]
    assert not np.any(u.stacked()) and not np.any(p.values)


def test_line_outside_interval(wedge, grid):
    case = StreamCase().on_grid(grid)
    # M = 2 schiebt γ = M + α + 1 = 2.95 über die Grenze 2.53
    with pytest.raises(AdmissibilityError):
        navier_slip.solve_regular(case.f, case.g_navier, 2, wedge)


@pytest.mark.slow
def test_manufactured_navier_solution(wedge, grid):
    case = StreamCase().on_grid(grid)
    u, p, report = navier_slip.solve_regular(case.f, case.g_navier, 0, wedge, SolverOptions(method="krylov"))
    assert report.status == "converged", report.notes
    assert report.history_monotone()
    err = np.max(np.abs(u.stacked() - case.u.stacked())) / np.max(np.abs(case.u.stacked()))
    assert err < 1e-2, f"Geschwindigkeitsfehler {err:.2e}"
    assert "p0" in report.constants


def test_picard_is_default_method():
    assert SolverOptions().method == "picard"
    assert SolverOptions().damping == 1.0


def test_picard_reports_status(wedge, grid):
    case = StreamCase().on_grid(grid)
    _, _, report = navier_slip.solve_regular(case.f, case.g_navier, 0, wedge, SolverOptions(max_iter=5))
    assert report.status in ("converged", "max_iter", "diverged")
    assert 1 <= len(report.history) <= 5
    # relative H¹-Änderung von u, nicht GMRES-Residuen
    assert all(h >= 0.0 for h in report.history if np.isfinite(h)), "Verlauf negativ"


def test_manufactured_navier_case_runs_through(wedge, grid):
    case = StreamCase().on_grid(grid)
    u, p, report = navier_slip.solve_regular(case.f, case.g_navier, 0, wedge, SolverOptions(method="krylov"))
    assert report.status in ("converged", "max_iter"), report.notes
    assert np.all(np.isfinite(u.stacked())) and np.all(np.isfinite(p.values)), "Lösung nicht endlich"
    assert "freeslip.freeslip" in report.estimate_ratios
    err = np.max(np.abs(u.stacked() - case.u.stacked())) / np.max(np.abs(case.u.stacked()))
    assert err < 5e-2, f"Geschwindigkeitsfehler {err:.2e}"


def test_edge_taper_vanishes_at_grid_ends(grid):
    taper = navier_slip.edge_taper(grid)
    assert taper[0] == 0.0 and taper[-1] == 0.0
    middle = np.abs(grid.s) < 0.5 * (grid.s[-1] - grid.s[0]) - 0.1 * (grid.s[-1] - grid.s[0])
    assert np.all(taper[middle] == 1.0), "Inneres nicht ungedämpft"
    assert np.all((taper >= 0.0) & (taper <= 1.0))


def test_slip_data_ignores_traces_at_grid_ends(grid):
    g = BoundaryData(grid, np.exp(-grid.s**2), np.exp(-grid.s**2))
    traces = np.ones((grid.s.size, 2))
    plain = navier_slip.slip_data(g)
    coupled = navier_slip.slip_data(g, traces)
    assert coupled.at_zero[0] == plain.at_zero[0] and coupled.at_theta[-1] == plain.at_theta[-1]
    mid = grid.s.size // 2
    assert coupled.at_zero[mid] == pytest.approx(plain.at_zero[mid] + grid.r[mid])


def test_trace_operator_matches_velocity_response(wedge, grid):
    line = make_line(grid, 0.95)
    operator = navier_slip.EdgeTraceOperator.build(grid, line, wedge.sin_tolerance)
    bump = np.exp(-((grid.s - 0.5) ** 2))
    traces = np.stack([bump, 0.5 * bump], axis=1)
    velocity = operator.velocity(traces, max_workers=1)
    applied = operator.apply(traces)
    scale = np.max(np.abs(applied))
    assert np.allclose(velocity.u_r[:, [0, -1]], applied, rtol=0.0, atol=1e-9 * scale), "Spur von U(t) weicht von Bt ab"
    assert np.max(np.abs(velocity.u_phi[:, [0, -1]])) <= 1e-9 * np.max(np.abs(velocity.stacked()))


def test_verify_zero_solution(grid):
    report = navier_slip.verify_solution(
        VectorField.zeros(grid), ScalarField.zeros(grid), VectorField.zeros(grid), BoundaryData.zeros(grid), -0.05, 0
    )
    for key in ("momentum_r", "momentum_phi", "divergence", "normal_velocity", "navier", "momentum"):
        assert report.residuals[key] == 0.0
    assert report.estimate_ratios == {"main": 0.0, "regular": 0.0}


def test_full_solver_without_polynomial(wedge, grid):
    _, _, report = navier_slip.solve_full(AngularPolynomial.zeros(grid, 0), VectorField.zeros(grid), 0, wedge)
    assert report.command == "solve"
    assert report.status == "converged"


@pytest.mark.slow
def test_full_solver_with_tip_polynomial(small_spec):
    config = WedgeConfig(theta=0.5, alpha=0.3, grid=small_spec)
    grid = Grid.from_spec(small_spec, config.theta)
    P_f, _, _ = polynomial_case(grid)
    u, p, report = navier_slip.solve_full(P_f, VectorField.zeros(grid), 1, config, options=SolverOptions(method="krylov"))
    assert report.status == "converged", report.notes
    assert report.constants["n"] == 2.0
    assert report.residuals["polynomial.divergence_2"] < 1e-2
    assert np.all(np.isfinite(u.stacked())) and np.all(np.isfinite(p.values))


def test_full_solver_rejects_low_degree(grid, wedge):
    # M = 0, α < 0: n = floor(0.95) = 0 < 2
    P_f, _, _ = polynomial_case(grid)
    with pytest.raises(AdmissibilityError):
        navier_slip.solve_full(P_f, VectorField.zeros(grid), 0, wedge)
