import math

import numpy as np
import pytest

from models.config import WedgeConfig
from models.fields import BoundaryData, VectorField
from solver import freeslip
from solver.manufactured import StreamCase
from utils.errors import AdmissibilityError, FieldArityError, ResonanceError, TruncationError

THETA = 0.8
LAM = 0.3 + 1.5j


def test_green_function_is_symmetric():
    assert freeslip.green_eval(LAM, 0.6, 0.2, theta=THETA) == freeslip.green_eval(LAM, 0.2, 0.6, theta=THETA)
    assert freeslip.green_eval(LAM, 0.0, 0.3, theta=THETA) == 0.0


def test_green_prime_matches_difference_quotient():
    h = 1e-5
    numeric = (freeslip.green_eval(LAM, 0.6, 0.2 + h, theta=THETA) - freeslip.green_eval(LAM, 0.6, 0.2 - h, theta=THETA)) / (2.0 * h)
    exact = freeslip.green_eval(LAM, 0.6, 0.2, "d_prime", theta=THETA)
    assert abs(numeric - exact) <= 1e-6 * max(abs(exact), 1.0)


def test_cauchy_mean_near_removable_point():
    lam = 0.03 + 0.01j
    cauchy = freeslip.green_eval(lam, 0.5, 0.3, theta=THETA)
    closed = freeslip._green_closed(lam, THETA, 0.5, 0.3, "none")
    assert abs(cauchy - closed) <= 1e-8 * max(abs(closed), 1.0)
    assert np.isfinite(freeslip.green_eval(0.0, 0.5, 0.3, theta=THETA))


def test_green_rejects_bad_input():
    with pytest.raises(ResonanceError):
        freeslip.green_eval(1.0 + math.pi / THETA, 0.5, 0.3, theta=THETA)
    with pytest.raises(FieldArityError):
        freeslip.green_eval(LAM, 0.9, 0.3, theta=THETA)
    with pytest.raises(FieldArityError):
        freeslip.green_eval(LAM, 0.5, 0.3, "d_triple", theta=THETA)


def _sources(grid):
    k = math.pi / grid.theta
    F_r = np.cos(k * grid.phi)[None, :].astype(complex)
    F_phi = np.sin(k * grid.phi)[None, :].astype(complex)
    return F_r, F_phi


def test_pressure_at_one_is_resonant(grid):
    F_r, F_phi = _sources(grid)
    with pytest.raises(ResonanceError):
        freeslip.solve_mode(1.0, F_r, F_phi, (0.0, 0.0), grid)
    with pytest.raises(FieldArityError):
        freeslip.solve_mode([LAM, LAM + 1.0], F_r, F_phi, (0.0, 0.0), grid)


@pytest.mark.parametrize("edges", [(0.0, 0.0), (0.2, -0.1)])
def test_green_and_fourier_modes_agree(grid, edges):
    F_r, F_phi = _sources(grid)
    green = freeslip.solve_mode(LAM, F_r, F_phi, edges, grid)
    series = freeslip.solve_mode_fourier(LAM, F_r, F_phi, grid, edges)
    scale = float(np.max(np.abs(green.u_phi)))
    assert np.max(np.abs(green.u_phi - series.u_phi)) < 1e-4 * scale
    assert np.max(np.abs(green.u_r - series.u_r)) < 1e-4 * float(np.max(np.abs(green.u_r)))
    assert green.boundary_defect(np.array([edges[0]]), np.array([edges[1]]))["edge_u_phi"] < 1e-12
    assert green.divergence_defect() < 1e-2


def test_fourier_line_bound(grid):
    F_r, F_phi = _sources(grid)
    with pytest.raises(AdmissibilityError):
        freeslip.solve_mode_fourier(3.0 + 0.5j, F_r, F_phi, grid)


def test_edge_response_shape(grid):
    response = freeslip.edge_response(np.array([LAM, np.conj(LAM)]), grid)
    assert response.shape == (2, 2, 2)
    assert np.allclose(response[1], np.conj(response[0]))


def test_zero_data_gives_zero(wedge, grid):
    u, p, p0, report = freeslip.freeslip_solve(VectorField.zeros(grid), BoundaryData.zeros(grid), 0, wedge)
    assert not np.any(u.stacked()) and not np.any(p.values)
    assert p0 == 0.0 and report.status == "ok"


def test_manufactured_stream_solution(wedge, grid):
    case = StreamCase(pressure_amplitude=0.5).on_grid(grid)
    u, p, p0, report = freeslip.freeslip_solve(case.f, case.g_frak, 0, wedge)
    u_err = np.max(np.abs(u.stacked() - case.u.stacked())) / np.max(np.abs(case.u.stacked()))
    p_err = np.max(np.abs(p.values - case.p.values)) / np.max(np.abs(case.p.values))
    assert u_err < 1e-3, f"Geschwindigkeitsfehler {u_err:.2e}"
    assert p_err < 1e-2, f"Druckfehler {p_err:.2e}"
    assert p0 == 0.0
    assert report.truncation["re_lambda"] == pytest.approx(0.95)


def test_grid_angle_must_match_config(grid, small_spec):
    other = WedgeConfig(theta=0.7, alpha=-0.05, grid=small_spec)
    with pytest.raises(AdmissibilityError):
        freeslip.freeslip_solve(VectorField.zeros(grid), BoundaryData.zeros(grid), 0, other)

def test_rough_slip_data_trips_truncation_check(wedge, grid):
    # Sprung bei s = 0: Spektrum fällt nur wie 1/t
    edge = np.exp(-grid.s**2) * (grid.s > 0.0)
    g_frak = BoundaryData(grid, edge, -edge)
    with pytest.raises(TruncationError):
        freeslip.freeslip_solve(VectorField.zeros(grid), g_frak, 0, wedge)
    u, _, _, report = freeslip.freeslip_solve(VectorField.zeros(grid), g_frak, 0, wedge, check_truncation=False)
    assert report.truncation["signal_slip"] > wedge.truncation_floor
    assert np.all(np.isfinite(u.stacked()))


def test_estimate_ratio_reports_nan_for_undecayed_slip(wedge, grid):
    case = StreamCase(pressure_amplitude=0.5).on_grid(grid)
    u, p, _, _ = freeslip.freeslip_solve(case.f, case.g_frak, 0, wedge)
    flat = BoundaryData(grid, np.ones(grid.s.size), np.ones(grid.s.size))
    assert math.isnan(freeslip.estimate_ratio(u, p, case.f, flat, 0, wedge.alpha))
    assert math.isfinite(freeslip.estimate_ratio(u, p, case.f, flat, 0, wedge.alpha, strict_decay=False))
