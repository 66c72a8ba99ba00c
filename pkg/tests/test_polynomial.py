import numpy as np
import pytest

from models.config import WedgeConfig
from models.fields import AngularPolynomial, VectorField
from solver import polynomial
from solver.manufactured import polynomial_case
from solver.polar_core import ZETA
from utils.errors import AdmissibilityError, ConfigError, ConsistencyError, DecayError


def test_degree_bound(wedge):
    assert polynomial.degree_bound(wedge) == pytest.approx(0.9 * np.pi / 0.8 - 1.0)


def test_fourier_hierarchy_reproduces_case(wedge, grid):
    P_f, P_u_ref, P_p_ref = polynomial_case(grid)
    stages = {}
    P_u, P_p = polynomial.solve_polynomial_problem(P_f, 2, wedge, grid, report=stages)
    assert P_u.degree == 2 and P_p.degree == 1
    assert np.allclose(P_u.coefficient(2), P_u_ref.coefficient(2), atol=1e-6)
    assert np.allclose(P_p.coefficient(1), P_p_ref.coefficient(1), atol=1e-6)
    assert not np.any(P_p.coefficient(0)), "p⁽⁰⁾ bleibt null"
    assert stages["pressure_constant_2"] < 1e-6
    assert "divergence_2" in stages


def test_green_hierarchy_agrees(wedge, grid):
    P_f, P_u_ref, P_p_ref = polynomial_case(grid)
    P_u, P_p = polynomial.solve_polynomial_problem(P_f, 2, wedge, grid, representation="green")
    scale = float(np.max(np.abs(P_u_ref.coefficient(2))))
    assert np.max(np.abs(P_u.coefficient(2) - P_u_ref.coefficient(2))) < 1e-3 * scale
    assert np.max(np.abs(P_p.coefficient(1) - P_p_ref.coefficient(1))) < 1e-2


def test_zero_forcing_gives_zero(wedge, grid):
    P_u, P_p = polynomial.solve_polynomial_problem(AngularPolynomial.zeros(grid, 0), 2, wedge, grid)
    assert P_u.is_zero() and P_p.is_zero()


def test_degree_gates(wedge, grid):
    P_f, _, _ = polynomial_case(grid)
    with pytest.raises(AdmissibilityError):
        polynomial.solve_polynomial_problem(P_f, 3, wedge, grid)
    with pytest.raises(AdmissibilityError):
        polynomial.solve_polynomial_problem(AngularPolynomial.zeros(grid, 1), 2, wedge, grid)
    with pytest.raises(ConsistencyError):
        polynomial.solve_polynomial_problem(AngularPolynomial.zeros(grid, 0, vector=False), 2, wedge, grid)


def test_stream_function_of_case(grid):
    _, P_u, _ = polynomial_case(grid)
    P_psi = polynomial.stream_from_velocity_poly(P_u)
    assert P_psi.degree == 3
    kappa = np.pi / grid.theta
    assert np.allclose(P_psi.coefficient(3), np.sin(kappa * grid.phi) / 3.0, atol=1e-5)
    assert polynomial.divergence_defect(P_u) < 1e-5


def test_stream_function_rejects_compressible(grid):
    coeffs = np.zeros((3, 2, grid.phi.size))
    coeffs[2, 0] = np.cos(grid.phi)
    with pytest.raises(ConsistencyError):
        polynomial.stream_from_velocity_poly(AngularPolynomial(grid.theta, grid.phi, coeffs))


def test_localized_velocity_matches_near_tip(grid):
    _, P_u, _ = polynomial_case(grid)
    Q_u = polynomial.localize_velocity(P_u, grid)
    tip = grid.r <= 1.0
    poly = P_u.evaluate(grid)
    assert np.allclose(Q_u.u_r[tip], poly[0][tip], atol=1e-12)
    assert np.allclose(Q_u.u_phi[tip], poly[1][tip], atol=1e-12)
    assert not np.any(Q_u.stacked()[:, grid.r >= 2.0]), "jenseits r = 2 verschwindet der Anteil"


def test_decomposition_reconstructs_tip(grid):
    P_f, _, _ = polynomial_case(grid)
    f1 = VectorField(grid, np.exp(-grid.s**2)[:, None] * np.ones(grid.shape), np.zeros(grid.shape))
    total = polynomial.TipDecomposition(P_f, f1, ZETA, 0).reconstruct()
    tip = grid.r <= 1.0
    expected = P_f.evaluate(grid)[0] + f1.u_r
    assert np.allclose(total.u_r[tip], expected[tip])


def test_taylor_split_accepts_decaying_part(wedge, grid):
    P_f, _, _ = polynomial_case(grid)
    f1 = VectorField(grid, np.exp(-grid.s**2)[:, None] * np.ones(grid.shape), np.zeros(grid.shape))
    split = polynomial.taylor_split(P_f, f1, 2, wedge.alpha)
    assert split.n == 2


def test_taylor_split_rejects_growth_at_tip(wedge, grid):
    P_f, _, _ = polynomial_case(grid)
    growing = VectorField(grid, np.exp(-3.0 * grid.s)[:, None] * np.ones(grid.shape), np.zeros(grid.shape))
    with pytest.raises(DecayError):
        polynomial.taylor_split(P_f, growing, 2, wedge.alpha)
    with pytest.raises(AdmissibilityError):
        polynomial.taylor_split(AngularPolynomial.zeros(grid, 3), growing, 2, wedge.alpha)


def test_fit_requires_opt_in(grid):
    with pytest.raises(ConfigError):
        polynomial.fit_tip_coefficients(VectorField.zeros(grid), 1)


def test_fit_recovers_low_degree(grid):
    coeffs = np.zeros((2, 2, grid.phi.size))
    coeffs[1, 0] = np.cos(grid.phi)
    exact = AngularPolynomial(grid.theta, grid.phi, coeffs).evaluate(grid)
    fitted = polynomial.fit_tip_coefficients(VectorField(grid, exact[0], exact[1]), 1, allow_fit=True)
    assert np.allclose(fitted.coefficients, coeffs, atol=1e-8)


def test_wider_wedge_allows_higher_degree():
    narrow = WedgeConfig(theta=0.5, alpha=0.3)
    assert polynomial.degree_bound(narrow) > 4.0


def test_localization_remainders_of_zero(grid):
    Q_f, Q_g = polynomial.localization_remainders(
        AngularPolynomial.zeros(grid, 2), AngularPolynomial.zeros(grid, 1, vector=False), AngularPolynomial.zeros(grid, 3, vector=False), grid
    )
    assert not np.any(Q_f.stacked())
    assert not np.any(Q_g.at_zero) and not np.any(Q_g.at_theta)


def test_localization_remainders_live_on_cutoff_annulus(grid):
    _, P_u, P_p = polynomial_case(grid)
    P_psi = polynomial.stream_from_velocity_poly(P_u)
    Q_f, Q_g = polynomial.localization_remainders(P_u, P_p, P_psi, grid)
    outside = (grid.r < 1.0) | (grid.r > 2.0)
    assert not np.any(Q_f.stacked()[:, outside]), "Q_f außerhalb von 1 ≤ r ≤ 2"
    assert np.any(Q_f.stacked()[:, ~outside])
    inner = grid.r <= 1.0
    expected = grid.r[inner] ** 2 * P_u.coefficient(2)[0][0]
    assert np.allclose(Q_g.at_zero[inner], expected)
    assert not np.any(Q_g.at_theta[grid.r >= 2.0])
