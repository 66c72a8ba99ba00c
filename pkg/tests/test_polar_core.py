import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from models.fields import Grid, ScalarField, VectorField
from solver import polar_core
from solver.manufactured import StreamCase
from utils.errors import AdmissibilityError, ConsistencyError, FieldArityError

FINE = Grid(theta=1.0, s=np.linspace(-1.0, 1.0, 201), phi=np.linspace(0.0, 1.0, 101))
RADIAL = Grid(theta=0.8, s=np.linspace(-8.0, 8.0, 128), phi=np.linspace(0.0, 0.8, 33))
INNER = (slice(2, -2), slice(2, -2))


def _scalar(values) -> ScalarField:
    return ScalarField(FINE, values)


def test_gradient_of_linear_function():
    p = _scalar(FINE.r_col * np.cos(FINE.phi_row))
    grad = polar_core.polar_operator("gradient", p)
    assert np.allclose(grad.u_r[INNER], np.cos(FINE.phi_row)[:, 2:-2], atol=1e-6)
    assert np.allclose(grad.u_phi[INNER], -np.sin(FINE.phi_row)[:, 2:-2], atol=1e-6)


def test_laplacian_of_harmonic_function():
    p = _scalar(FINE.r_col**2 * np.cos(2.0 * FINE.phi_row))
    lap = polar_core.laplacian_scalar(p)
    assert np.max(np.abs(lap.values[INNER])) < 1e-5, "r²cos2φ ist harmonisch"


def test_divergence_of_radial_field():
    # u = r⁻¹e_r ist divergenzfrei
    u = VectorField(FINE, np.ones(FINE.shape) / FINE.r_col, np.zeros(FINE.shape))
    assert np.max(np.abs(polar_core.divergence(u).values[INNER])) < 1e-6


def test_operator_arity_is_checked():
    p = _scalar(np.ones(FINE.shape))
    with pytest.raises(FieldArityError):
        polar_core.polar_operator("divergence", p)
    with pytest.raises(FieldArityError):
        polar_core.polar_operator("rotor", p)


def test_integrate_domain_weights():
    # ∫∫ e^{0·s} 1 ds dφ = 2·1
    assert math.isclose(polar_core.integrate_domain(np.ones(FINE.shape), FINE, 0.0), 2.0, rel_tol=1e-12)


def test_degenerate_weight_rejected():
    u = VectorField.zeros(FINE)
    with pytest.raises(AdmissibilityError):
        polar_core.seminorm_sq(u, 1, 0.0)


def test_cutoff_shape():
    zeta = polar_core.ZETA
    assert zeta(0.5) == 1.0 and zeta(2.5) == 0.0
    r = np.linspace(1.0, 2.0, 201)
    assert np.all(np.diff(zeta(r)) <= 1e-15), "ζ muss monoton fallen"
    assert zeta.bump(0.1) == 1.0 and zeta.bump(0.8) == 0.0
    assert np.allclose(zeta.dilated(np.array([1.0, math.exp(5.0)]), 2.0), [1.0, 0.0])


def test_smooth_step_derivative_matches_difference():
    x = np.linspace(0.05, 0.95, 1801)
    numeric = np.gradient(polar_core.smooth_step(x), x)
    assert np.allclose(numeric[2:-2], polar_core.smooth_step(x, 1)[2:-2], atol=1e-3)
    with pytest.raises(ValueError):
        polar_core.smooth_step(x, 4)


def test_cutoff_density_defect_decreases(grid):
    u = VectorField(grid, np.exp(-grid.s**2)[:, None] * np.cos(grid.phi_row), np.zeros(grid.shape))
    defects = polar_core.cutoff_density_defect(u, 1, -0.05, [1.0, 2.0, 4.0])
    assert defects[0] > defects[1] > defects[2] >= 0.0


@settings(max_examples=25, deadline=None)
@given(
    center=st.floats(-2.0, 2.0),
    width=st.floats(0.5, 1.5),
    alpha=st.sampled_from([-0.6, -0.2, 0.15, 0.4]),
)
def test_hardy_ratio_never_exceeds_one(center, width, alpha):
    profile = np.exp(-(((RADIAL.s - center) / width) ** 2))
    ratio = polar_core.inequality_audit("hardy", profile, alpha, grid=RADIAL)
    assert 0.0 < ratio <= 1.0 + 1e-12


def test_hardy_ratio_flags_profile_without_decay():
    # w = r^α u steigt bis zum Gitterende auf ≈ 1, der Randterm α[w²] kippt die Ungleichung
    alpha = 0.4
    w = 0.5 * (1.0 + np.tanh(RADIAL.s / 4.0))
    ratio = polar_core.hardy_ratio(np.exp(-alpha * RADIAL.s) * w, RADIAL, alpha)
    assert ratio > 1.1, f"Quotient {ratio:.3f} sollte über 1 liegen"


def test_hardy_ratio_matches_closed_form_for_gaussian():
    # u = e^{−s²}, α = 0.5: ∫4s²e^{s−2s²} = 4(1/16 + 1/4)∫e^{s−2s²}, Quotient 0.2
    grid = Grid(theta=0.8, s=np.linspace(-8.0, 8.0, 801), phi=np.linspace(0.0, 0.8, 5))
    ratio = polar_core.hardy_ratio(np.exp(-grid.s**2), grid, 0.5)
    assert ratio == pytest.approx(0.2, rel=1e-6)


def test_hardy_rejects_profile_of_wrong_length():
    with pytest.raises(FieldArityError):
        polar_core.hardy_ratio(np.ones(RADIAL.s.size - 1), RADIAL, 0.3)


def test_hardy_needs_grid_and_nonzero_alpha(grid):
    with pytest.raises(FieldArityError):
        polar_core.inequality_audit("hardy", np.ones(grid.s.size), 0.3)
    with pytest.raises(AdmissibilityError):
        polar_core.hardy_ratio(np.exp(-grid.s**2), grid, 0.0)


def test_poincare_sharp_for_first_mode(grid):
    theta = grid.theta
    assert math.isclose(polar_core.poincare_ratio(np.sin(math.pi * grid.phi / theta), theta), 1.0, abs_tol=1e-10)
    assert math.isclose(polar_core.poincare_ratio(np.cos(math.pi * grid.phi / theta), theta), 1.0, abs_tol=1e-10)
    assert math.isclose(polar_core.poincare_ratio(np.sin(2.0 * math.pi * grid.phi / theta), theta), 0.25, abs_tol=1e-10)


def test_poincare_rejects_mean(grid):
    with pytest.raises(ConsistencyError):
        polar_core.poincare_ratio(1.0 + np.cos(math.pi * grid.phi / grid.theta), grid.theta)


def test_improved_hardy_on_stream_field():
    fine = Grid(theta=0.8, s=np.linspace(-6.0, 6.0, 481), phi=np.linspace(0.0, 0.8, 81))
    u = StreamCase().on_grid(fine).u
    constant = polar_core.improved_hardy_ratio(u, -0.05)
    assert constant == pytest.approx(polar_core.improved_hardy_constant(u, -0.05))
    assert constant > 0.0
    assert polar_core.improved_hardy_ratio(u, -0.05, c0=2.0 * constant) == pytest.approx(0.5)


def test_improved_hardy_rejects_compressible_field(grid):
    u = VectorField(grid, np.exp(-grid.s**2)[:, None] * np.ones(grid.shape), np.zeros(grid.shape))
    with pytest.raises(ConsistencyError):
        polar_core.improved_hardy_ratio(u, -0.05)


def _bump_field(center: float, amplitude: float) -> VectorField:
    b = amplitude * np.exp(-((RADIAL.s - center) ** 2))[:, None]
    return VectorField(RADIAL, b * np.cos(RADIAL.phi_row), b * np.sin(2.0 * RADIAL.phi_row))


@settings(max_examples=25, deadline=None)
@given(
    a=st.tuples(st.floats(-2.0, 2.0), st.floats(-3.0, 3.0)),
    b=st.tuples(st.floats(-2.0, 2.0), st.floats(-3.0, 3.0)),
    scale=st.floats(-5.0, 5.0),
    kind=st.sampled_from(["field_alpha", "seminorm_k_alpha", "frakX"]),
)
def test_weighted_norms_are_norms(a, b, scale, kind):
    u, v = _bump_field(*a), _bump_field(*b)

    def norm(w: VectorField) -> float:
        return polar_core.weighted_norm(kind, w, k=1, alpha=0.3)

    assert math.isclose(norm(u.scaled(scale)), abs(scale) * norm(u), rel_tol=1e-9, abs_tol=1e-12)
    assert norm(u + v) <= norm(u) + norm(v) + 1e-9
