import math

import numpy as np
import pytest

from models.fields import VectorField
from solver import helmholtz
from solver.manufactured import StreamCase, gaussian
from solver.polar_core import field_alpha_sq
from utils.errors import AdmissibilityError, ResonanceError, TruncationError


def _gradient_field(grid, center: float = -0.3) -> VectorField:
    """∇ψ für ψ = B(s)cos(πφ/θ), analytisch."""
    k = math.pi / grid.theta
    B, B1, _, _ = gaussian(grid.s, center, 0.9)
    inv_r = np.exp(-grid.s)[:, None]
    cos, sin = np.cos(k * grid.phi_row), np.sin(k * grid.phi_row)
    return VectorField(grid, inv_r * B1[:, None] * cos, -inv_r * k * B[:, None] * sin)


def _rel(a: VectorField, b: VectorField) -> float:
    return math.sqrt(field_alpha_sq(a - b, 0.0) / field_alpha_sq(b, 0.0))


def test_projection_of_zero_is_zero(grid):
    pw = helmholtz.project(VectorField.zeros(grid))
    assert not np.any(pw.stacked())


def test_solenoidal_field_is_fixed(grid):
    u = StreamCase().on_grid(grid).u
    assert _rel(helmholtz.project(u), u) < 1e-2, "ℙ muss divergenzfreie Felder festhalten"


def test_gradient_is_annihilated(grid):
    w = _gradient_field(grid)
    pw = helmholtz.project(w)
    assert math.sqrt(field_alpha_sq(pw, 0.0) / field_alpha_sq(w, 0.0)) < 1e-2


def test_projection_laws(grid):
    u = StreamCase().on_grid(grid).u
    w = u + _gradient_field(grid)
    other = StreamCase(center=0.5).on_grid(grid).u + _gradient_field(grid, 0.4)
    laws = helmholtz.projection_laws(w, other)
    assert laws["idempotency"] < 1e-3
    assert laws["r_dr_commutation"] < 1e-6
    assert laws["divergence"] < 1e-2
    assert laws["normal_trace"] < 1e-3
    assert laws["symmetry"] < 1e-2


def test_potential_line_must_be_admissible(grid):
    with pytest.raises(AdmissibilityError):
        helmholtz.project(_gradient_field(grid), gamma=3.5)


def test_fourier_modes_of_single_cosine(grid):
    row = np.cos(math.pi * grid.phi / grid.theta)[None, :]
    modes = helmholtz.fourier_modes(row, grid.phi, grid.theta, "cos", 1e-6)
    assert modes.truncation == 1
    assert modes.bessel_monotone()
    assert math.isclose(abs(modes.coefficients[0, 1]), math.sqrt(grid.theta / 2.0), rel_tol=1e-6)


def test_fourier_modes_truncation_error(grid, rng):
    rows = rng.standard_normal((3, grid.phi.size))
    with pytest.raises(TruncationError):
        helmholtz.fourier_modes(rows, grid.phi, grid.theta, "cos", 1e-6, max_modes=2)


def test_weight_commutator_needs_nonzero_alpha(grid):
    with pytest.raises(AdmissibilityError):
        helmholtz.commutator("weight", StreamCase().on_grid(grid).u, 0.0)


def test_weight_commutator_matches_two_projections(grid):
    u = StreamCase().on_grid(grid).u
    assert helmholtz.commutator_oracle_gap("weight", u, 0.2) < 1e-2


def test_green_potential_recovers_gradient(grid):
    w = _gradient_field(grid)
    potential = helmholtz.potential_green(w)
    assert potential.neumann_defect < 1e-2
    assert _rel(potential.gradient_field(grid), w) < 1e-2


def test_potentials_of_zero(grid):
    assert not np.any(helmholtz.potential_green(VectorField.zeros(grid)).phi_hat.values)
    assert not np.any(helmholtz.potential_fourier(VectorField.zeros(grid), 0.2).gradient.values)


def test_fourier_potential_resonance(grid):
    # Re λ = γ + 1 = −2α trifft den Pol bei t = 0
    with pytest.raises(ResonanceError):
        helmholtz.potential_fourier(VectorField.zeros(grid), 0.25, gamma=-1.5)


def test_weight_commutator_representations_agree(grid):
    u = StreamCase().on_grid(grid).u
    fourier = helmholtz.commutator("weight", u, 0.2)
    green = helmholtz.commutator("weight", u, 0.2, representation="green")
    assert _rel(green, fourier) < 5e-2
