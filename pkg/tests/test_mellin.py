import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from models.fields import Grid, MellinField, ScalarField
from solver import mellin
from solver.polar_core import d_s, seminorm_sq
from utils.errors import AdmissibilityError, ConfigError, ConsistencyError, DecayError, GridMismatchError, TruncationError


def _gauss(grid, center: float = 0.0) -> np.ndarray:
    return np.exp(-((grid.s - center) ** 2))


def _field(grid) -> ScalarField:
    return ScalarField(grid, _gauss(grid, 0.4)[:, None] * np.cos(np.pi * grid.phi_row / grid.theta))


def test_round_trip_is_exact(grid):
    f = _field(grid)
    back = mellin.mellin_inverse(mellin.mellin_forward(f, 0.3), grid)
    assert np.allclose(back.values, f.values, atol=1e-12)


def test_fft_matches_direct_sum(grid):
    values = _gauss(grid)[:, None] * np.ones((1, 3))
    direct, line = mellin.forward_values(values, grid, 0.2)
    fast, _ = mellin.forward_values(values, grid, 0.2, method="fft")
    assert np.allclose(fast, direct, atol=1e-12)
    back = mellin.inverse_values(direct, grid, line, method="fft")
    assert np.allclose(back.real, values, atol=1e-12)


@pytest.mark.parametrize(
    "rule, params",
    [
        ("pairing", {"alpha": 0.3}),
        ("parseval", {"alpha": -0.2}),
        ("weight_shift", {"alpha": 0.5, "re_lambda": 0.1}),
    ],
)
def test_exact_rules(grid, rule, params):
    g = _gauss(grid, -0.5) * np.cos(grid.s)
    assert mellin.mellin_calculus_check(rule, _gauss(grid), grid, g, params) < 1e-10


@pytest.mark.parametrize("rule", ["r_dr_power", "d_r_power"])
def test_derivative_rules(grid, rule):
    assert mellin.mellin_calculus_check(rule, _gauss(grid), grid, params={"n": 1, "re_lambda": 0.0}) < 5e-3


def test_rule_parameters_are_checked(grid):
    with pytest.raises(ConfigError):
        mellin.mellin_calculus_check("pairing", _gauss(grid), grid)
    with pytest.raises(ConfigError):
        mellin.mellin_calculus_check("leibniz", _gauss(grid), grid, params={"alpha": 0.1})


def test_sobolev_norm_matches_physical_seminorm(grid):
    f = _field(grid)
    mf = mellin.mellin_forward(f, 0.3)
    spectral = mellin.mellin_sobolev_norm(mf, 1, 0.3)
    physical = np.sqrt(seminorm_sq(f, 1, 0.3))
    assert abs(spectral - physical) <= 1e-2 * physical
    with pytest.raises(AdmissibilityError):
        mellin.mellin_sobolev_norm(mf, 2, 0.3)


def test_line_shift_is_invisible(grid):
    assert mellin.line_shift_discrepancy(_field(grid), [-0.5, 0.0, 0.5]) < 1e-10


def test_spectral_r_dr_matches_stencil(grid):
    f = _field(grid)
    spectral = mellin.spectral_r_dr(f, 0.0)
    assert np.max(np.abs(spectral.values - d_s(f.values, grid))) < 1e-3


def test_extension_reproduces_traces(grid):
    u0 = _gauss(grid, 0.2)
    ext = mellin.extend_trace([(u0, np.zeros_like(u0))], 1, 0.3, grid)
    assert np.allclose(ext.values[:, 0], u0, atol=1e-10)
    assert np.allclose(ext.values[:, -1], 0.0, atol=1e-10)
    assert mellin.extension_constant([(u0, np.zeros_like(u0))], 1, 0.3, grid) > 0.0


def test_extension_checks_trace_count(grid):
    u0 = _gauss(grid)
    with pytest.raises(GridMismatchError):
        mellin.extend_trace([(u0, u0), (u0, u0)], 1, 0.3, grid)
    with pytest.raises(GridMismatchError):
        mellin.extend_trace([(u0[:-1], u0)], 1, 0.3, grid)


def test_gamma_reference():
    assert mellin.gamma_check() < 1e-8
    with pytest.raises(AdmissibilityError):
        mellin.gamma_check(re_lambda=0.5)


def test_gaussian_matches_closed_form():
    # f(r) = e^{−(log r)²}: f̂(λ) = (2π)^{−½}∫e^{−λs−s²}ds = e^{λ²/4}/√2
    grid = Grid(theta=0.8, s=np.linspace(-12.0, 12.0, 481), phi=np.linspace(0.0, 0.8, 5))
    for re_lambda in (-0.7, 0.5, 1.3):
        hat, line = mellin.forward_values(np.exp(-grid.s**2), grid, re_lambda)
        exact = np.exp(line.lambdas**2 / 4.0) / np.sqrt(2.0)
        assert np.allclose(hat, exact, rtol=0.0, atol=1e-10), f"Abweichung auf Re λ = {re_lambda}"
    field = ScalarField(grid, np.exp(-grid.s**2)[:, None] * np.ones((1, grid.phi.size)))
    back = mellin.mellin_inverse(mellin.mellin_forward(field, 0.5), grid)
    assert np.allclose(back.values, field.values, atol=1e-12)


def test_slow_decay_rejected(grid):
    with pytest.raises(DecayError):
        mellin.mellin_forward(ScalarField(grid, np.ones(grid.shape)), 0.0)


def test_rough_field_flags_truncation(grid):
    spike = np.zeros(grid.shape)
    spike[grid.s.size // 2] = 1.0
    mf = mellin.mellin_forward(ScalarField(grid, spike), 0.0)
    with pytest.raises(TruncationError):
        mellin.mellin_inverse(mf, grid)


def test_imaginary_residue_rejected():
    with pytest.raises(ConsistencyError):
        mellin.ensure_real(np.array([1.0 + 0.5j, 2.0 + 0.0j]))
    assert np.array_equal(mellin.ensure_real(np.array([1.0 + 0.0j])), [1.0])


def test_mellin_field_keeps_line(grid):
    mf = mellin.mellin_forward(_field(grid), -0.1)
    assert isinstance(mf, MellinField)
    assert mf.line.re_lambda == -0.1
    assert mf.values.shape == (mf.line.n_modes, grid.phi.size)


LINE_GRID = Grid(theta=0.8, s=np.linspace(-8.0, 8.0, 128), phi=np.linspace(0.0, 0.8, 9))
profiles = st.tuples(st.floats(-2.0, 2.0), st.floats(0.4, 1.5), st.floats(-3.0, 3.0))


def _profile(params) -> np.ndarray:
    center, width, amplitude = params
    return amplitude * np.exp(-(((LINE_GRID.s - center) / width) ** 2))


@settings(max_examples=25, deadline=None)
@given(a=profiles, b=profiles, scale=st.floats(-4.0, 4.0), re_lambda=st.sampled_from([-0.4, 0.0, 0.3]))
def test_forward_is_linear(a, b, scale, re_lambda):
    fa, _ = mellin.forward_values(_profile(a), LINE_GRID, re_lambda)
    fb, _ = mellin.forward_values(_profile(b), LINE_GRID, re_lambda)
    both, _ = mellin.forward_values(scale * _profile(a) + _profile(b), LINE_GRID, re_lambda)
    assert np.allclose(both, scale * fa + fb, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(a=profiles, re_lambda=st.sampled_from([-0.4, 0.0, 0.3]))
def test_real_input_is_conjugate_symmetric(a, re_lambda):
    values, _ = mellin.forward_values(_profile(a), LINE_GRID, re_lambda)
    assert np.allclose(values[::-1], np.conj(values), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(a=profiles, alpha=st.floats(-0.5, 0.5))
def test_parseval_holds_for_random_profiles(a, alpha):
    assume(abs(a[2]) > 1e-3)
    assert mellin.mellin_calculus_check("parseval", _profile(a), LINE_GRID, params={"alpha": alpha}) < 1e-10
