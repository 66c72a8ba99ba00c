import numpy as np

from solver import kernels

THETA = 0.8
PHI = np.linspace(0.0, THETA, 41)[None, :]


def _dirichlet_kernel() -> kernels.SeparableKernel:
    # −w″ = q, w(0) = w(θ) = 0
    def a(d: int) -> np.ndarray:
        return [(THETA - PHI) / THETA, -np.ones_like(PHI) / THETA][d] if d < 2 else np.zeros_like(PHI)

    def b(d: int) -> np.ndarray:
        return [PHI, np.ones_like(PHI)][d] if d < 2 else np.zeros_like(PHI)

    return kernels.SeparableKernel((kernels.SeparableTerm(a, b),), float(PHI[0, 1] - PHI[0, 0]))


def test_cumulative_integrals_are_exact_for_quadratics():
    q = PHI**2
    dphi = float(PHI[0, 1])
    assert np.allclose(kernels.cumulative_from_start(q, dphi), PHI**3 / 3.0, atol=1e-12)
    assert np.allclose(kernels.cumulative_from_end(q, dphi), (THETA**3 - PHI**3) / 3.0, atol=1e-12)
    assert np.allclose(kernels.integrate_angle(q, dphi), THETA**3 / 3.0, atol=1e-12)


def test_complex_density_splits_cleanly():
    q = (1.0 + 2.0j) * np.ones_like(PHI)
    total = kernels.integrate_angle(q, float(PHI[0, 1]))
    assert np.allclose(total, (1.0 + 2.0j) * THETA)


def test_dirichlet_kernel_and_derivatives():
    kernel = _dirichlet_kernel()
    q = np.ones_like(PHI)
    assert np.allclose(kernel.apply(q).real, PHI * (THETA - PHI) / 2.0, atol=1e-12)
    assert np.allclose(kernel.apply(q, order=1).real, THETA / 2.0 - PHI, atol=1e-12)
    assert np.allclose(kernel.apply(q, order=2).real, -1.0, atol=1e-12), "Sprungterm fehlt"


def test_trig_derivatives_cycle():
    mu = np.array([1.7])
    x = np.linspace(0.0, 1.0, 7)
    assert np.allclose(kernels.sin_deriv(mu, x, 4), mu**4 * np.sin(mu * x))
    assert np.allclose(kernels.cos_deriv(mu, x, 1), -mu * np.sin(mu * x))
    assert np.allclose(kernels.sin_reflected_deriv(mu, 1.0, x, 1), -mu * np.cos(mu * (1.0 - x)))
    assert np.allclose(kernels.cos_reflected_deriv(mu, 1.0, x, 1), mu * np.sin(mu * (1.0 - x)))


def test_pointwise_matches_symmetric_branches():
    terms = [(lambda x, d: (THETA - x) / THETA if d == 0 else -1.0 / THETA, lambda x, d: x if d == 0 else 1.0)]
    low = kernels.evaluate_pointwise(terms, 0.6, 0.2)
    high = kernels.evaluate_pointwise(terms, 0.2, 0.6)
    assert np.isclose(low, high), "Kern muss symmetrisch sein"
    assert np.isclose(low, 0.2 * (THETA - 0.6) / THETA)
