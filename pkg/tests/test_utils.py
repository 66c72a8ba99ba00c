import numpy as np
import pytest

from utils.finite_diff import derivative_matrix, differentiate, first_derivative_matrix
from utils.workers import chunk_slices, map_ordered, worker_count


def test_stencils_exact_on_quadratics():
    x = np.linspace(0.0, 1.0, 21)
    h = float(x[1] - x[0])
    assert np.allclose(differentiate(x**2, h, axis=0), 2.0 * x, atol=1e-12)
    assert np.allclose(differentiate(x**2, h, axis=0, order=2), 2.0, atol=1e-9)


def test_interior_is_fourth_order():
    errors = []
    for n in (41, 81):
        x = np.linspace(0.0, 1.0, n)
        d = differentiate(np.sin(3.0 * x), float(x[1] - x[0]), axis=0)
        errors.append(np.max(np.abs(d - 3.0 * np.cos(3.0 * x))[2:-2]))
    # Randnahe Sterne sind 2. Ordnung, daher nur grob
    assert errors[0] / errors[1] > 3.5


def test_differentiate_along_axis():
    x = np.linspace(0.0, 1.0, 11)
    values = np.outer(np.ones(4), x**2) * (1.0 + 1.0j)
    d = differentiate(values, float(x[1] - x[0]), axis=1)
    assert d.shape == values.shape
    assert np.allclose(d, np.outer(np.ones(4), 2.0 * x) * (1.0 + 1.0j))


def test_higher_orders_chain():
    D4 = derivative_matrix(9, 0.1, 4)
    assert D4.shape == (9, 9)
    assert np.array_equal(derivative_matrix(9, 0.1, 0), np.eye(9))


def test_too_few_nodes():
    with pytest.raises(ValueError):
        first_derivative_matrix(4, 0.1)


def test_map_ordered_keeps_order():
    items = list(range(17))
    assert map_ordered(lambda k: k * k, items, max_workers=4) == [k * k for k in items]


def test_worker_cap_from_env(monkeypatch):
    monkeypatch.setenv("WEDGE_STOKES_THREADS", "2")
    assert worker_count(8) == 2
    monkeypatch.setenv("WEDGE_STOKES_THREADS", "viele")
    assert worker_count(1) == 1


def test_chunk_slices_cover_range():
    slices = chunk_slices(10, 3)
    assert [s.start for s in slices][0] == 0 and slices[-1].stop == 10
    assert sum(s.stop - s.start for s in slices) == 10
    assert chunk_slices(2, 5) == [slice(0, 1), slice(1, 2)]
