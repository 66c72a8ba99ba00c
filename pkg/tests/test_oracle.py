import math

import numpy as np
import pytest

from models.fields import VectorField
from solver import oracle
from solver.manufactured import StreamCase
from utils.errors import AdmissibilityError, GridMismatchError


def _domain(**kwargs) -> oracle.TruncatedWedge:
    return oracle.TruncatedWedge(theta=0.8, r_in=0.2, r_out=5.0, **kwargs)


def test_domain_geometry():
    d = _domain()
    assert d.s_a == pytest.approx(math.log(0.2))
    assert d.s_faces.size == d.n_radial + 1
    assert d.phi_centers[0] == pytest.approx(0.5 * d.dphi)
    fine = d.refined()
    assert (fine.n_radial, fine.n_angular) == (2 * d.n_radial, 2 * d.n_angular)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"r_in": 1.2, "r_out": 5.0},
        {"r_in": 0.2, "r_out": 0.9},
        {"r_in": 0.2, "r_out": 5.0, "n_radial": 16},
        {"r_in": 0.2, "r_out": 5.0, "boundary": "reference"},
    ],
)
def test_domain_validation(kwargs):
    with pytest.raises(AdmissibilityError):
        oracle.TruncatedWedge(theta=0.8, **kwargs)


def test_zero_data_gives_zero():
    u, p = oracle.fd_solve(None, None, _domain())
    assert not np.any(u.stacked())
    assert not np.any(p.values)
    assert u.grid.shape == (65, 33)


@pytest.mark.slow
def test_manufactured_field_is_reproduced():
    case = StreamCase()
    d = _domain(boundary="reference", reference=case.velocity(0.8))
    u, _ = oracle.fd_solve(case.forcing(0.8), case.navier_data(0.8), d)
    exact = case.on_grid(u.grid).u
    region = oracle.buffered_region(d)
    err = oracle.compare(exact, u, region, norm_kind="max", relative=True)
    assert err < 0.1, f"FD-Fehler {err:.2e}"


def test_compare_identical_is_zero():
    d = _domain()
    u = StreamCase().on_grid(d.vertex_grid()).u
    region = oracle.buffered_region(d)
    assert oracle.compare(u, u, region) == 0.0
    assert oracle.compare(u, u, region, relative=True) == 0.0


def test_compare_checks_angle_and_region():
    d = _domain()
    u = VectorField.zeros(d.vertex_grid())
    other = VectorField.zeros(oracle.TruncatedWedge(theta=0.7, r_in=0.2, r_out=5.0).vertex_grid())
    with pytest.raises(GridMismatchError):
        oracle.compare(u, other, oracle.buffered_region(d))
    with pytest.raises(GridMismatchError):
        oracle.compare(u, u, (1.0, 1.0001))


def test_buffer_floor():
    d = _domain()
    lo, hi = oracle.buffered_region(d, 0.25)
    assert 0.2 < lo < 1.0 < hi < 5.0
    with pytest.raises(AdmissibilityError):
        oracle.buffered_region(d, 0.1)


def test_observed_order():
    orders = oracle.observed_order([4e-2, 1e-2, 2.5e-3, 0.0])
    assert orders[0] == pytest.approx(2.0)
    assert orders[1] == pytest.approx(2.0)
    assert math.isnan(orders[2])
