from pathlib import Path

import numpy as np
import pytest

from models.fields import AngularPolynomial, BoundaryData, MellinField, MellinLine, ScalarField, VectorField
from utils.errors import FieldArityError, GridMismatchError
from utils.field_io import (
    read_boundary,
    read_field,
    read_mellin,
    read_polynomial,
    read_table,
    read_vector_field,
    write_boundary,
    write_field,
    write_mellin,
    write_polynomial,
    write_table,
)


def test_vector_field_file(tmp_path: Path, grid):
    u = VectorField(grid, np.sin(grid.s)[:, None] * grid.phi[None, :], np.cos(grid.phi)[None, :] * np.ones(grid.shape))
    back = read_vector_field(write_field(tmp_path / "u.csv", u), grid)
    assert np.array_equal(back.u_r, u.u_r)
    assert np.array_equal(back.u_phi, u.u_phi)


def test_scalar_field_infers_theta(tmp_path: Path, grid):
    p = ScalarField(grid, np.outer(grid.s, grid.phi))
    back = read_field(write_field(tmp_path / "p.csv", p))
    assert isinstance(back, ScalarField)
    assert back.grid.theta == grid.theta
    assert np.array_equal(back.values, p.values)


def test_boundary_file(tmp_path: Path, grid):
    g = BoundaryData(grid, np.exp(-grid.s**2), -np.exp(-grid.s**2))
    back = read_boundary(write_boundary(tmp_path / "g.csv", g), grid)
    assert np.array_equal(back.at_theta, g.at_theta)


def test_polynomial_file(tmp_path: Path, grid):
    coeffs = np.zeros((3, 2, grid.phi.size))
    coeffs[2, 0] = np.cos(grid.phi)
    poly = AngularPolynomial(grid.theta, grid.phi, coeffs)
    back = read_polynomial(write_polynomial(tmp_path / "poly.csv", poly), grid.theta)
    assert back.degree == 2 and back.is_vector
    assert np.array_equal(back.coefficients, coeffs)


def test_mellin_file(tmp_path: Path, grid):
    line = MellinLine(0.3, 0.5, 5)
    values = np.arange(5 * grid.phi.size).reshape(5, grid.phi.size) * (1.0 - 0.5j)
    back = read_mellin(write_mellin(tmp_path / "m.csv", MellinField(line, grid.phi, values)))
    assert back.line.re_lambda == 0.3
    assert np.allclose(back.line.t, line.t)
    assert np.array_equal(back.values, values)


def test_table_file(tmp_path: Path):
    path = write_table(tmp_path / "t.csv", ["a", "b"], [[1.0, 2.0], [3.0, 4.0]])
    header, data = read_table(path)
    assert header == ["a", "b"]
    assert data.shape == (2, 2)


def test_wrong_column_count(tmp_path: Path):
    path = tmp_path / "bad.csv"
    path.write_text("s,phi,u_r,u_phi\n0,0,1\n", encoding="utf-8")
    with pytest.raises(FieldArityError):
        read_field(path)


def test_unknown_header(tmp_path: Path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n0,0\n", encoding="utf-8")
    with pytest.raises(FieldArityError):
        read_field(path)


def test_scalar_file_is_not_vector(tmp_path: Path, grid):
    path = write_field(tmp_path / "p.csv", ScalarField.zeros(grid))
    with pytest.raises(FieldArityError):
        read_vector_field(path)


def test_unsorted_rows(tmp_path: Path, grid):
    path = write_field(tmp_path / "u.csv", VectorField.zeros(grid))
    lines = path.read_text(encoding="utf-8").splitlines()
    lines[1], lines[2] = lines[2], lines[1]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(GridMismatchError):
        read_field(path)


def test_boundary_wrong_grid(tmp_path: Path, grid):
    path = write_table(tmp_path / "g.csv", ["s", "value_zero", "value_theta"], [[0.0, 0.0, 0.0]] * 3)
    with pytest.raises(GridMismatchError):
        read_boundary(path, grid)
