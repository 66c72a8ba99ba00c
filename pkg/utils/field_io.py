# =============================================================================
# 📁 utils/field_io.py
# -----------------------------------------------------------------------------
# CSV-Formate für Felder, Randdaten, Mellin-Felder, Winkelpolynome und
# Plot-Tabellen. Zeilen immer zeilenweise nach s (bzw. j, λ), dann φ.
# =============================================================================

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from models.fields import AngularPolynomial, BoundaryData, Grid, MellinField, MellinLine, ScalarField, VectorField
from utils.errors import FieldArityError, GridMismatchError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

VECTOR_HEADER = ["s", "phi", "u_r", "u_phi"]
SCALAR_HEADER = ["s", "phi", "value"]
BOUNDARY_HEADER = ["s", "value_zero", "value_theta"]
POLY_VECTOR_HEADER = ["j", "phi", "value_r", "value_phi"]
POLY_SCALAR_HEADER = ["j", "phi", "value"]
MELLIN_SCALAR_HEADER = ["re_lambda", "im_lambda", "phi", "re_value", "im_value"]
MELLIN_VECTOR_HEADER = ["re_lambda", "im_lambda", "phi", "re_value_r", "im_value_r", "re_value_phi", "im_value_phi"]

DIGITS = "%.17g"


def _read(path: PathLike) -> Tuple[List[str], np.ndarray]:
    path = Path(path)
    if not path.is_file():
        raise FieldArityError(f"❌ Datei fehlt: {path}", {"path": str(path)})
    with open(path, encoding="utf-8") as handle:
        header = [h.strip() for h in handle.readline().strip().split(",")]
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.size and data.shape[1] != len(header):
        raise FieldArityError(
            f"❌ {path.name}: {data.shape[1]} Spalten, Kopfzeile hat {len(header)}",
            {"path": str(path), "header": ",".join(header)},
        )
    return header, data


def _write(path: PathLike, header: Sequence[str], data: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, data, delimiter=",", header=",".join(header), comments="", fmt=DIGITS)
    logger.debug(f"📁 geschrieben: {path} ({data.shape[0]} Zeilen)")
    return path


def _expect(path: PathLike, header: List[str], expected: Iterable[List[str]]) -> None:
    options = list(expected)
    if header not in options:
        raise FieldArityError(
            f"❌ {Path(path).name}: unbekannte Kopfzeile {','.join(header)}",
            {"path": str(path), "expected": " | ".join(",".join(o) for o in options)},
        )


def _tensor_axes(first: np.ndarray, second: np.ndarray, path: PathLike) -> Tuple[np.ndarray, np.ndarray]:
    """Achsen eines zeilenweise abgelegten Tensorgitters; prüft die Reihenfolge."""
    a = np.unique(first)
    b = np.unique(second)
    if a.size * b.size != first.size:
        raise GridMismatchError(
            f"❌ {Path(path).name}: kein vollständiges Tensorgitter",
            {"rows": first.size, "first": a.size, "second": b.size},
        )
    expected_first = np.repeat(a, b.size)
    expected_second = np.tile(b, a.size)
    if not (np.allclose(first, expected_first) and np.allclose(second, expected_second)):
        raise GridMismatchError(f"❌ {Path(path).name}: Zeilen nicht nach s, dann φ sortiert", {"path": str(path)})
    return a, b


# ─────────────────────────────────────────────
# 🌊 Felder
# ─────────────────────────────────────────────
def write_field(path: PathLike, field: Union[ScalarField, VectorField]) -> Path:
    grid = field.grid
    s, phi = np.meshgrid(grid.s, grid.phi, indexing="ij")
    columns = [s.ravel(), phi.ravel()]
    if isinstance(field, VectorField):
        return _write(path, VECTOR_HEADER, np.column_stack(columns + [field.u_r.ravel(), field.u_phi.ravel()]))
    return _write(path, SCALAR_HEADER, np.column_stack(columns + [field.values.ravel()]))


def read_field(path: PathLike, theta: float | None = None) -> Union[ScalarField, VectorField]:
    """Liest ein Feld; θ wird aus dem größten φ genommen, falls nicht angegeben."""
    header, data = _read(path)
    _expect(path, header, [VECTOR_HEADER, SCALAR_HEADER])
    s, phi = _tensor_axes(data[:, 0], data[:, 1], path)
    grid = Grid(float(theta if theta is not None else phi[-1]), s, phi)
    if header == VECTOR_HEADER:
        return VectorField(grid, data[:, 2].reshape(grid.shape), data[:, 3].reshape(grid.shape))
    return ScalarField(grid, data[:, 2].reshape(grid.shape))


def read_vector_field(path: PathLike, grid: Grid | None = None) -> VectorField:
    field = read_field(path, grid.theta if grid is not None else None)
    if not isinstance(field, VectorField):
        raise FieldArityError(f"❌ {Path(path).name} ist kein Vektorfeld", {"path": str(path)})
    if grid is not None:
        grid.check_same(field.grid)
        return VectorField(grid, field.u_r, field.u_phi)
    return field


def write_boundary(path: PathLike, data: BoundaryData) -> Path:
    return _write(path, BOUNDARY_HEADER, np.column_stack([data.grid.s, data.at_zero, data.at_theta]))


def read_boundary(path: PathLike, grid: Grid) -> BoundaryData:
    header, data = _read(path)
    _expect(path, header, [BOUNDARY_HEADER])
    if data.shape[0] != grid.s.size or not np.allclose(data[:, 0], grid.s, atol=1e-12):
        raise GridMismatchError(
            f"❌ {Path(path).name}: s-Werte passen nicht zum Gitter",
            {"rows": data.shape[0], "n_radial": grid.s.size},
        )
    return BoundaryData(grid, data[:, 1], data[:, 2])


# ─────────────────────────────────────────────
# 🌱 Winkelpolynome
# ─────────────────────────────────────────────
def write_polynomial(path: PathLike, poly: AngularPolynomial) -> Path:
    j, phi = np.meshgrid(np.arange(poly.degree + 1), poly.phi, indexing="ij")
    columns = [j.ravel().astype(float), phi.ravel()]
    if poly.is_vector:
        values = [poly.coefficients[:, 0].ravel(), poly.coefficients[:, 1].ravel()]
        return _write(path, POLY_VECTOR_HEADER, np.column_stack(columns + values))
    return _write(path, POLY_SCALAR_HEADER, np.column_stack(columns + [poly.coefficients.ravel()]))


def read_polynomial(path: PathLike, theta: float) -> AngularPolynomial:
    header, data = _read(path)
    _expect(path, header, [POLY_VECTOR_HEADER, POLY_SCALAR_HEADER])
    j, phi = _tensor_axes(data[:, 0], data[:, 1], path)
    if not np.array_equal(j, np.arange(j.size)):
        raise GridMismatchError(f"❌ {Path(path).name}: Grade nicht lückenlos ab 0", {"degrees": j.size})
    if header == POLY_VECTOR_HEADER:
        coeffs = np.stack([data[:, 2].reshape(j.size, phi.size), data[:, 3].reshape(j.size, phi.size)], axis=1)
    else:
        coeffs = data[:, 2].reshape(j.size, phi.size)
    return AngularPolynomial(theta, phi, coeffs)


# ─────────────────────────────────────────────
# 🔭 Mellin-Felder
# ─────────────────────────────────────────────
def write_mellin(path: PathLike, field: MellinField) -> Path:
    lam = field.line.lambdas
    re, phi = np.meshgrid(lam.real, field.phi, indexing="ij")
    im, _ = np.meshgrid(lam.imag, field.phi, indexing="ij")
    columns = [re.ravel(), im.ravel(), phi.ravel()]
    if field.is_vector:
        for comp in (field.r, field.phi_component):
            columns += [comp.real.ravel(), comp.imag.ravel()]
        return _write(path, MELLIN_VECTOR_HEADER, np.column_stack(columns))
    columns += [field.values.real.ravel(), field.values.imag.ravel()]
    return _write(path, MELLIN_SCALAR_HEADER, np.column_stack(columns))


def read_mellin(path: PathLike) -> MellinField:
    header, data = _read(path)
    _expect(path, header, [MELLIN_SCALAR_HEADER, MELLIN_VECTOR_HEADER])
    t, phi = _tensor_axes(data[:, 1], data[:, 2], path)
    K = t.size
    dt = float(t[1] - t[0]) if K > 1 else 1.0
    line = MellinLine(float(data[0, 0]), dt, K)
    shape = (K, phi.size)
    if header == MELLIN_VECTOR_HEADER:
        values = np.stack([(data[:, 3] + 1j * data[:, 4]).reshape(shape), (data[:, 5] + 1j * data[:, 6]).reshape(shape)])
    else:
        values = (data[:, 3] + 1j * data[:, 4]).reshape(shape)
    return MellinField(line, phi, values)


# ─────────────────────────────────────────────
# 📊 Tabellen
# ─────────────────────────────────────────────
def write_table(path: PathLike, header: Sequence[str], rows: Sequence[Sequence[float]]) -> Path:
    """Plot-fertige Tabelle, rein numerisch."""
    data = np.asarray(rows, dtype=float).reshape(len(rows), len(header))
    return _write(path, header, data)


def read_table(path: PathLike) -> Tuple[List[str], np.ndarray]:
    return _read(path)
