# =============================================================================
# 🧩 models/fields.py
# -----------------------------------------------------------------------------
# Unveränderliche Datencontainer: Gitter, Skalar-/Vektorfelder, Randdaten,
# Mellin-Linien und -Felder, Winkelpolynome.
# Arrays liegen immer in der Form (n_radial, n_angular).
# =============================================================================

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from models.config import GridSpec
from utils.errors import ConsistencyError, GridMismatchError


def _frozen(values: np.ndarray, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _require_finite(name: str, values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        raise ConsistencyError(f"❌ Nicht-endliche Werte in {name}", {"field": name})


# ─────────────────────────────────────────────
# 📏 Gitter
# ─────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class Grid:
    """Tensorgitter in s = log r und φ ∈ [0, θ] (beide Ränder enthalten)."""

    theta: float
    s: np.ndarray
    phi: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "s", _frozen(self.s))
        object.__setattr__(self, "phi", _frozen(self.phi))
        if self.s.size < 16 or self.phi.size < 8:
            raise GridMismatchError(
                f"❌ Gitter zu klein: {self.s.size}×{self.phi.size}",
                {"n_radial": self.s.size, "n_angular": self.phi.size},
            )

    @classmethod
    def from_spec(cls, spec: GridSpec, theta: float) -> "Grid":
        return cls(
            theta=float(theta),
            s=np.linspace(spec.s_min, spec.s_max, spec.n_radial),
            phi=np.linspace(0.0, theta, spec.n_angular),
        )

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.s.size, self.phi.size)

    @property
    def ds(self) -> float:
        return float(self.s[1] - self.s[0])

    @property
    def dphi(self) -> float:
        return float(self.phi[1] - self.phi[0])

    @property
    def r(self) -> np.ndarray:
        return np.exp(self.s)

    @property
    def r_col(self) -> np.ndarray:
        """r als Spalte (n_radial, 1) zum Broadcasten."""
        return np.exp(self.s)[:, None]

    @property
    def phi_row(self) -> np.ndarray:
        return self.phi[None, :]

    def same_as(self, other: "Grid") -> bool:
        return (
            self.shape == other.shape
            and math.isclose(self.theta, other.theta, rel_tol=0, abs_tol=1e-14)
            and np.allclose(self.s, other.s, rtol=0, atol=1e-12)
        )

    def check_same(self, other: "Grid") -> None:
        if not self.same_as(other):
            raise GridMismatchError(
                "❌ Felder liegen auf verschiedenen Gittern",
                {"left": self.shape, "right": other.shape},
            )

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)


# ─────────────────────────────────────────────
# 🌊 Felder
# ─────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen(self.values))
        if self.values.shape != self.grid.shape:
            raise GridMismatchError(
                f"❌ Form {self.values.shape} passt nicht zum Gitter {self.grid.shape}",
                {"values": self.values.shape, "grid": self.grid.shape},
            )
        _require_finite("ScalarField", self.values)

    @classmethod
    def zeros(cls, grid: Grid) -> "ScalarField":
        return cls(grid, grid.zeros())

    def __add__(self, other: "ScalarField") -> "ScalarField":
        self.grid.check_same(other.grid)
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        self.grid.check_same(other.grid)
        return ScalarField(self.grid, self.values - other.values)

    def scaled(self, factor: float | np.ndarray) -> "ScalarField":
        return ScalarField(self.grid, self.values * factor)


@dataclass(frozen=True, eq=False)
class VectorField:
    """Polarkomponenten (u_r, u_φ) je Knoten."""

    grid: Grid
    u_r: np.ndarray
    u_phi: np.ndarray

    def __post_init__(self) -> None:
        for name in ("u_r", "u_phi"):
            arr = _frozen(getattr(self, name))
            if arr.shape != self.grid.shape:
                raise GridMismatchError(
                    f"❌ Komponente {name} hat Form {arr.shape}, Gitter {self.grid.shape}",
                    {"component": name},
                )
            _require_finite(f"VectorField.{name}", arr)
            object.__setattr__(self, name, arr)

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls(grid, grid.zeros(), grid.zeros())

    def __add__(self, other: "VectorField") -> "VectorField":
        self.grid.check_same(other.grid)
        return VectorField(self.grid, self.u_r + other.u_r, self.u_phi + other.u_phi)

    def __sub__(self, other: "VectorField") -> "VectorField":
        self.grid.check_same(other.grid)
        return VectorField(self.grid, self.u_r - other.u_r, self.u_phi - other.u_phi)

    def scaled(self, factor: float | np.ndarray) -> "VectorField":
        return VectorField(self.grid, self.u_r * factor, self.u_phi * factor)

    def stacked(self) -> np.ndarray:
        return np.stack([self.u_r, self.u_phi])

    def edge_traces(self) -> "BoundaryData":
        """u_r an φ = 0 und φ = θ."""
        return BoundaryData(self.grid, self.u_r[:, 0], self.u_r[:, -1])


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """Randwerte g(r) auf beiden Kanten φ = 0 und φ = θ."""

    grid: Grid
    at_zero: np.ndarray
    at_theta: np.ndarray

    def __post_init__(self) -> None:
        for name in ("at_zero", "at_theta"):
            arr = _frozen(getattr(self, name))
            if arr.shape != (self.grid.s.size,):
                raise GridMismatchError(
                    f"❌ Randdaten {name} haben Form {arr.shape}, erwartet ({self.grid.s.size},)",
                    {"edge": name},
                )
            _require_finite(f"BoundaryData.{name}", arr)
            object.__setattr__(self, name, arr)

    @classmethod
    def zeros(cls, grid: Grid) -> "BoundaryData":
        n = grid.s.size
        return cls(grid, np.zeros(n), np.zeros(n))

    def edges(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.at_zero, self.at_theta

    def __add__(self, other: "BoundaryData") -> "BoundaryData":
        self.grid.check_same(other.grid)
        return BoundaryData(self.grid, self.at_zero + other.at_zero, self.at_theta + other.at_theta)

    def __sub__(self, other: "BoundaryData") -> "BoundaryData":
        self.grid.check_same(other.grid)
        return BoundaryData(self.grid, self.at_zero - other.at_zero, self.at_theta - other.at_theta)

    def scaled(self, factor: float) -> "BoundaryData":
        return BoundaryData(self.grid, self.at_zero * factor, self.at_theta * factor)


# ─────────────────────────────────────────────
# 🔭 Mellin-Seite
# ─────────────────────────────────────────────
@dataclass(frozen=True)
class MellinLine:
    """Vertikale Linie Re λ = re_lambda mit symmetrischen Stützstellen t_k."""

    re_lambda: float
    dt: float
    n_modes: int

    def __post_init__(self) -> None:
        if self.n_modes < 1 or self.n_modes % 2 == 0:
            raise ValueError(f"❌ n_modes muss ungerade sein, erhalten: {self.n_modes}")
        if not self.dt > 0:
            raise ValueError(f"❌ Schrittweite dt muss positiv sein: {self.dt}")

    @classmethod
    def for_grid(cls, grid: Grid, re_lambda: float, n_modes: Optional[int] = None) -> "MellinLine":
        """Linie, deren Stützstellen zum s-Gitter dual sind (exaktes diskretes Paar)."""
        K = n_modes or 2 * grid.s.size + 1
        return cls(float(re_lambda), 2.0 * math.pi / (K * grid.ds), int(K))

    @property
    def t(self) -> np.ndarray:
        center = (self.n_modes - 1) // 2
        return (np.arange(self.n_modes) - center) * self.dt

    @property
    def T(self) -> float:
        return float(self.t[-1])

    @property
    def lambdas(self) -> np.ndarray:
        return self.re_lambda + 1j * self.t

    def shifted(self, delta: float) -> "MellinLine":
        return MellinLine(self.re_lambda + delta, self.dt, self.n_modes)


@dataclass(frozen=True, eq=False)
class MellinField:
    """
    Komplexe Werte über (Im λ, φ). Skalar: Form (K, Na);
    Vektor: Form (2, K, Na) mit Komponenten (r, φ).
    """

    line: MellinLine
    phi: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen(self.values, dtype=complex))
        object.__setattr__(self, "phi", _frozen(self.phi))
        expected = (self.line.n_modes, self.phi.size)
        if self.values.shape not in (expected, (2,) + expected):
            raise GridMismatchError(
                f"❌ MellinField-Form {self.values.shape} passt nicht zu {expected}",
                {"values": self.values.shape, "expected": expected},
            )
        _require_finite("MellinField", self.values)

    @property
    def is_vector(self) -> bool:
        return self.values.ndim == 3

    @property
    def r(self) -> np.ndarray:
        return self.values[0]

    @property
    def phi_component(self) -> np.ndarray:
        return self.values[1]


# ─────────────────────────────────────────────
# 🔺 Spitzenpolynome
# ─────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class AngularPolynomial:
    """
    Σ_j a⁽ʲ⁾(φ) rʲ. Skalar: coefficients (k+1, Na);
    Vektor: (k+1, 2, Na) mit Komponenten (r, φ).
    """

    theta: float
    phi: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi", _frozen(self.phi))
        coeffs = _frozen(self.coefficients)
        if coeffs.ndim not in (2, 3) or coeffs.shape[-1] != self.phi.size:
            raise GridMismatchError(
                f"❌ Koeffizientenform {coeffs.shape} passt nicht zu {self.phi.size} Winkelknoten",
                {"coefficients": coeffs.shape},
            )
        if coeffs.ndim == 3 and coeffs.shape[1] != 2:
            raise GridMismatchError("❌ Vektorpolynom braucht genau zwei Komponenten", {})
        _require_finite("AngularPolynomial", coeffs)
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def zeros(cls, grid: Grid, degree: int, vector: bool = True) -> "AngularPolynomial":
        shape = (max(degree, -1) + 1, 2, grid.phi.size) if vector else (max(degree, -1) + 1, grid.phi.size)
        return cls(grid.theta, grid.phi, np.zeros(shape))

    @property
    def degree(self) -> int:
        return self.coefficients.shape[0] - 1

    @property
    def is_vector(self) -> bool:
        return self.coefficients.ndim == 3

    def is_zero(self) -> bool:
        return self.coefficients.size == 0 or not np.any(self.coefficients)

    def coefficient(self, j: int) -> np.ndarray:
        if 0 <= j <= self.degree:
            return self.coefficients[j]
        return np.zeros(self.coefficients.shape[1:])

    def evaluate(self, grid: Grid) -> np.ndarray:
        """Werte auf dem Gitter; Vektor → Form (2, Nr, Na)."""
        r = grid.r
        if self.is_vector:
            out = np.zeros((2,) + grid.shape)
            for j in range(self.degree + 1):
                out += (r**j)[None, :, None] * self.coefficients[j][:, None, :]
            return out
        out = np.zeros(grid.shape)
        for j in range(self.degree + 1):
            out += (r**j)[:, None] * self.coefficients[j][None, :]
        return out

