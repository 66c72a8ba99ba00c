"""
──────────────────────────────────────────────
🧱 solver/oracle.py
Unabhängiger Finite-Differenzen-Löser auf dem abgeschnittenen Keil
──────────────────────────────────────────────
MAC-Gitter in (s, φ) auf [s_a, s_b] × [0, θ], Impuls mit r² multipliziert:

    −(∂_s² + ∂_φ²)u_r + u_r + 2∂_φu_φ + r∂_s p = r² f_r
    −(∂_s² + ∂_φ²)u_φ + u_φ − 2∂_φu_r + r∂_φ p = r² f_φ
    ∂_s(r u_r) + r∂_φu_φ = 0

p in Zellmitten, u_r auf s-Flächen, u_φ auf φ-Flächen. Kanten: u_φ = 0,
Navier über Geisterwerte von u_r. Künstliche Ränder s_a, s_b: Dirichlet
(null oder aus einer Referenz). Druck in Zelle (0, 0) auf null gesetzt.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse import csc_matrix
from scipy.sparse.linalg import LinearOperator, onenormest, splu

from models.fields import BoundaryData, Grid, ScalarField, VectorField
from solver.polar_core import integrate_domain, mixed_derivative
from utils.errors import AdmissibilityError, ConvergenceError, GridMismatchError

logger = logging.getLogger(__name__)

Sampler = Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]
EdgeSampler = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]
NormKind = Literal["field_alpha", "seminorm_1", "max"]

MIN_RADIAL = 64
MIN_ANGULAR = 32
SOLVE_RESIDUAL_LIMIT = 1e-8


# ─────────────────────────────────────────────
# 📐 Gebiet
# ─────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class TruncatedWedge:
    """
    Ringsektor r_in ≤ r ≤ r_out, 0 ≤ φ ≤ θ mit n_radial × n_angular Zellen.
    boundary="reference" nimmt die Dirichlet-Werte bei r_in/r_out aus `reference`.
    """

    theta: float
    r_in: float
    r_out: float
    n_radial: int = MIN_RADIAL
    n_angular: int = MIN_ANGULAR
    boundary: Literal["zero", "reference"] = "zero"
    reference: Optional[Sampler] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.r_in < 1.0 < self.r_out:
            raise AdmissibilityError(
                f"❌ 0 < r_in < 1 < r_out verletzt: r_in={self.r_in}, r_out={self.r_out}",
                {"r_in": self.r_in, "r_out": self.r_out},
            )
        if self.n_radial < MIN_RADIAL or self.n_angular < MIN_ANGULAR:
            raise AdmissibilityError(
                f"❌ Auflösung {self.n_radial}×{self.n_angular} unter {MIN_RADIAL}×{MIN_ANGULAR}",
                {"n_radial": self.n_radial, "n_angular": self.n_angular},
            )
        if self.boundary == "reference" and self.reference is None:
            raise AdmissibilityError("❌ boundary='reference' ohne Referenzfeld", {})

    @property
    def s_a(self) -> float:
        return math.log(self.r_in)

    @property
    def s_b(self) -> float:
        return math.log(self.r_out)

    @property
    def ds(self) -> float:
        return (self.s_b - self.s_a) / self.n_radial

    @property
    def dphi(self) -> float:
        return self.theta / self.n_angular

    @property
    def s_faces(self) -> np.ndarray:
        return self.s_a + self.ds * np.arange(self.n_radial + 1)

    @property
    def s_centers(self) -> np.ndarray:
        return self.s_a + self.ds * (np.arange(self.n_radial) + 0.5)

    @property
    def phi_faces(self) -> np.ndarray:
        return self.dphi * np.arange(self.n_angular + 1)

    @property
    def phi_centers(self) -> np.ndarray:
        return self.dphi * (np.arange(self.n_angular) + 0.5)

    def refined(self, factor: int = 2) -> "TruncatedWedge":
        return TruncatedWedge(
            self.theta, self.r_in, self.r_out, self.n_radial * factor, self.n_angular * factor, self.boundary, self.reference
        )

    def vertex_grid(self) -> Grid:
        return Grid(self.theta, self.s_faces, self.phi_faces)


# ─────────────────────────────────────────────
# 🔌 Datenquellen
# ─────────────────────────────────────────────
def _interpolator(grid: Grid, values: np.ndarray) -> RegularGridInterpolator:
    return RegularGridInterpolator((grid.s, grid.phi), values, bounds_error=False, fill_value=None)


def field_sampler(u: VectorField) -> Sampler:
    """Lineare Interpolation eines Gitterfeldes an beliebigen (s, φ)."""
    interp_r = _interpolator(u.grid, u.u_r)
    interp_phi = _interpolator(u.grid, u.u_phi)

    def sample(s: np.ndarray, phi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        points = np.stack(np.broadcast_arrays(s, phi), axis=-1)
        return interp_r(points), interp_phi(points)

    return sample


def edge_sampler(g: BoundaryData) -> EdgeSampler:
    def sample(s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return np.interp(s, g.grid.s, g.at_zero), np.interp(s, g.grid.s, g.at_theta)

    return sample


def _as_sampler(f: Union[VectorField, Sampler, None]) -> Optional[Sampler]:
    if f is None or callable(f):
        return f
    return field_sampler(f)


def _as_edge_sampler(g: Union[BoundaryData, EdgeSampler, None]) -> Optional[EdgeSampler]:
    if g is None or callable(g):
        return g
    return edge_sampler(g)


# ─────────────────────────────────────────────
# 🧮 Assemblierung
# ─────────────────────────────────────────────
class _System:
    """Index-Buchhaltung und COO-Einträge; bekannte Werte wandern in die rechte Seite."""

    def __init__(self, domain: TruncatedWedge, g0: np.ndarray, g_theta: np.ndarray, ur_ends: Tuple[np.ndarray, np.ndarray], uphi_ends: Tuple[np.ndarray, np.ndarray]):
        self.domain = domain
        self.ns, self.nphi = domain.n_radial, domain.n_angular
        self.n_ur = (self.ns - 1) * self.nphi
        self.n_uphi = self.ns * (self.nphi - 1)
        self.n_p = self.ns * self.nphi - 1
        self.size = self.n_ur + self.n_uphi + self.n_p
        self.rows: List[int] = []
        self.cols: List[int] = []
        self.vals: List[float] = []
        self.rhs = np.zeros(self.size)
        self.g = (g0, g_theta)
        self.ur_ends = ur_ends
        self.uphi_ends = uphi_ends
        r_f = np.exp(domain.s_faces)
        half = 0.5
        inv = 1.0 / (r_f * domain.dphi)
        # Geisterwert u_g = a·g + b·u_in aus ½(u_g + u_in) ± (u_in − u_g)/(rΔφ) = g
        self.ghost_a = 1.0 / (half + inv)
        self.ghost_b = -(half - inv) / (half + inv)

    def ur(self, i: int, j: int) -> int:
        return (i - 1) * self.nphi + j

    def uphi(self, i: int, j: int) -> int:
        return self.n_ur + i * (self.nphi - 1) + (j - 1)

    def p(self, i: int, j: int) -> int:
        return self.n_ur + self.n_uphi + i * self.nphi + j - 1

    def _put(self, row: int, col: int, value: float) -> None:
        self.rows.append(row)
        self.cols.append(col)
        self.vals.append(value)

    def add_ur(self, row: int, i: int, j: int, coeff: float) -> None:
        if i == 0 or i == self.ns:
            self.rhs[row] -= coeff * self.ur_ends[0 if i == 0 else 1][j]
            return
        if j == -1 or j == self.nphi:
            edge = 0 if j == -1 else 1
            inner = 0 if j == -1 else self.nphi - 1
            self.rhs[row] -= coeff * self.ghost_a[i] * self.g[edge][i]
            self._put(row, self.ur(i, inner), coeff * self.ghost_b[i])
            return
        self._put(row, self.ur(i, j), coeff)

    def add_uphi(self, row: int, i: int, j: int, coeff: float) -> None:
        if j == 0 or j == self.nphi:
            return
        if i == -1 or i == self.ns:
            end = 0 if i == -1 else 1
            self.rhs[row] -= coeff * 2.0 * self.uphi_ends[end][j]
            self._put(row, self.uphi(0 if i == -1 else self.ns - 1, j), -coeff)
            return
        self._put(row, self.uphi(i, j), coeff)

    def add_p(self, row: int, i: int, j: int, coeff: float) -> None:
        if i == 0 and j == 0:
            return
        self._put(row, self.p(i, j), coeff)

    def matrix(self) -> csc_matrix:
        return csc_matrix((self.vals, (self.rows, self.cols)), shape=(self.size, self.size))


def _assemble(system: _System, f_r: np.ndarray, f_phi: np.ndarray) -> None:
    d = system.domain
    ns, nphi = system.ns, system.nphi
    ds2, dp2 = d.ds**2, d.dphi**2
    r_f = np.exp(d.s_faces)
    r_c = np.exp(d.s_centers)

    # r-Impuls an den s-Flächen
    for i in range(1, ns):
        for j in range(nphi):
            row = system.ur(i, j)
            system.add_ur(row, i, j, 2.0 / ds2 + 2.0 / dp2 + 1.0)
            system.add_ur(row, i + 1, j, -1.0 / ds2)
            system.add_ur(row, i - 1, j, -1.0 / ds2)
            system.add_ur(row, i, j + 1, -1.0 / dp2)
            system.add_ur(row, i, j - 1, -1.0 / dp2)
            coeff = 2.0 * 0.5 / d.dphi
            for ii in (i - 1, i):
                system.add_uphi(row, ii, j + 1, coeff)
                system.add_uphi(row, ii, j, -coeff)
            system.add_p(row, i, j, r_f[i] / d.ds)
            system.add_p(row, i - 1, j, -r_f[i] / d.ds)
            system.rhs[row] += r_f[i] ** 2 * f_r[i, j]

    # φ-Impuls an den φ-Flächen
    for i in range(ns):
        for j in range(1, nphi):
            row = system.uphi(i, j)
            system.add_uphi(row, i, j, 2.0 / ds2 + 2.0 / dp2 + 1.0)
            system.add_uphi(row, i + 1, j, -1.0 / ds2)
            system.add_uphi(row, i - 1, j, -1.0 / ds2)
            system.add_uphi(row, i, j + 1, -1.0 / dp2)
            system.add_uphi(row, i, j - 1, -1.0 / dp2)
            coeff = -2.0 * 0.5 / d.dphi
            for ii in (i, i + 1):
                system.add_ur(row, ii, j, coeff)
                system.add_ur(row, ii, j - 1, -coeff)
            system.add_p(row, i, j, r_c[i] / d.dphi)
            system.add_p(row, i, j - 1, -r_c[i] / d.dphi)
            system.rhs[row] += r_c[i] ** 2 * f_phi[i, j]

    # Kontinuität in den Zellen, Zelle (0, 0) entfällt mit dem fixierten Druck
    for i in range(ns):
        for j in range(nphi):
            if i == 0 and j == 0:
                continue
            row = system.p(i, j)
            system.add_ur(row, i + 1, j, r_f[i + 1] / d.ds)
            system.add_ur(row, i, j, -r_f[i] / d.ds)
            system.add_uphi(row, i, j + 1, r_c[i] / d.dphi)
            system.add_uphi(row, i, j, -r_c[i] / d.dphi)


def _condition_estimate(A: csc_matrix, lu) -> float:
    n = A.shape[0]
    inverse = LinearOperator((n, n), matvec=lu.solve, rmatvec=lambda x: lu.solve(x, trans="T"), dtype=float)
    return float(onenormest(A) * onenormest(inverse))


# ─────────────────────────────────────────────
# 🔧 Löser
# ─────────────────────────────────────────────
@dataclass
class StaggeredSolution:
    """Rohwerte auf den versetzten Positionen (inklusive bekannter Rand- und Geisterwerte)."""

    domain: TruncatedWedge
    u_r: np.ndarray
    u_phi: np.ndarray
    p: np.ndarray
    diagnostics: Dict[str, float]


def _unpack(system: _System, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    ns, nphi = system.ns, system.nphi
    u_r = np.zeros((ns + 1, nphi + 2))
    u_r[1:ns, 1:-1] = x[: system.n_ur].reshape(ns - 1, nphi)
    u_r[0, 1:-1], u_r[ns, 1:-1] = system.ur_ends
    for i in range(1, ns):
        u_r[i, 0] = system.ghost_a[i] * system.g[0][i] + system.ghost_b[i] * u_r[i, 1]
        u_r[i, -1] = system.ghost_a[i] * system.g[1][i] + system.ghost_b[i] * u_r[i, -2]
    # Ecken: Kantenwert aus den Nachbarn extrapoliert
    for i in (0, ns):
        u_r[i, 0] = 2.0 * u_r[i, 1] - u_r[i, 2]
        u_r[i, -1] = 2.0 * u_r[i, -2] - u_r[i, -3]

    u_phi = np.zeros((ns + 2, nphi + 1))
    u_phi[1:-1, 1:nphi] = x[system.n_ur : system.n_ur + system.n_uphi].reshape(ns, nphi - 1)
    u_phi[0, 1:nphi] = system.uphi_ends[0][1:nphi]
    u_phi[-1, 1:nphi] = system.uphi_ends[1][1:nphi]

    p = np.zeros(ns * nphi)
    p[1:] = x[system.n_ur + system.n_uphi :]
    return u_r, u_phi, p.reshape(ns, nphi)


def fd_solve_staggered(
    f: Union[VectorField, Sampler, None],
    g: Union[BoundaryData, EdgeSampler, None],
    domain: TruncatedWedge,
) -> StaggeredSolution:
    d = domain
    f_sample = _as_sampler(f)
    g_sample = _as_edge_sampler(g)
    s_f, s_c, phi_f, phi_c = d.s_faces, d.s_centers, d.phi_faces, d.phi_centers

    if f_sample is not None:
        f_r, _ = f_sample(s_f[:, None], phi_c[None, :])
        _, f_phi = f_sample(s_c[:, None], phi_f[None, :])
    else:
        f_r = np.zeros((s_f.size, phi_c.size))
        f_phi = np.zeros((s_c.size, phi_f.size))
    g0, g_theta = g_sample(s_f) if g_sample is not None else (np.zeros(s_f.size), np.zeros(s_f.size))

    if d.boundary == "reference":
        ends = np.array([d.s_a, d.s_b])
        ur_ends, _ = d.reference(ends[:, None], phi_c[None, :])
        _, uphi_ends = d.reference(ends[:, None], phi_f[None, :])
        ur_pair = (np.asarray(ur_ends[0], dtype=float), np.asarray(ur_ends[1], dtype=float))
        uphi_pair = (np.asarray(uphi_ends[0], dtype=float), np.asarray(uphi_ends[1], dtype=float))
    else:
        ur_pair = (np.zeros(phi_c.size), np.zeros(phi_c.size))
        uphi_pair = (np.zeros(phi_f.size), np.zeros(phi_f.size))

    system = _System(d, np.asarray(g0, dtype=float), np.asarray(g_theta, dtype=float), ur_pair, uphi_pair)
    _assemble(system, np.asarray(f_r, dtype=float), np.asarray(f_phi, dtype=float))
    A = system.matrix()
    try:
        lu = splu(A)
    except RuntimeError as exc:
        raise ConvergenceError(
            "❌ FD-System singulär", {"size": system.size, "condition_estimate": math.inf}
        ) from exc
    x = lu.solve(system.rhs)
    scale = max(float(np.max(np.abs(system.rhs))), 1e-300)
    residual = float(np.max(np.abs(A @ x - system.rhs))) / scale if np.any(system.rhs) else 0.0
    if not np.all(np.isfinite(x)) or residual > SOLVE_RESIDUAL_LIMIT:
        raise ConvergenceError(
            f"❌ FD-System schlecht konditioniert (Residuum {residual:.2e})",
            {"residual": residual, "condition_estimate": _condition_estimate(A, lu)},
        )

    u_r, u_phi, p = _unpack(system, x)
    logger.info(f"✅ FD-Orakel gelöst: {d.n_radial}×{d.n_angular} Zellen, {system.size} Unbekannte")
    return StaggeredSolution(d, u_r, u_phi, p, {"solve_residual": residual, "unknowns": float(system.size)})


def to_vertices(solution: StaggeredSolution) -> Tuple[VectorField, ScalarField]:
    """Interpolation aller Größen auf die Gitterknoten (s_Flächen × φ_Flächen)."""
    d = solution.domain
    grid = d.vertex_grid()
    s, phi = grid.s, grid.phi
    points = np.stack(np.meshgrid(s, phi, indexing="ij"), axis=-1)

    phi_ext = np.concatenate([[-0.5 * d.dphi], d.phi_centers, [d.theta + 0.5 * d.dphi]])
    u_r = RegularGridInterpolator((d.s_faces, phi_ext), solution.u_r)(points)
    s_ext = np.concatenate([[d.s_a], d.s_centers, [d.s_b]])
    # äußere Zeilen tragen die Dirichlet-Werte bei s_a, s_b
    u_phi = RegularGridInterpolator((s_ext, d.phi_faces), solution.u_phi)(points)
    p = RegularGridInterpolator((d.s_centers, d.phi_centers), solution.p, bounds_error=False, fill_value=None)(points)
    return VectorField(grid, u_r, u_phi), ScalarField(grid, p)


def fd_solve(
    f: Union[VectorField, Sampler, None],
    g: Union[BoundaryData, EdgeSampler, None],
    domain: TruncatedWedge,
) -> Tuple[VectorField, ScalarField]:
    """
    Löst das Navier-Slip-Stokes-System auf dem Ringsektor. f und g sind
    Gitterfelder (werden linear interpoliert) oder Funktionen von (s, φ) bzw. s.
    Rückgabe auf dem Knotengitter; der Druck ist bis auf die Fixierung bestimmt.
    """
    return to_vertices(fd_solve_staggered(f, g, domain))


# ─────────────────────────────────────────────
# 📏 Vergleich
# ─────────────────────────────────────────────
def buffered_region(domain: TruncatedWedge, buffer: float = 0.2) -> Tuple[float, float]:
    """Teilring ohne je `buffer` der log-Länge an beiden künstlichen Rändern."""
    if buffer < 0.2:
        raise AdmissibilityError(f"❌ Pufferzone {buffer} unter 20 %", {"buffer": buffer})
    length = domain.s_b - domain.s_a
    return math.exp(domain.s_a + buffer * length), math.exp(domain.s_b - buffer * length)


def _resample(u: VectorField, grid: Grid) -> VectorField:
    if u.grid.same_as(grid):
        return u
    points = np.stack(np.meshgrid(grid.s, grid.phi, indexing="ij"), axis=-1)
    sample = field_sampler(u)
    u_r, u_phi = sample(points[..., 0], points[..., 1])
    return VectorField(grid, u_r, u_phi)


def compare(
    uA: VectorField,
    uB: VectorField,
    region: Tuple[float, float],
    norm_kind: NormKind = "field_alpha",
    alpha: float = 0.5,
    relative: bool = False,
) -> float:
    """
    Gewichtete Abweichung ‖uA − uB‖ auf r ∈ region, uB wird bei Bedarf auf das
    Gitter von uA interpoliert. relative=True teilt durch ‖uA‖ auf derselben Region.
    """
    grid = uA.grid
    if not math.isclose(grid.theta, uB.grid.theta, abs_tol=1e-12):
        raise GridMismatchError("❌ Vergleich über verschiedene Öffnungswinkel", {"A": grid.theta, "B": uB.grid.theta})
    r_lo, r_hi = region
    rows = (grid.r >= r_lo) & (grid.r <= r_hi)
    if int(np.count_nonzero(rows)) < 3:
        raise GridMismatchError(
            f"❌ Vergleichsregion [{r_lo:.3g}, {r_hi:.3g}] enthält zu wenige Gitterzeilen",
            {"r_lo": r_lo, "r_hi": r_hi, "rows": int(np.count_nonzero(rows))},
        )
    diff = uA - _resample(uB, grid)
    value = _region_norm(diff, rows, norm_kind, alpha)
    if not relative:
        return value
    base = _region_norm(uA, rows, norm_kind, alpha)
    return value / base if base > 0.0 else (0.0 if value == 0.0 else math.inf)


def _region_norm(u: VectorField, rows: np.ndarray, norm_kind: NormKind, alpha: float) -> float:
    grid = u.grid
    mask = np.zeros(grid.shape)
    mask[rows, :] = 1.0
    if norm_kind == "max":
        return float(np.max(np.abs(u.stacked()[:, rows, :])))
    if norm_kind == "field_alpha":
        total = sum(integrate_domain(mask * c**2, grid, 2.0 - 2.0 * alpha) for c in (u.u_r, u.u_phi))
        return math.sqrt(total)
    total = 0.0
    for comp in (u.u_r, u.u_phi):
        for j, ell in ((1, 0), (0, 1)):
            total += integrate_domain(mask * mixed_derivative(comp, grid, j, ell) ** 2, grid, -2.0 * alpha)
    return math.sqrt(total)


def observed_order(errors: Sequence[float], factor: float = 2.0) -> List[float]:
    """log(e_k / e_{k+1}) / log(factor) für aufeinanderfolgende Verfeinerungen."""
    orders: List[float] = []
    for coarse, fine in zip(errors, errors[1:]):
        if coarse <= 0.0 or fine <= 0.0:
            orders.append(math.nan)
        else:
            orders.append(math.log(coarse / fine) / math.log(factor))
    return orders
