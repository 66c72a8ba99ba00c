"""
──────────────────────────────────────────────
⚖️ solver/variational.py
Bilinearformen B₁, B₂, B₃, Paarung ⟨g, v_r⟩_α, Variationsresiduum,
Druckrückgewinnung und das Testfunktionsproblem
──────────────────────────────────────────────
B = B₁ + s·B₂ + c₃·s·B₃ mit s = |α|θ³. Alle Integrale per Trapezregel
in (s = log r, φ); dx = r² ds dφ, Kantenmaß dr = r ds.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_simpson, trapezoid

from models.config import VariationalConfig, WedgeConfig
from models.fields import BoundaryData, Grid, ScalarField, VectorField
from solver.helmholtz import DEFAULT_GAMMA, commutator, project
from solver.mellin import check_decay, ensure_real, forward_values, inverse_values, make_line
from solver.polar_core import (
    ZETA,
    curl,
    d_phi,
    d_s,
    frakX_norm,
    gradient,
    integrate_domain,
    integrate_edges,
    laplacian_vector,
    radial_derivative,
)
from utils.errors import CoercivityError, ConsistencyError
from utils.finite_diff import derivative_matrix
from utils.workers import map_ordered

logger = logging.getLogger(__name__)

FormKind = Literal["B1", "B2", "B3", "B_total"]


def _scale(alpha: float, theta: float) -> float:
    return abs(alpha) * theta**3


# ─────────────────────────────────────────────
# 🧮 Quadratur-Bausteine
# ─────────────────────────────────────────────
def _scaled_gradient(u: VectorField) -> Tuple[np.ndarray, ...]:
    """r·∇u in Polarkomponenten (rr, rφ, φr, φφ)."""
    g = u.grid
    return (
        d_s(u.u_r, g),
        d_phi(u.u_r, g) - u.u_phi,
        d_s(u.u_phi, g),
        d_phi(u.u_phi, g) + u.u_r,
    )


def _contract(u: VectorField, v: VectorField) -> np.ndarray:
    """r²·∇u:∇v."""
    return sum(a * b for a, b in zip(_scaled_gradient(u), _scaled_gradient(v)))


def _dot(u: VectorField, v: VectorField) -> np.ndarray:
    return u.u_r * v.u_r + u.u_phi * v.u_phi


def _volume(values: np.ndarray, grid: Grid, power: float) -> float:
    """∫_Ω r^power · values dx."""
    return integrate_domain(values, grid, power + 2.0)


def _edges(at_zero: np.ndarray, at_theta: np.ndarray, grid: Grid, power: float) -> float:
    """Σ_Kanten ∫ r^power · values dr."""
    return integrate_edges((at_zero, at_theta), grid, power + 1.0)


def _flux_jump(du_r: np.ndarray, c_r: np.ndarray, grid: Grid) -> float:
    """∫_Ω r^{−2}∂_φ(∂_φu_r · c_r) dx = ∫ [∂_φu_r c_r]_0^θ ds."""
    product = du_r * c_r
    return float(trapezoid(product[:, -1] - product[:, 0], dx=grid.ds))


# ─────────────────────────────────────────────
# ⚖️ Bilinearformen
# ─────────────────────────────────────────────
def b1_terms(u: VectorField, v: VectorField, alpha: float, config: Optional[WedgeConfig] = None, gamma: float = DEFAULT_GAMMA) -> Dict[str, float]:
    g = u.grid
    g.check_same(v.grid)
    comm = commutator("weight", v, alpha, gamma, config)
    du_r = d_phi(u.u_r, g)
    return {
        "T1_1": _edges(v.u_r[:, 0] * u.u_r[:, 0], v.u_r[:, -1] * u.u_r[:, -1], g, -2.0 * alpha),
        "T1_2": _volume(_contract(v, u), g, -2.0 * alpha - 2.0),
        "T1_3": -2.0 * alpha * _volume(_dot(v, radial_derivative(u)), g, -2.0 * alpha - 2.0),
        "T1_4": -_flux_jump(du_r, comm.u_r, g),
        "T1_5": _volume(_contract(comm, u), g, -2.0),
    }


def b2_terms(u: VectorField, v: VectorField, alpha: float, config: Optional[WedgeConfig] = None, gamma: float = DEFAULT_GAMMA) -> Dict[str, float]:
    g = u.grid
    g.check_same(v.grid)
    rv = radial_derivative(v)
    ru = radial_derivative(u)
    rrv = radial_derivative(v, 2)
    comm = commutator("weight", rrv, alpha, gamma, config)
    shifted = ru.u_r - (2.0 * alpha - 1.0) * u.u_r
    return {
        "T2_1": _edges(rv.u_r[:, 0] * shifted[:, 0], rv.u_r[:, -1] * shifted[:, -1], g, -2.0 * alpha),
        "T2_2": _volume(_contract(rv, ru), g, -2.0 * alpha - 2.0),
        "T2_3": -2.0 * alpha * _volume(_contract(rv, u), g, -2.0 * alpha - 2.0),
        "T2_4": 2.0 * alpha * _volume(_dot(rrv, ru), g, -2.0 * alpha - 2.0),
        "T2_5": _flux_jump(d_phi(u.u_r, g), comm.u_r, g),
        "T2_6": -_volume(_contract(comm, u), g, -2.0),
    }


def b3_terms(u: VectorField, v: VectorField, alpha: float, config: Optional[WedgeConfig] = None, gamma: float = DEFAULT_GAMMA) -> Dict[str, float]:
    g = u.grid
    g.check_same(v.grid)
    lap_v = laplacian_vector(v)
    comm = commutator("laplace", u, alpha, gamma, config)
    return {
        "T3_1": _volume(_dot(laplacian_vector(u), lap_v), g, 2.0 - 2.0 * alpha),
        "T3_2": _volume(_dot(comm, lap_v), g, 2.0 - 2.0 * alpha),
    }


def bilinear_terms(
    u: VectorField,
    v: VectorField,
    alpha: float,
    config: Optional[WedgeConfig] = None,
    gamma: float = DEFAULT_GAMMA,
) -> Dict[str, float]:
    """Alle T-Terme einzeln; Schlüssel T{Form}_{Index}."""
    terms: Dict[str, float] = {}
    terms.update(b1_terms(u, v, alpha, config, gamma))
    terms.update(b2_terms(u, v, alpha, config, gamma))
    terms.update(b3_terms(u, v, alpha, config, gamma))
    return terms


def combine(terms: Dict[str, float], kind: FormKind, alpha: float, theta: float, c3: float) -> float:
    b1 = sum(v for k, v in terms.items() if k.startswith("T1_"))
    b2 = sum(v for k, v in terms.items() if k.startswith("T2_"))
    b3 = sum(v for k, v in terms.items() if k.startswith("T3_"))
    if kind == "B1":
        return b1
    if kind == "B2":
        return b2
    if kind == "B3":
        return b3
    s = _scale(alpha, theta)
    return b1 + s * b2 + c3 * s * b3


def bilinear(
    kind: FormKind,
    u: VectorField,
    v: VectorField,
    alpha: float,
    config: Optional[WedgeConfig] = None,
    variational: Optional[VariationalConfig] = None,
    gamma: float = DEFAULT_GAMMA,
) -> float:
    variational = variational or VariationalConfig()
    if not (np.any(u.stacked()) and np.any(v.stacked())):
        return 0.0
    if kind == "B1":
        return combine(b1_terms(u, v, alpha, config, gamma), kind, alpha, u.grid.theta, variational.c3)
    if kind == "B2":
        return combine(b2_terms(u, v, alpha, config, gamma), kind, alpha, u.grid.theta, variational.c3)
    if kind == "B3":
        return combine(b3_terms(u, v, alpha, config, gamma), kind, alpha, u.grid.theta, variational.c3)
    return combine(bilinear_terms(u, v, alpha, config, gamma), kind, alpha, u.grid.theta, variational.c3)


def pairing_g(g_data: BoundaryData, v: VectorField, alpha: float) -> float:
    """⟨g, v_r⟩_α = ∫ r^{−2α} g v_r dr + s ∫ r^{−2α}((r∂_r − 2α + 1)g)(r∂_r v_r) dr."""
    grid = v.grid
    if not (np.any(g_data.at_zero) or np.any(g_data.at_theta)):
        return 0.0
    s = _scale(alpha, grid.theta)
    rv = d_s(v.u_r, grid)
    total = _edges(g_data.at_zero * v.u_r[:, 0], g_data.at_theta * v.u_r[:, -1], grid, -2.0 * alpha)
    shifted = []
    for edge in (g_data.at_zero, g_data.at_theta):
        shifted.append(d_s(edge[:, None], grid)[:, 0] - (2.0 * alpha - 1.0) * edge)
    total += s * _edges(shifted[0] * rv[:, 0], shifted[1] * rv[:, -1], grid, -2.0 * alpha)
    return total


# ─────────────────────────────────────────────
# 🧪 Testfelder und Residuum
# ─────────────────────────────────────────────
def bump_field(grid: Grid, k: int, center: float, width: float) -> VectorField:
    """
    ∇⊥ψ mit ψ = b(s) sin(kπφ/θ) und der Glocke b(s) = h(|s − c|/w).
    Über χ = ψ/r gilt u_r = −∂_φχ, u_φ = (∂_s + 1)χ; mit denselben Sternen wie
    in `divergence` verschwindet (∂_s + 1)u_r + ∂_φu_φ auch diskret.
    """
    x = (grid.s - center) / width
    b = ZETA.bump(np.abs(x))
    kappa = k * math.pi / grid.theta
    chi = (np.exp(-grid.s) * b)[:, None] * np.sin(kappa * grid.phi)[None, :]
    chi[:, 0] = 0.0
    chi[:, -1] = 0.0
    return VectorField(grid, -d_phi(chi, grid), d_s(chi, grid) + chi)


def bump_basis(grid: Grid, variational: Optional[VariationalConfig] = None) -> List[VectorField]:
    variational = variational or VariationalConfig()
    return [
        bump_field(grid, k, center, variational.test_width)
        for center in variational.test_centers
        for k in range(1, variational.test_modes + 1)
    ]


def tested_direction(v: VectorField, alpha: float, c3: float) -> VectorField:
    """v_test = v − s(r∂_r)²v − c₃s r²Δv."""
    s = _scale(alpha, v.grid.theta)
    r2_lap = laplacian_vector(v).scaled(v.grid.r_col**2)
    return v - radial_derivative(v, 2).scaled(s) - r2_lap.scaled(c3 * s)


def variational_residuals(
    u: VectorField,
    f: VectorField,
    g_data: BoundaryData,
    v_samples: Sequence[VectorField],
    alpha: float,
    config: Optional[WedgeConfig] = None,
    variational: Optional[VariationalConfig] = None,
    gamma: float = DEFAULT_GAMMA,
    max_workers: Optional[int] = None,
) -> List[Dict[str, float]]:
    """Je Testfeld: B(u,v), rechte Seite und Differenz."""
    variational = variational or VariationalConfig()
    grid = u.grid
    projected = project(f, gamma, config) if np.any(f.stacked()) else f

    def one(v: VectorField) -> Dict[str, float]:
        lhs = bilinear("B_total", u, v, alpha, config, variational, gamma)
        v_test = tested_direction(v, alpha, variational.c3)
        rhs = _volume(_dot(projected, v_test), grid, -2.0 * alpha) + pairing_g(g_data, v, alpha)
        return {"lhs": lhs, "rhs": rhs, "residual": abs(lhs - rhs)}

    return map_ordered(one, list(v_samples), max_workers)


def variational_residual(
    u: VectorField,
    f: VectorField,
    g_data: BoundaryData,
    v_samples: Sequence[VectorField],
    alpha: float,
    config: Optional[WedgeConfig] = None,
    variational: Optional[VariationalConfig] = None,
    gamma: float = DEFAULT_GAMMA,
    relative: bool = False,
) -> float:
    """max_v |B(u,v) − (ℙf, r^{−2α}v_test) − ⟨g,v_r⟩_α|, wahlweise relativ zu max(|B|, |rechts|)."""
    rows = variational_residuals(u, f, g_data, v_samples, alpha, config, variational, gamma)
    if not rows:
        return 0.0
    if relative:
        return max(row["residual"] / (max(abs(row["lhs"]), abs(row["rhs"])) or 1.0) for row in rows)
    return max(row["residual"] for row in rows)


# ─────────────────────────────────────────────
# 📊 Koerzivität und Beschränktheit
# ─────────────────────────────────────────────
def random_admissible(grid: Grid, rng: np.random.Generator, variational: Optional[VariationalConfig] = None) -> VectorField:
    """Zufällige Linearkombination der Testbasis (divergenzfrei, tangential)."""
    basis = bump_basis(grid, variational)
    weights = rng.standard_normal(len(basis))
    out = VectorField.zeros(grid)
    for w, field in zip(weights, basis):
        out = out + field.scaled(float(w))
    return out


def coercivity_ratio(u: VectorField, alpha: float, config: Optional[WedgeConfig] = None, variational: Optional[VariationalConfig] = None) -> float:
    """B(u,u)/‖u‖²_𝔛."""
    norm = frakX_norm(u, alpha, u.grid.theta)
    if norm == 0.0:
        return math.inf
    return bilinear("B_total", u, u, alpha, config, variational) / norm**2


def boundedness_ratio(u: VectorField, v: VectorField, alpha: float, config: Optional[WedgeConfig] = None, variational: Optional[VariationalConfig] = None) -> float:
    """|B(u,v)|/(‖u‖_𝔛‖v‖_𝔛)."""
    denom = frakX_norm(u, alpha, u.grid.theta) * frakX_norm(v, alpha, v.grid.theta)
    if denom == 0.0:
        return 0.0
    return abs(bilinear("B_total", u, v, alpha, config, variational)) / denom


@dataclass
class CoercivityAudit:
    alpha: float
    theta: float
    c3: float
    coercivity: List[float]
    boundedness: List[float]

    @property
    def coercivity_constant(self) -> float:
        return min(self.coercivity) if self.coercivity else math.nan

    @property
    def boundedness_constant(self) -> float:
        return max(self.boundedness) if self.boundedness else math.nan

    def row(self) -> Dict[str, float]:
        return {
            "alpha": self.alpha,
            "theta": self.theta,
            "c3": self.c3,
            "coercivity": self.coercivity_constant,
            "boundedness": self.boundedness_constant,
        }


def coercivity_audit(
    grid: Grid,
    alpha: float,
    samples: int,
    config: Optional[WedgeConfig] = None,
    variational: Optional[VariationalConfig] = None,
    seed: int = 0,
    max_workers: Optional[int] = None,
) -> CoercivityAudit:
    variational = variational or VariationalConfig()
    rng = np.random.default_rng(seed)
    pairs = [(random_admissible(grid, rng, variational), random_admissible(grid, rng, variational)) for _ in range(samples)]

    def one(pair: Tuple[VectorField, VectorField]) -> Tuple[float, float]:
        u, v = pair
        return coercivity_ratio(u, alpha, config, variational), boundedness_ratio(u, v, alpha, config, variational)

    results = map_ordered(one, pairs, max_workers)
    audit = CoercivityAudit(alpha, grid.theta, variational.c3, [r[0] for r in results], [r[1] for r in results])
    logger.info(
        f"📊 Koerzivität α={alpha}, θ={grid.theta:.3f}: C_koerz={audit.coercivity_constant:.3e}, "
        f"C_beschr={audit.boundedness_constant:.3e}"
    )
    return audit


def coercivity_sweep(
    grid_for_theta,
    pairs: Sequence[Tuple[float, float]],
    samples: int,
    variational: Optional[VariationalConfig] = None,
    seed: int = 0,
) -> List[Dict[str, float]]:
    """Tabelle über (θ, α)-Paare; grid_for_theta(θ) liefert das Gitter."""
    return [coercivity_audit(grid_for_theta(theta), alpha, samples, None, variational, seed).row() for theta, alpha in pairs]


# ─────────────────────────────────────────────
# 🎚️ Modenkoeffizienten des Testfunktionsproblems
# ─────────────────────────────────────────────
def mode_coefficients(lam: np.ndarray, alpha: float, theta: float, c3: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    s = _scale(alpha, theta)
    lam = np.asarray(lam, dtype=complex)
    a1 = np.full(lam.shape, c3 * s, dtype=complex)
    a2 = c3 * s * ((lam + 1.0) ** 2 + (lam - 1.0) * (lam - 2.0 * alpha + 1.0)) + s * lam**2 - 1.0
    a3 = (lam - 2.0 * alpha + 1.0) * (lam + 1.0) * (c3 * s * (lam**2 - 1.0) + s * lam**2 - 1.0)
    return a1, a2, a3


def coefficient_sign_trend(t: np.ndarray, alpha: float, theta: float, c3: float, delta: float = 0.5) -> Dict[str, bool]:
    """Re a₁ > 0, Re a₂ < −c₃s t² − (1−δ), Re a₃ > c₃s t⁴/2 − (1+δ) auf λ = α + it."""
    s = _scale(alpha, theta)
    a1, a2, a3 = mode_coefficients(alpha + 1j * np.asarray(t, dtype=float), alpha, theta, c3)
    return {
        "a1_positive": bool(np.all(a1.real > 0.0)),
        "a2_negative": bool(np.all(a2.real < -c3 * s * t**2 - (1.0 - delta))),
        "a3_positive": bool(np.all(a3.real > 0.5 * c3 * s * t**4 - (1.0 + delta))),
    }


# ─────────────────────────────────────────────
# 🧷 Testfunktionsproblem
# ─────────────────────────────────────────────
def _collocation_matrices(lam: np.ndarray, grid: Grid, alpha: float, c3: float) -> np.ndarray:
    """a₁D⁴ + a₂D² + a₃I mit v = ∂_φv = 0 an beiden Kanten, Form (K, Na, Na)."""
    n = grid.phi.size
    h = grid.dphi
    D1 = derivative_matrix(n, h, 1)
    D2 = derivative_matrix(n, h, 2)
    D4 = derivative_matrix(n, h, 4)
    a1, a2, a3 = mode_coefficients(lam, alpha, grid.theta, c3)
    A = a1[:, None, None] * D4[None] + a2[:, None, None] * D2[None] + a3[:, None, None] * np.eye(n)[None]
    A[:, 0, :] = 0.0
    A[:, 0, 0] = 1.0
    A[:, -1, :] = 0.0
    A[:, -1, -1] = 1.0
    A[:, 1, :] = D1[0]
    A[:, -2, :] = D1[-1]
    return A


def solve_test_function_problem(
    w: VectorField,
    alpha: float,
    config: Optional[WedgeConfig] = None,
    variational: Optional[VariationalConfig] = None,
) -> Tuple[VectorField, ScalarField]:
    """
    r^{−2α}(v − s(r∂_r)²v − c₃s r²Δv) + ∇p = w, div v = 0, v = 0 am Rand.
    Je Mode auf Re λ = α eine Kollokation der Gleichung vierter Ordnung für v̂_φ.
    """
    variational = variational or VariationalConfig()
    grid = w.grid
    if not np.any(w.stacked()):
        return VectorField.zeros(grid), ScalarField.zeros(grid)
    decay_floor = config.decay_floor if config else 1e-8
    imag_tol = config.imag_tolerance if config else 1e-8
    c3 = variational.c3
    s = _scale(alpha, grid.theta)

    data = w.stacked().transpose(1, 0, 2) * np.exp(2.0 * alpha * grid.s)[:, None, None]
    check_decay(data, grid, alpha, decay_floor)
    line = make_line(grid, alpha)
    w_hat, _ = forward_values(data, grid, alpha, line=line)
    lam = line.lambdas
    lam_col = lam[:, None]
    n = grid.phi.size
    D1 = derivative_matrix(n, grid.dphi, 1)
    D2 = derivative_matrix(n, grid.dphi, 2)
    w_r, w_phi = w_hat[:, 0, :], w_hat[:, 1, :]

    shift = lam_col - 2.0 * alpha + 1.0
    rhs = (lam_col + 1.0) * (w_r @ D1.T - shift * w_phi)
    rhs[:, [0, -1, 1, -2]] = 0.0
    A = _collocation_matrices(lam, grid, alpha, c3)
    cond = float(np.max(np.linalg.cond(A)))
    if cond > variational.condition_limit:
        raise CoercivityError(
            f"❌ Kollokationsmatrix fast singulär (cond = {cond:.2e}), |αθ| zu groß?",
            {"condition": cond, "alpha": alpha, "theta": grid.theta, "c3": c3},
        )
    v_phi = np.linalg.solve(A, rhs[..., None])[..., 0]
    v_r = -(v_phi @ D1.T) / (lam_col + 1.0)

    pressure = (
        w_r
        - (1.0 - s * lam_col**2) * v_r
        + c3 * s * ((lam_col**2 - 1.0) * v_r + v_r @ D2.T - 2.0 * (v_phi @ D1.T))
    ) / shift

    velocity = ensure_real(inverse_values(np.stack([v_r, v_phi], axis=1), grid, line), imag_tol)
    p_scaled = ensure_real(inverse_values(pressure, grid, line), imag_tol)
    v = VectorField(grid, velocity[:, 0], velocity[:, 1])
    p = ScalarField(grid, p_scaled * np.exp((1.0 - 2.0 * alpha) * grid.s)[:, None])
    logger.info(f"🧷 Testfunktionsproblem gelöst: α={alpha}, max cond {cond:.2e}")
    return v, p


def dual_problem_residual(v: VectorField, p: ScalarField, w: VectorField, alpha: float, c3: float) -> Dict[str, float]:
    """Rückeinsetzen in die Gleichungen, innere Knoten, relativ zu ‖w‖_∞."""
    grid = v.grid
    weight = np.exp(-2.0 * alpha * grid.s)[:, None]
    lhs = tested_direction(v, alpha, c3).scaled(weight) + gradient(p)
    res = (lhs - w).stacked()[:, 4:-4, 4:-4]
    scale = float(np.max(np.abs(w.stacked()))) or 1.0
    div = (d_s(v.u_r, grid) + v.u_r + d_phi(v.u_phi, grid))[4:-4, 4:-4]
    v_scale = float(np.max(np.abs(v.stacked()))) or 1.0
    return {
        "momentum": float(np.max(np.abs(res))) / scale,
        "divergence": float(np.max(np.abs(div))) / v_scale,
        "edge": float(max(np.max(np.abs(v.stacked()[:, :, 0])), np.max(np.abs(v.stacked()[:, :, -1])))) / v_scale,
    }


# ─────────────────────────────────────────────
# 🫧 Druckrückgewinnung
# ─────────────────────────────────────────────
def pressure_recover(
    u: VectorField,
    f: VectorField,
    gamma: float = DEFAULT_GAMMA,
    config: Optional[WedgeConfig] = None,
    tolerance: Optional[float] = None,
    reference: Optional[Tuple[int, int]] = None,
) -> ScalarField:
    """
    ∇p = (I − ℙ)(Δu + f), entlang radialer Strahlen aufintegriert, ausgehend
    von der Winkellinie am Referenzknoten. Zweiter Weg (erst radial auf φ=0,
    dann im Winkel) muss übereinstimmen.
    """
    tolerance = tolerance if tolerance is not None else VariationalConfig().curl_tolerance
    grid = u.grid
    source = laplacian_vector(u) + f
    if not np.any(source.stacked()):
        return ScalarField.zeros(grid)
    grad = source - project(source, gamma, config)
    i0, j0 = reference or (grid.s.size // 2, 0)

    # r∂_r p = r·G_r und ∂_φ p = r·G_φ
    radial = grad.u_r * grid.r_col
    angular = grad.u_phi * grid.r_col
    along_s = cumulative_simpson(radial, dx=grid.ds, axis=0, initial=0.0)
    along_s = along_s - along_s[i0 : i0 + 1]
    along_phi = cumulative_simpson(angular, dx=grid.dphi, axis=1, initial=0.0)

    first = along_phi[i0][None, :] + along_s
    second = along_s[:, 0:1] + along_phi
    p = first - first[i0, j0]
    gap_field = (second - second[i0, j0]) - p

    scale = float(np.max(np.abs(p))) or 1.0
    inner = (slice(4, -4), slice(None))
    gap = float(np.max(np.abs(gap_field[inner]))) / scale
    rot = curl(grad).values * grid.r_col
    grad_scale = float(np.max(np.abs(grad.stacked() * grid.r_col[None]))) or 1.0
    rot_rel = float(np.max(np.abs(rot[4:-4, 4:-4]))) / grad_scale
    if gap > tolerance or rot_rel > tolerance:
        raise ConsistencyError(
            f"❌ Druckgradient nicht wegunabhängig: Lücke {gap:.2e}, Rotation {rot_rel:.2e}",
            {"path_gap": gap, "curl": rot_rel, "tolerance": tolerance},
        )
    logger.debug(f"🫧 Druck rekonstruiert, Weglücke {gap:.2e}")
    return ScalarField(grid, p)
