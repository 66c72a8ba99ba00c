"""
──────────────────────────────────────────────
🌱 solver/polynomial.py
Polynomiales Spitzenproblem, Stromfunktion, Lokalisierung mit ζ
──────────────────────────────────────────────
Mit u = Σ u⁽ʲ⁾(φ) rʲ, p = Σ p⁽ʲ⁾(φ) rʲ, f = Σ f⁽ʲ⁾(φ) rʲ zerfällt Stokes
in eine Hierarchie von Winkelproblemen. Stufe j ist das Modenproblem bei
λ = j mit F = f⁽ʲ⁻²⁾, P = p⁽ʲ⁻¹⁾ und den verschobenen Navier-Daten

    ∂_φu_r⁽ʲ⁾(0) = u_r⁽ʲ⁻¹⁾(0),   ∂_φu_r⁽ʲ⁾(θ) = −u_r⁽ʲ⁻¹⁾(θ).

u⁽⁰⁾ = u⁽¹⁾ = 0, p⁽⁰⁾ = 0 durch die Normierung 𝓟_p(0) = 0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Literal, Optional, Tuple

import numpy as np

from models.config import WedgeConfig
from models.fields import AngularPolynomial, BoundaryData, Grid, ScalarField, VectorField
from solver import kernels
from solver.freeslip import ModeSolution, solve_mode, solve_mode_fourier
from solver.polar_core import ZETA, Cutoff, divergence, gradient, laplacian_vector, polynomial_norm
from utils.errors import AdmissibilityError, ConfigError, ConsistencyError, DecayError, GridMismatchError
from utils.finite_diff import differentiate

logger = logging.getLogger(__name__)

Representation = Literal["fourier", "green"]

STREAM_TOLERANCE = 1e-5


# ─────────────────────────────────────────────
# 🧩 Zerlegung f = ζ𝓟_f + f₁
# ─────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class TipDecomposition:
    polynomial_part: AngularPolynomial
    regular_part: VectorField
    cutoff: Cutoff
    n: int

    def reconstruct(self) -> VectorField:
        """ζ·𝓟_f + f₁ auf dem Gitter des regulären Anteils."""
        grid = self.regular_part.grid
        values = self.polynomial_part.evaluate(grid) * self.cutoff(grid.r)[None, :, None]
        return self.regular_part + VectorField(grid, values[0], values[1])


def _angular_grid(poly: AngularPolynomial, grid: Optional[Grid], config: WedgeConfig) -> Grid:
    grid = grid or Grid.from_spec(config.grid, config.theta)
    if poly.phi.size != grid.phi.size or not np.allclose(poly.phi, grid.phi, atol=1e-12):
        raise GridMismatchError(
            "❌ Winkelgitter des Polynoms passt nicht",
            {"poly": poly.phi.size, "grid": grid.phi.size},
        )
    return grid


def degree_bound(config: WedgeConfig) -> float:
    """Obergrenze (1−ε)π/θ − 1 für den Grad n."""
    return (1.0 - config.epsilon) * math.pi / config.theta - 1.0


def divergence_defect(P_u: AngularPolynomial) -> float:
    """max_j ‖(j+1)u_r⁽ʲ⁾ + ∂_φu_φ⁽ʲ⁾‖_∞ relativ, ohne die einseitigen Randsterne."""
    if P_u.is_zero():
        return 0.0
    h = float(P_u.phi[1] - P_u.phi[0])
    worst = 0.0
    for j in range(P_u.degree + 1):
        u_r, u_phi = P_u.coefficient(j)
        residual = (j + 1) * u_r + differentiate(u_phi, h, axis=-1)
        scale = max(float(np.max(np.abs(u_r))) * (j + 1), float(np.max(np.abs(u_phi))), 1e-300)
        if np.any(u_r) or np.any(u_phi):
            worst = max(worst, float(np.max(np.abs(residual[2:-2]))) / scale)
    return worst


# ─────────────────────────────────────────────
# 🌀 Stromfunktion
# ─────────────────────────────────────────────
def stream_from_velocity_poly(P_u: AngularPolynomial, tol: float = STREAM_TOLERANCE) -> AngularPolynomial:
    """
    𝓟_ψ = Σ ψ⁽ʲ⁺¹⁾ r^{j+1} mit ψ⁽ʲ⁺¹⁾(φ) = −∫_0^φ u_r⁽ʲ⁾. Prüft danach
    −∂_φψ⁽ʲ⁺¹⁾ = u_r⁽ʲ⁾ und (j+1)ψ⁽ʲ⁺¹⁾ = u_φ⁽ʲ⁾ je Koeffizient.
    """
    if not P_u.is_vector:
        raise ConsistencyError("❌ Stromfunktion braucht ein Vektorpolynom", {})
    coeffs = np.zeros((P_u.degree + 2, P_u.phi.size))
    if P_u.is_zero():
        return AngularPolynomial(P_u.theta, P_u.phi, coeffs)

    h = float(P_u.phi[1] - P_u.phi[0])
    defect = divergence_defect(P_u)
    if defect > tol:
        raise ConsistencyError(
            f"❌ Geschwindigkeitspolynom nicht divergenzfrei (Defekt {defect:.2e})",
            {"defect": defect, "tolerance": tol},
        )

    for j in range(P_u.degree + 1):
        u_r, u_phi = P_u.coefficient(j)
        psi = -kernels.cumulative_from_start(u_r, h)
        scale = max(float(np.max(np.abs(u_r))), float(np.max(np.abs(u_phi))), 1e-300)
        radial_gap = float(np.max(np.abs((-differentiate(psi, h, axis=-1) - u_r)[2:-2]))) / scale
        angular_gap = float(np.max(np.abs((j + 1) * psi - u_phi))) / scale
        if np.any(u_r) or np.any(u_phi):
            if max(radial_gap, angular_gap) > tol:
                raise ConsistencyError(
                    f"❌ ∇⊥𝓟_ψ ≠ 𝓟_u bei j={j}",
                    {"j": j, "radial_gap": radial_gap, "angular_gap": angular_gap},
                )
        coeffs[j + 1] = psi
    return AngularPolynomial(P_u.theta, P_u.phi, coeffs)


def localize_velocity(P_u: AngularPolynomial, grid: Grid, zeta: Cutoff = ZETA) -> VectorField:
    """Q_u = ∇⊥(ζ𝓟_ψ) = ζ𝓟_u + 𝓟_ψ ζ′(r) e_φ."""
    if P_u.is_zero():
        return VectorField.zeros(grid)
    psi = stream_from_velocity_poly(P_u)
    r = grid.r
    poly = P_u.evaluate(grid)
    z = zeta(r)[:, None]
    z1 = zeta.derivative(r, 1)[:, None]
    return VectorField(grid, z * poly[0], z * poly[1] + z1 * psi.evaluate(grid))


# ─────────────────────────────────────────────
# 🔁 Rekursion
# ─────────────────────────────────────────────
def _stage(
    j: int,
    F_r: np.ndarray,
    F_phi: np.ndarray,
    edges: Tuple[float, float],
    grid: Grid,
    representation: Representation,
    sin_tolerance: float,
) -> ModeSolution:
    lam = np.array([float(j)])
    if representation == "fourier":
        return solve_mode_fourier(lam, F_r[None], F_phi[None], grid, g_hat_edges=edges, sin_tolerance=sin_tolerance)
    return solve_mode(lam, F_r[None], F_phi[None], edges, grid, sin_tolerance=sin_tolerance)


def pressure_constant_defect(j: int, p_prev: np.ndarray, F_r: np.ndarray, u_r_prev: np.ndarray, dphi: float) -> float:
    """(j−1)∫p⁽ʲ⁻¹⁾ − ∫f_r⁽ʲ⁻²⁾ + u_r⁽ʲ⁻¹⁾(θ) + u_r⁽ʲ⁻¹⁾(0), relativ."""
    lhs = (j - 1) * float(kernels.integrate_angle(p_prev, dphi))
    rhs = float(kernels.integrate_angle(F_r, dphi)) - float(u_r_prev[-1]) - float(u_r_prev[0])
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0)


def solve_polynomial_problem(
    P_f: AngularPolynomial,
    n: int,
    config: WedgeConfig,
    grid: Optional[Grid] = None,
    representation: Representation = "fourier",
    report: Optional[Dict[str, float]] = None,
) -> Tuple[AngularPolynomial, AngularPolynomial]:
    """
    Löst die Spitzenhierarchie für 2 ≤ j ≤ n. P_f hat höchstens Grad n−2;
    Rückgabe (𝓟_u vom Grad n, 𝓟_p vom Grad n−1). In `report` landen die
    Residuen der Stufen, falls übergeben.
    """
    bound = degree_bound(config)
    if not 2 <= n <= bound:
        raise AdmissibilityError(
            f"❌ Grad n={n} außerhalb [2, {bound:.3f}]",
            {"n": n, "bound": bound, "theta": config.theta, "epsilon": config.epsilon},
        )
    if not P_f.is_vector:
        raise ConsistencyError("❌ 𝓟_f muss vektorwertig sein", {})
    if P_f.degree > n - 2:
        raise AdmissibilityError(
            f"❌ 𝓟_f hat Grad {P_f.degree} > n−2 = {n - 2}", {"degree": P_f.degree, "n": n}
        )
    grid = _angular_grid(P_f, grid, config)
    na = grid.phi.size

    u_coeffs = np.zeros((n + 1, 2, na))
    p_coeffs = np.zeros((n, na))
    stages: Dict[str, float] = {}

    if not P_f.is_zero():
        for j in range(2, n + 1):
            F_r, F_phi = P_f.coefficient(j - 2)
            u_r_prev = u_coeffs[j - 1, 0]
            edges = (float(u_r_prev[0]), -float(u_r_prev[-1]))
            if not (np.any(F_r) or np.any(F_phi) or any(edges)):
                continue
            sol = _stage(j, F_r.astype(complex), F_phi.astype(complex), edges, grid, representation, config.sin_tolerance)
            u_coeffs[j, 0] = sol.u_r[0].real
            u_coeffs[j, 1] = sol.u_phi[0].real
            p_coeffs[j - 1] = sol.p[0].real
            stages[f"pressure_constant_{j}"] = pressure_constant_defect(j, p_coeffs[j - 1], F_r, u_r_prev, grid.dphi)
            stages[f"divergence_{j}"] = sol.divergence_defect()
            logger.debug(f"🌱 Stufe j={j}: ‖u⁽ʲ⁾‖∞ = {float(np.max(np.abs(u_coeffs[j]))):.3e}")

    # 𝓟_p(0) = 0: p⁽⁰⁾ bleibt null
    P_u = AngularPolynomial(grid.theta, grid.phi, u_coeffs)
    P_p = AngularPolynomial(grid.theta, grid.phi, p_coeffs)
    if report is not None:
        report.update(stages)
        report.update(polynomial_residuals(P_u, P_p, P_f))
    logger.info(f"✅ Spitzenpolynom gelöst: n={n}, Darstellung {representation}")
    return P_u, P_p


def polynomial_residuals(P_u: AngularPolynomial, P_p: AngularPolynomial, P_f: AngularPolynomial) -> Dict[str, float]:
    """Residuen der Hierarchie je Gleichung, maximiert über j (Differenzen in φ, Kantenbereich ausgespart)."""
    h = float(P_u.phi[1] - P_u.phi[0])
    worst = {"radial": 0.0, "angular": 0.0, "divergence": 0.0, "normal": 0.0, "navier": 0.0}
    scale = max(float(np.max(np.abs(P_f.coefficients))) if P_f.coefficients.size else 0.0, 1e-300)
    for j in range(2, P_u.degree + 1):
        u_r, u_phi = P_u.coefficient(j)
        F_r, F_phi = P_f.coefficient(j - 2)
        p = P_p.coefficient(j - 1)
        d_r = differentiate(u_r, h, axis=-1)
        d_phi_ = differentiate(u_phi, h, axis=-1)
        radial = -((j**2 - 1) * u_r + differentiate(u_r, h, axis=-1, order=2) - 2.0 * d_phi_) + (j - 1) * p - F_r
        angular = -((j**2 - 1) * u_phi + differentiate(u_phi, h, axis=-1, order=2) + 2.0 * d_r) + differentiate(p, h, axis=-1) - F_phi
        prev = P_u.coefficient(j - 1)[0]
        worst["radial"] = max(worst["radial"], float(np.max(np.abs(radial[3:-3]))) / scale)
        worst["angular"] = max(worst["angular"], float(np.max(np.abs(angular[3:-3]))) / scale)
        worst["divergence"] = max(worst["divergence"], float(np.max(np.abs((j + 1) * u_r + d_phi_))) / scale)
        worst["normal"] = max(worst["normal"], max(abs(float(u_phi[0])), abs(float(u_phi[-1]))) / scale)
        worst["navier"] = max(
            worst["navier"],
            max(abs(float(d_r[0] - prev[0])), abs(float(d_r[-1] + prev[-1]))) / scale,
        )
    return {f"polynomial_{key}": value for key, value in worst.items()}


def polynomial_estimate_ratio(P_u: AngularPolynomial, P_p: AngularPolynomial, P_f: AngularPolynomial, M: int = 0) -> float:
    """(‖𝓟_u‖_{P_{n,M+2}} + ‖𝓟_p‖_{P_{n−1,M+1}}) / ‖𝓟_f‖_{P_{n−2,M}}."""
    denominator = polynomial_norm(P_f, M)
    if denominator == 0.0:
        return 0.0
    return (polynomial_norm(P_u, M + 2) + polynomial_norm(P_p, M + 1)) / denominator


# ─────────────────────────────────────────────
# ✂️ Lokalisierungsreste
# ─────────────────────────────────────────────
def localization_remainders(
    P_u: AngularPolynomial,
    P_p: AngularPolynomial,
    P_psi: AngularPolynomial,
    grid: Grid,
    zeta: Cutoff = ZETA,
) -> Tuple[VectorField, BoundaryData]:
    """
    Q_f = −2(∇ζ·∇)𝓟_u − 𝓟_uΔζ − Δ(𝓟_ψ∇⊥ζ) + 𝓟_p∇ζ,
    Q_g = ζ rⁿ u_r⁽ⁿ⁾ auf den Kanten (der Stromfunktionsterm hat bei radialem ζ keine Tangentialspur).
    Alle Ableitungen von ζ und rʲ analytisch, nur ∂_φ der Koeffizienten per Differenzen.
    """
    if P_u.is_zero() and P_p.is_zero():
        return VectorField.zeros(grid), BoundaryData.zeros(grid)

    r = grid.r
    rc = r[:, None]
    z = zeta(r)[:, None]
    z1, z2, z3 = (zeta.derivative(r, k)[:, None] for k in (1, 2, 3))
    h = grid.dphi

    q_r = np.zeros(grid.shape)
    q_phi = np.zeros(grid.shape)
    for j in range(P_u.degree + 1):
        u_r, u_phi = P_u.coefficient(j)
        if not (np.any(u_r) or np.any(u_phi)):
            continue
        rj = r**j
        drj = j * r ** (j - 1) if j else np.zeros_like(r)
        lap_z = z2 + z1 / rc
        q_r += -2.0 * z1 * drj[:, None] * u_r[None] - lap_z * rj[:, None] * u_r[None]
        q_phi += -2.0 * z1 * drj[:, None] * u_phi[None] - lap_z * rj[:, None] * u_phi[None]

    for m in range(P_psi.degree + 1):
        psi = P_psi.coefficient(m)
        if not np.any(psi):
            continue
        rm = (r**m)[:, None]
        hm = rm * z1
        hm1 = m * r[:, None] ** (m - 1) * z1 + rm * z2 if m else z2
        hm2 = (m * (m - 1) * r[:, None] ** (m - 2) * z1 if m > 1 else 0.0) + (2.0 * m * r[:, None] ** (m - 1) * z2 if m else 0.0) + rm * z3
        dpsi = -P_u.coefficient(m - 1)[0]
        d2psi = differentiate(psi, h, axis=-1, order=2)
        # −Δ(0, w) mit w = ψ(φ)·h_m(r)
        q_r += 2.0 * hm * dpsi[None] / rc**2
        q_phi -= psi[None] * (hm2 + hm1 / rc) + hm * d2psi[None] / rc**2 - hm * psi[None] / rc**2

    for j in range(P_p.degree + 1):
        p = P_p.coefficient(j)
        if np.any(p):
            q_r += (r**j)[:, None] * z1 * p[None]

    n = P_u.degree
    top = P_u.coefficient(n)[0]
    tail = zeta(r) * r**n
    Q_g = BoundaryData(grid, tail * top[0], tail * top[-1])
    return VectorField(grid, q_r, q_phi), Q_g


def localized_residual(
    Q_u: VectorField,
    P_p: AngularPolynomial,
    P_f: AngularPolynomial,
    Q_f: VectorField,
    zeta: Cutoff = ZETA,
) -> Dict[str, float]:
    """−ΔQ_u + ∇(ζ𝓟_p) − ζ𝓟_f − Q_f und div Q_u auf dem Gitter (Differenzen, Randzeilen ausgespart)."""
    grid = Q_u.grid
    z = zeta(grid.r)[:, None]
    pressure = ScalarField(grid, z * P_p.evaluate(grid))
    forcing = P_f.evaluate(grid) * z[None]
    momentum = gradient(pressure) - laplacian_vector(Q_u)
    res = momentum.stacked() - forcing - Q_f.stacked()
    inner = (slice(None), slice(4, -4), slice(4, -4))
    scale = max(float(np.max(np.abs(momentum.stacked()[inner]))), 1e-300)
    div = divergence(Q_u).values[4:-4, 4:-4]
    return {
        "momentum": float(np.max(np.abs(res[inner]))) / scale,
        "divergence": float(np.max(np.abs(div))) / max(float(np.max(np.abs(Q_u.stacked()))), 1e-300),
    }


# ─────────────────────────────────────────────
# 📦 Taylor-Zerlegung
# ─────────────────────────────────────────────
def tip_decay_slope(values: np.ndarray, grid: Grid, alpha: float, k: int = 0, span: float = 1.0) -> float:
    """
    Steigung von log max_φ r^{1−α−k}|f| über die innerste Einheit in s.
    Positiv heißt abklingend zur Spitze hin, also endliche gewichtete Norm.
    """
    values = np.abs(np.asarray(values))
    amplitude = values.reshape(values.shape[0], -1).max(axis=1) if values.ndim > 1 else values
    amplitude = amplitude * np.exp((1.0 - alpha - k) * grid.s)
    peak = float(np.max(amplitude))
    if peak == 0.0:
        return math.inf
    stop = int(np.searchsorted(grid.s, grid.s[0] + span))
    stop = min(max(stop, 1), grid.s.size - 1)
    lo, hi = float(amplitude[0]), float(amplitude[stop])
    if lo <= 1e-300 * peak:
        return math.inf
    if hi <= 0.0:
        return -math.inf
    return (math.log(hi) - math.log(lo)) / float(grid.s[stop] - grid.s[0])


def taylor_split(
    f_poly_part: AngularPolynomial,
    f_regular: VectorField,
    n: int,
    alpha: float,
    M: int = 0,
    zeta: Cutoff = ZETA,
    slope_floor: float = 1e-3,
) -> TipDecomposition:
    """Verpackt (𝓟_f, f₁) und verwirft reguläre Anteile, deren gewichtete Norm an der Spitze divergiert."""
    if f_poly_part.degree > n:
        raise AdmissibilityError(
            f"❌ Polynomanteil hat Grad {f_poly_part.degree} > n={n}", {"degree": f_poly_part.degree, "n": n}
        )
    slope = tip_decay_slope(f_regular.stacked().transpose(1, 0, 2), f_regular.grid, alpha, M)
    if slope <= slope_floor:
        raise DecayError(
            f"❌ Regulärer Anteil wächst zur Spitze hin gegen das Gewicht (Steigung {slope:.3e})",
            {"slope": slope, "alpha": alpha, "M": M, "n": n},
        )
    return TipDecomposition(f_poly_part, f_regular, zeta, n)


def fit_tip_coefficients(
    field: VectorField,
    degree: int,
    r_max: float = 0.5,
    allow_fit: bool = False,
) -> AngularPolynomial:
    """
    Kleinste-Quadrate-Anpassung Σ a⁽ʲ⁾(φ)rʲ an die Knoten mit r ≤ r_max.
    Schlecht konditioniert; nur mit allow_fit=True.
    """
    if not allow_fit:
        raise ConfigError(
            "❌ Anpassung der Spitzenkoeffizienten ist gesperrt, Polynomanteil analytisch übergeben",
            {"allow_fit": False},
        )
    grid = field.grid
    mask = grid.r <= r_max
    if int(np.count_nonzero(mask)) <= degree + 1:
        raise ConfigError(
            f"❌ Zu wenige Knoten mit r ≤ {r_max} für Grad {degree}", {"nodes": int(np.count_nonzero(mask))}
        )
    vander = np.vander(grid.r[mask], degree + 1, increasing=True)
    coeffs = np.zeros((degree + 1, 2, grid.phi.size))
    for c, comp in enumerate((field.u_r, field.u_phi)):
        solution, *_ = np.linalg.lstsq(vander, comp[mask], rcond=None)
        coeffs[:, c, :] = solution
    cond = float(np.linalg.cond(vander))
    logger.warning(f"⚠️ Spitzenkoeffizienten angepasst, Kondition {cond:.2e}")
    return AngularPolynomial(grid.theta, grid.phi, coeffs)
