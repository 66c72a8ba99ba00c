"""
──────────────────────────────────────────────
🌊 solver/freeslip.py
Stokes im Keil mit inhomogenen Free-Slip-Randbedingungen, modenweise
──────────────────────────────────────────────
Physikalisch:  −Δu + ∇p = f,  div u = 0,  u_φ = 0,  ∂_φu_r = 𝔤 auf beiden Kanten.

Mit F = f̂(λ−2), P = p̂(λ−1) und 𝔣̂ = (λ+1)∂_φF_r − (λ²−1)F_φ gilt je Mode

    L û_φ = 𝔣̂,   L = ∂⁴ + 2(λ²+1)∂² + (λ²−1)²,
    û_φ = 0,  ∂²û_φ = −(λ+1)𝔤̂  auf den Kanten,
    û_r = −∂_φû_φ/(λ+1),
    P = [(λ+1)²û_r + ∂²û_r + F_r]/(λ−1).

Green-Funktion (L G = −δ, G = ∂²G = 0 am Rand), Terme μ = λ ∓ 1:
    G = Σ c_μ sin(μ(θ−φ)) sin(μφ′)  für φ′ ≤ φ,
    c_{λ−1} = 1/(4(λ−1)λ sin((λ−1)θ)),  c_{λ+1} = −1/(4(λ+1)λ sin((λ+1)θ)).
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from models.config import WedgeConfig
from models.fields import BoundaryData, Grid, MellinField, ScalarField, VectorField
from models.report import SolveReport
from solver import kernels
from solver.helmholtz import angular_basis, fourier_modes
from solver.mellin import check_decay, ensure_real, extend_trace, forward_values, inverse_values, make_line, transform_at, truncation_signal
from solver.polar_core import ZETA, d_phi, divergence, gradient, laplacian_vector, seminorm_sq
from utils.errors import AdmissibilityError, DecayError, FieldArityError, ResonanceError, TruncationError
from utils.finite_diff import differentiate
from utils.workers import chunk_slices, map_ordered, worker_count

logger = logging.getLogger(__name__)

REMOVABLE_POINTS = (-1.0, 0.0, 1.0)
SWITCH_RADIUS = 0.05
CAUCHY_NODES = 32
CAUCHY_RADIUS = 0.2
RESIDUE_RADIUS = 0.25
OVERFLOW_LIMIT = 600.0

Derivative = Literal["none", "d_prime", "d_both"]


# ─────────────────────────────────────────────
# 🧮 Green-Funktion
# ─────────────────────────────────────────────
def _coefficients(lam: np.ndarray, theta: float) -> Tuple[Tuple[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]:
    """((μ₋, c₋), (μ₊, c₊))."""
    mu_minus, mu_plus = lam - 1.0, lam + 1.0
    c_minus = 1.0 / (4.0 * mu_minus * lam * np.sin(mu_minus * theta))
    c_plus = -1.0 / (4.0 * mu_plus * lam * np.sin(mu_plus * theta))
    return (mu_minus, c_minus), (mu_plus, c_plus)


def _true_pole_guard(lam: np.ndarray, theta: float) -> np.ndarray:
    """min(|sin((λ−1)θ)|, |sin((λ+1)θ)|) knotenweise."""
    return np.minimum(np.abs(np.sin((lam - 1.0) * theta)), np.abs(np.sin((lam + 1.0) * theta)))


def _removable_center(lam: np.ndarray) -> np.ndarray:
    """Nächstgelegener hebbarer Punkt, NaN falls keiner innerhalb des Umschaltradius."""
    lam = np.asarray(lam, dtype=complex)
    centers = np.full(lam.shape, np.nan)
    for point in REMOVABLE_POINTS:
        centers = np.where(np.abs(lam - point) < SWITCH_RADIUS, point, centers)
    return centers


def _cauchy_radius(center: float, theta: float) -> float:
    """Halber Abstand zum nächsten echten Pol, begrenzt auf [0.1, 0.2]."""
    poles = [sign + k * math.pi / theta for sign in (-1.0, 1.0) for k in (-2, -1, 1, 2)]
    nearest = min(abs(center - pole) for pole in poles)
    return min(CAUCHY_RADIUS, max(2.0 * SWITCH_RADIUS, 0.5 * nearest))


def _check_overflow(lam: np.ndarray, theta: float) -> None:
    peak = float(np.max(np.abs(np.imag(lam)))) * theta if np.size(lam) else 0.0
    if peak >= OVERFLOW_LIMIT:
        raise AdmissibilityError(
            f"❌ |Im λ|·θ = {peak:.1f} ≥ {OVERFLOW_LIMIT}: trigonometrische Kerne laufen über",
            {"peak": peak},
        )


@dataclass(frozen=True)
class GreenKernel:
    """G(λ, φ, φ′) für einen Satz Moden λ (Form (K,)) auf den Winkelknoten eines Gitters."""

    lam: np.ndarray
    theta: float
    phi: np.ndarray

    @classmethod
    def build(cls, lam: np.ndarray, grid: Grid) -> "GreenKernel":
        return cls(np.atleast_1d(np.asarray(lam, dtype=complex)), grid.theta, grid.phi)

    @property
    def dphi(self) -> float:
        return float(self.phi[1] - self.phi[0])

    def separable(self) -> kernels.SeparableKernel:
        lam = self.lam[:, None]
        phi, theta = self.phi[None, :], self.theta
        terms = []
        for mu, c in _coefficients(lam, theta):
            terms.append(
                kernels.SeparableTerm(
                    a=lambda d, mu=mu, c=c: c * kernels.sin_reflected_deriv(mu, theta, phi, d),
                    b=lambda d, mu=mu: kernels.sin_deriv(mu, phi, d),
                )
            )
        return kernels.SeparableKernel(tuple(terms), self.dphi)

    def apply(self, q: np.ndarray, inner: int = 0, order: int = 0) -> np.ndarray:
        """∂_φ^order ∫ ∂_{φ′}^inner G q dφ′ je Mode."""
        return self.separable().apply(q, inner, order)

    def boundary(self, order: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """∂_φ^order ∂_{φ′}G(λ, φ, 0) und ∂_φ^order ∂_{φ′}G(λ, φ, θ)."""
        lam = self.lam[:, None]
        phi, theta = self.phi[None, :], self.theta
        at_zero = np.zeros((lam.shape[0], phi.shape[1]), dtype=complex)
        at_theta = np.zeros_like(at_zero)
        for mu, c in _coefficients(lam, theta):
            at_zero += mu * c * kernels.sin_reflected_deriv(mu, theta, phi, order)
            at_theta -= mu * c * kernels.sin_deriv(mu, phi, order)
        return at_zero, at_theta


def _green_closed(lam: complex, theta: float, phi: float, phi_prime: float, derivative: Derivative) -> complex:
    (mu_m, c_m), (mu_p, c_p) = _coefficients(np.asarray(lam, dtype=complex), theta)
    terms = []
    for mu, c in ((mu_m, c_m), (mu_p, c_p)):
        terms.append(
            (
                lambda x, d, mu=mu, c=c: c * kernels.sin_reflected_deriv(mu, theta, x, d),
                lambda x, d, mu=mu: kernels.sin_deriv(mu, x, d),
            )
        )
    outer = 1 if derivative == "d_both" else 0
    inner = 0 if derivative == "none" else 1
    return kernels.evaluate_pointwise(terms, phi, phi_prime, outer=outer, inner=inner)


def green_eval(
    lam: complex,
    phi: float,
    phi_prime: float,
    derivative: Derivative = "none",
    theta: float = 0.8,
    sin_tolerance: float = 1e-6,
) -> complex:
    """
    Geschlossene Form der Green-Funktion. In der Umgebung |λ − λ₀| < 0.05
    der hebbaren Punkte λ₀ ∈ {−1, 0, 1} Cauchy-Mittel auf einem Kreis um λ₀.
    """
    if not (0.0 <= phi <= theta and 0.0 <= phi_prime <= theta):
        raise FieldArityError(f"❌ φ={phi}, φ′={phi_prime} außerhalb [0, θ]", {"phi": phi, "phi_prime": phi_prime, "theta": theta})
    if derivative not in ("none", "d_prime", "d_both"):
        raise FieldArityError(f"❌ Unbekannte Ableitung: {derivative}", {"derivative": derivative})
    lam = complex(lam)
    center = _removable_center(np.array([lam]))[0]
    if np.isnan(center):
        guard = float(_true_pole_guard(np.array([lam]), theta)[0])
        if guard < sin_tolerance:
            raise ResonanceError(f"❌ λ = {lam} liegt auf einem Pol der Green-Funktion", {"lambda": str(lam), "guard": guard})
        return _green_closed(lam, theta, phi, phi_prime, derivative)

    radius = _cauchy_radius(float(center), theta)
    nodes = center + radius * np.exp(2j * math.pi * np.arange(CAUCHY_NODES) / CAUCHY_NODES)
    values = np.array([_green_closed(z, theta, phi, phi_prime, derivative) for z in nodes])
    return complex(np.mean(values * (nodes - center) / (nodes - lam)))


def kernel_spot_check(samples: Sequence[Tuple[complex, float, float, float]]) -> List[Dict[str, float]]:
    """
    |λ|^{3−d}·|∂^d G| an Stichproben (λ, θ, φ, φ′) für d = 0 (G), 1 (∂_{φ′}G), 2 (∂_φ∂_{φ′}G).
    Beschränkte Werte bestätigen das Abklingen ~|λ|^{−3+d}.
    """
    rows = []
    for lam, theta, phi, phi_prime in samples:
        size = abs(lam)
        row = {"re_lambda": float(np.real(lam)), "im_lambda": float(np.imag(lam)), "theta": theta}
        for order, kind in enumerate(("none", "d_prime", "d_both")):
            row[kind] = size ** (3 - order) * abs(green_eval(lam, phi, phi_prime, kind, theta))
        rows.append(row)
    return rows


# ─────────────────────────────────────────────
# 🧾 Modenlösung
# ─────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class ModeSolution:
    """Winkelprofile je λ (Zeilen): û_φ, û_r, P = p̂(λ−1,·), ∂_φû_r, ∂²_φû_φ."""

    lam: np.ndarray
    phi: np.ndarray
    u_phi: np.ndarray
    u_r: np.ndarray
    p: np.ndarray
    du_r: np.ndarray
    d2_u_phi: np.ndarray

    def divergence_defect(self) -> float:
        dphi = float(self.phi[1] - self.phi[0])
        residual = (self.lam[:, None] + 1.0) * self.u_r + differentiate(self.u_phi, dphi, axis=1)
        scale = float(np.max(np.abs(self.u_r * (self.lam[:, None] + 1.0)))) or 1.0
        return float(np.max(np.abs(_resolved(residual, self.lam, dphi)))) / scale

    def boundary_defect(self, g0: np.ndarray, g_theta: np.ndarray) -> Dict[str, float]:
        scale = float(np.max(np.abs(self.u_phi))) or 1.0
        lam = self.lam
        edge_bc = np.concatenate([self.d2_u_phi[:, 0] + (lam + 1.0) * g0, self.d2_u_phi[:, -1] + (lam + 1.0) * g_theta])
        g_scale = float(np.max(np.abs(np.concatenate([(lam + 1.0) * g0, (lam + 1.0) * g_theta])))) or 1.0
        return {
            "edge_u_phi": float(max(np.max(np.abs(self.u_phi[:, 0])), np.max(np.abs(self.u_phi[:, -1])))) / scale,
            "edge_slip": float(np.max(np.abs(edge_bc))) / g_scale,
            "edge_du_r": float(
                max(np.max(np.abs(self.du_r[:, 0] - g0)), np.max(np.abs(self.du_r[:, -1] - g_theta)))
            ) / (float(np.max(np.abs(np.concatenate([g0, g_theta])))) or 1.0),
        }

    def fourth_order_residual(self, f_frak: np.ndarray) -> float:
        """‖L û_φ − 𝔣̂‖/‖𝔣̂‖ über aufgelöste Moden (Finite Differenzen in φ)."""
        dphi = float(self.phi[1] - self.phi[0])
        lam = self.lam[:, None]
        d2 = differentiate(self.u_phi, dphi, axis=1, order=2)
        d4 = differentiate(d2, dphi, axis=1, order=2)
        residual = d4 + 2.0 * (lam**2 + 1.0) * d2 + (lam**2 - 1.0) ** 2 * self.u_phi - f_frak
        scale = float(np.max(np.abs(_resolved(f_frak, self.lam, dphi)))) or 1.0
        return float(np.max(np.abs(_resolved(residual[:, 3:-3], self.lam, dphi)))) / scale


def _resolved(values: np.ndarray, lam: np.ndarray, dphi: float, limit: float = 0.3) -> np.ndarray:
    """Nur Moden mit |λ|·Δφ < limit; feinere Moden sind auf dem Winkelgitter nicht aufgelöst."""
    mask = np.abs(lam) * dphi < limit
    return values[mask] if np.any(mask) else values[:0]


def source_term(lam: np.ndarray, F_r: np.ndarray, F_phi: np.ndarray, dphi: float) -> np.ndarray:
    """𝔣̂ = (λ+1)∂_φF_r − (λ²−1)F_φ."""
    lam = np.asarray(lam)[:, None]
    return (lam + 1.0) * differentiate(F_r, dphi, axis=1) - (lam**2 - 1.0) * F_phi


# ─────────────────────────────────────────────
# 🔧 Modenlöser (Green-Darstellung)
# ─────────────────────────────────────────────
def _closed_profiles(lam: np.ndarray, F_r: np.ndarray, F_phi: np.ndarray, g0: np.ndarray, g_theta: np.ndarray, grid: Grid) -> Dict[str, np.ndarray]:
    """Profile ohne Sonderbehandlung; S_d = I^{(d)}_{G′}F_r + (λ−1)I^{(d)}_G F_φ + (𝔤̂_θK_θ^{(d)} − 𝔤̂_0K_0^{(d)})."""
    kernel = GreenKernel.build(lam, grid)
    sep = kernel.separable()
    lam_col = kernel.lam[:, None]
    g0 = np.asarray(g0)[:, None]
    g_theta = np.asarray(g_theta)[:, None]

    def scaled(order: int) -> np.ndarray:
        k0, k_theta = kernel.boundary(order)
        out = sep.apply(F_r, inner=1, order=order) + (lam_col - 1.0) * sep.apply(F_phi, inner=0, order=order)
        return out + g_theta * k_theta - g0 * k0

    S = [scaled(d) for d in range(4)]
    return {
        "u_phi": (lam_col + 1.0) * S[0],
        "d2_u_phi": (lam_col + 1.0) * S[2],
        "u_r": -S[1],
        "du_r": -S[2],
        "d2_u_r": -S[3],
    }


def _solve_batch(
    lam: np.ndarray,
    F_r: np.ndarray,
    F_phi: np.ndarray,
    g0: np.ndarray,
    g_theta: np.ndarray,
    grid: Grid,
    sin_tolerance: float,
) -> ModeSolution:
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    theta = grid.theta
    _check_overflow(lam, theta)
    F_r = np.asarray(F_r, dtype=complex)
    F_phi = np.asarray(F_phi, dtype=complex)
    g0 = np.broadcast_to(np.asarray(g0, dtype=complex), lam.shape)
    g_theta = np.broadcast_to(np.asarray(g_theta, dtype=complex), lam.shape)

    centers = _removable_center(lam)
    regular = np.isnan(centers)
    guard = _true_pole_guard(lam[regular], theta)
    if guard.size and float(np.min(guard)) < sin_tolerance:
        bad = lam[regular][int(np.argmin(guard))]
        raise ResonanceError(
            f"❌ Resonanz: |sin((λ±1)θ)| = {float(np.min(guard)):.2e} bei λ = {bad:.4f}",
            {"lambda": str(bad), "guard": float(np.min(guard)), "sin_tolerance": sin_tolerance},
        )

    profiles = {key: np.zeros((lam.size, grid.phi.size), dtype=complex) for key in ("u_phi", "d2_u_phi", "u_r", "du_r", "d2_u_r")}
    if np.any(regular):
        closed = _closed_profiles(lam[regular], F_r[regular], F_phi[regular], g0[regular], g_theta[regular], grid)
        for key, values in closed.items():
            profiles[key][regular] = values

    for index in np.flatnonzero(~regular):
        center = float(centers[index])
        radius = _cauchy_radius(center, theta)
        nodes = center + radius * np.exp(2j * math.pi * np.arange(CAUCHY_NODES) / CAUCHY_NODES)
        weights = ((nodes - center) / (nodes - lam[index]))[:, None]
        closed = _closed_profiles(
            nodes,
            np.repeat(F_r[index : index + 1], CAUCHY_NODES, axis=0),
            np.repeat(F_phi[index : index + 1], CAUCHY_NODES, axis=0),
            np.full(CAUCHY_NODES, g0[index]),
            np.full(CAUCHY_NODES, g_theta[index]),
            grid,
        )
        for key, values in closed.items():
            profiles[key][index] = np.mean(values * weights, axis=0)

    lam_col = lam[:, None]
    pressure = ((lam_col + 1.0) ** 2 * profiles["u_r"] + profiles["d2_u_r"] + F_r) / (lam_col - 1.0)
    return ModeSolution(lam, grid.phi, profiles["u_phi"], profiles["u_r"], pressure, profiles["du_r"], profiles["d2_u_phi"])


def solve_mode(
    lam: complex | np.ndarray,
    F_r: np.ndarray,
    F_phi: np.ndarray,
    g_hat_edges: Tuple[complex | np.ndarray, complex | np.ndarray],
    grid: Grid,
    sin_tolerance: float = 1e-6,
) -> ModeSolution:
    """
    Modenlösung über die Green-Darstellung. F_r, F_φ sind f̂(λ−2,·) mit Form (Na,)
    für ein einzelnes λ oder (K, Na) für einen Satz Moden.
    """
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=complex))
    F_r = np.atleast_2d(F_r)
    F_phi = np.atleast_2d(F_phi)
    if F_r.shape != (lam_arr.size, grid.phi.size) or F_phi.shape != F_r.shape:
        raise FieldArityError("❌ Quellprofile passen nicht zu λ und Winkelgitter", {"F_r": F_r.shape, "lambdas": lam_arr.size})
    if np.isclose(lam_arr, 1.0, atol=1e-12).any():
        raise ResonanceError("❌ Druck bei λ = 1 (p̂ an 0) ohne Residuenbehandlung", {"lambda": 1.0})
    return _solve_batch(lam_arr, F_r, F_phi, g_hat_edges[0], g_hat_edges[1], grid, sin_tolerance)


def edge_response(lam: np.ndarray, grid: Grid, sin_tolerance: float = 1e-6) -> np.ndarray:
    """
    Antwort der Kantenspuren von û_r auf Einheitsdaten 𝔤̂ je Mode, Form (K, 2, 2):
    R[k, i, j] = û_r an Kante i (0, θ) für 𝔤̂ = 1 an Kante j und f = 0.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    zeros = np.zeros((lam.size, grid.phi.size), dtype=complex)
    ones = np.ones(lam.size, dtype=complex)
    out = np.empty((lam.size, 2, 2), dtype=complex)
    for j, edges in enumerate(((ones, 0.0 * ones), (0.0 * ones, ones))):
        solution = _solve_batch(lam, zeros, zeros, edges[0], edges[1], grid, sin_tolerance)
        out[:, 0, j] = solution.u_r[:, 0]
        out[:, 1, j] = solution.u_r[:, -1]
    return out


# ─────────────────────────────────────────────
# 🎼 Modenlöser (Fourier-Reihe)
# ─────────────────────────────────────────────
def solve_mode_fourier(
    lam: complex | np.ndarray,
    F_r: np.ndarray,
    F_phi: np.ndarray,
    grid: Grid,
    g_hat_edges: Optional[Tuple[complex | np.ndarray, complex | np.ndarray]] = None,
    sin_tolerance: float = 1e-6,
    tail_tolerance: float = 1e-3,
) -> ModeSolution:
    """
    Reihendarstellung mit D_k = (κ_k² − (λ−1)²)(κ_k² − (λ+1)²):
        û_φ = −Σ [(λ²−1)F^φ_k + (λ+1)κ_k F^r_k] ẽ_k / D_k,
        û_r =  Σ [(λ−1)κ_k F^φ_k + κ_k² F^r_k] e_k / D_k.
    """
    theta = grid.theta
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=complex))
    if not np.all(np.abs(lam_arr.real) < math.pi / theta - 1.0):
        raise AdmissibilityError(
            f"❌ Re λ außerhalb (−π/θ+1, π/θ−1)",
            {"re_lambda": float(np.max(np.abs(lam_arr.real))), "bound": math.pi / theta - 1.0},
        )
    F_r = np.atleast_2d(np.asarray(F_r, dtype=complex))
    F_phi = np.atleast_2d(np.asarray(F_phi, dtype=complex))

    modes_r = fourier_modes(F_r, grid.phi, theta, "cos", tail_tolerance)
    modes_phi = fourier_modes(F_phi, grid.phi, theta, "sin", tail_tolerance)
    K = max(modes_r.truncation, modes_phi.truncation, 1)
    if K >= grid.phi.size // 2:
        raise TruncationError(f"❌ Fourier-Abbruch K = {K} nicht aufgelöst", {"K": K})
    cos_basis = angular_basis(grid.phi, theta, "cos", K)
    sin_basis = angular_basis(grid.phi, theta, "sin", K)
    Fr = kernels.integrate_angle(F_r[:, None, :] * cos_basis[None], grid.dphi)[:, 1:]
    Fp = kernels.integrate_angle(F_phi[:, None, :] * sin_basis[None], grid.dphi)[:, 1:]

    lam_col = lam_arr[:, None]
    kappa = (np.arange(1, K + 1) * math.pi / theta)[None, :]
    minus = kappa**2 - (lam_col - 1.0) ** 2
    plus = kappa**2 - (lam_col + 1.0) ** 2
    guard = float(np.min(np.minimum(np.abs(minus), np.abs(plus)) / kappa**2))
    if guard < sin_tolerance:
        raise ResonanceError(f"❌ |κ² − (λ±1)²|/κ² = {guard:.2e} zu klein", {"guard": guard})
    D = minus * plus

    c_phi = -((lam_col**2 - 1.0) * Fp + (lam_col + 1.0) * kappa * Fr) / D
    c_r = ((lam_col - 1.0) * kappa * Fp + kappa**2 * Fr) / D
    u_phi = c_phi @ sin_basis[1:]
    d2_u_phi = (-(kappa**2) * c_phi) @ sin_basis[1:]
    u_r = c_r @ cos_basis[1:]
    du_r = c_r @ angular_basis(grid.phi, theta, "cos", K, order=1)[1:]
    d2_u_r = (-(kappa**2) * c_r) @ cos_basis[1:]

    if g_hat_edges is not None:
        g0 = np.broadcast_to(np.asarray(g_hat_edges[0], dtype=complex), lam_arr.shape)[:, None]
        g_theta = np.broadcast_to(np.asarray(g_hat_edges[1], dtype=complex), lam_arr.shape)[:, None]
        if np.any(g0) or np.any(g_theta):
            kernel = GreenKernel.build(lam_arr, grid)
            b = [kernel.boundary(d) for d in range(4)]
            u_phi = u_phi + (lam_col + 1.0) * (g_theta * b[0][1] - g0 * b[0][0])
            d2_u_phi = d2_u_phi + (lam_col + 1.0) * (g_theta * b[2][1] - g0 * b[2][0])
            u_r = u_r - (g_theta * b[1][1] - g0 * b[1][0])
            du_r = du_r - (g_theta * b[2][1] - g0 * b[2][0])
            d2_u_r = d2_u_r - (g_theta * b[3][1] - g0 * b[3][0])

    pressure = ((lam_col + 1.0) ** 2 * u_r + d2_u_r + F_r) / (lam_col - 1.0)
    return ModeSolution(lam_arr, grid.phi, u_phi, u_r, pressure, du_r, d2_u_phi)


# ─────────────────────────────────────────────
# 🌍 Physikalischer Löser
# ─────────────────────────────────────────────
@dataclass
class FreeSlipData:
    """Transformierte Daten auf der Geschwindigkeitslinie: F_r, F_φ (K, Na), 𝔤̂ an beiden Kanten (K,)."""

    F_r: np.ndarray
    F_phi: np.ndarray
    g0: np.ndarray
    g_theta: np.ndarray
    signals: Dict[str, float] = field(default_factory=dict)


def transform_data(f: VectorField, g_frak: BoundaryData, line, decay_floor: float, strict_decay: bool = True) -> FreeSlipData:
    grid = f.grid
    r2 = np.exp(2.0 * grid.s)[:, None]
    stack = np.stack([f.u_r * r2, f.u_phi * r2], axis=1)
    edges = np.stack([g_frak.at_zero, g_frak.at_theta], axis=1)
    if strict_decay and np.any(stack):
        check_decay(stack, grid, line.re_lambda, decay_floor)
    if strict_decay and np.any(edges):
        check_decay(edges, grid, line.re_lambda, decay_floor)
    F, _ = forward_values(stack, grid, line.re_lambda, line=line)
    G, _ = forward_values(edges, grid, line.re_lambda, line=line)
    signals = {"source": truncation_signal(np.moveaxis(F, 1, 0)), "slip": truncation_signal(G.T[:, :, None])}
    return FreeSlipData(F[:, 0], F[:, 1], G[:, 0], G[:, 1], signals)


def solve_modes(data: FreeSlipData, lam: np.ndarray, grid: Grid, sin_tolerance: float, max_workers: Optional[int] = None) -> ModeSolution:
    """Alle Moden, blockweise über den Thread-Pool; Zusammenführung in aufsteigendem Im λ."""
    chunks = chunk_slices(lam.size, worker_count(max_workers))

    def run(chunk: slice) -> ModeSolution:
        return _solve_batch(lam[chunk], data.F_r[chunk], data.F_phi[chunk], data.g0[chunk], data.g_theta[chunk], grid, sin_tolerance)

    parts = map_ordered(run, chunks, max_workers)
    return ModeSolution(
        lam,
        grid.phi,
        *(np.concatenate([getattr(part, key) for part in parts]) for key in ("u_phi", "u_r", "p", "du_r", "d2_u_phi")),
    )


def pressure_residue(f: VectorField, g_frak: BoundaryData, grid: Grid, sin_tolerance: float = 1e-6) -> float:
    """
    C_res = √(2π)·Res_{μ=0} p̂(μ), über einen Kreis um λ = 1 (μ = λ − 1) gemittelt in φ.
    Die Inversion oberhalb und unterhalb von 0 unterscheidet sich um genau diese Konstante.
    """
    nodes = 1.0 + RESIDUE_RADIUS * np.exp(2j * math.pi * np.arange(CAUCHY_NODES) / CAUCHY_NODES)
    r2 = np.exp(2.0 * grid.s)[:, None]
    F_r = transform_at(f.u_r * r2, grid, nodes)
    F_phi = transform_at(f.u_phi * r2, grid, nodes)
    edges = transform_at(np.stack([g_frak.at_zero, g_frak.at_theta], axis=1), grid, nodes)
    solution = _solve_batch(nodes, F_r, F_phi, edges[:, 0], edges[:, 1], grid, sin_tolerance)
    residue = np.mean(solution.p * (nodes - 1.0)[:, None], axis=0)
    value = math.sqrt(2.0 * math.pi) * complex(np.mean(residue))
    if abs(value.imag) > 1e-6 * max(abs(value.real), 1.0):
        logger.warning(f"⚠️ Residuenkonstante mit Imaginärteil {value.imag:.2e}")
    return float(value.real)


def freeslip_solve(
    f: VectorField,
    g_frak: BoundaryData,
    M: int,
    config: WedgeConfig,
    max_workers: Optional[int] = None,
    check_truncation: bool = True,
    strict_decay: bool = True,
) -> Tuple[VectorField, ScalarField, float, SolveReport]:
    """
    Löst das Free-Slip-Problem auf Re λ = M + α + 1 (Geschwindigkeit) und
    Re λ = M + α (Druck). Für α < 0 < M + α wird p = ζp₀ + p₁ zerlegt; zurück
    kommen u, p₁, p₀ und der Bericht (ohne Zerlegung p₁ = p, p₀ = 0).
    strict_decay=False überspringt die Abfallprüfung der Daten (Navier-Iterierte).
    check_truncation wirft TruncationError, wenn das Spektrum bei |t| = T nicht abgeklungen ist.
    """
    started = time.perf_counter()
    grid = f.grid
    grid.check_same(g_frak.grid)
    alpha, theta = config.alpha, config.theta
    if not math.isclose(grid.theta, theta, abs_tol=1e-12):
        raise AdmissibilityError("❌ Gitterwinkel passt nicht zur Konfiguration", {"grid": grid.theta, "config": theta})
    gamma = M + alpha + 1.0
    if not config.in_interval(gamma):
        raise AdmissibilityError(
            f"❌ Linie Re λ = M+α+1 = {gamma} nicht in I_ε \\ ℤ",
            {"gamma": gamma, "interval": config.alpha_interval},
        )

    line = make_line(grid, gamma, config.grid.n_modes or None)
    lam = line.lambdas
    data = transform_data(f, g_frak, line, config.decay_floor, strict_decay)
    solution = solve_modes(data, lam, grid, config.sin_tolerance, max_workers)

    velocity = np.stack([solution.u_r, solution.u_phi], axis=1)
    signals = {"velocity": truncation_signal(np.moveaxis(velocity, 1, 0)), "pressure": truncation_signal(solution.p), **data.signals}
    if check_truncation and max(signals.values()) > config.truncation_floor:
        raise TruncationError(f"❌ Spektrum bei |t| = T nicht abgeklungen: {max(signals.values()):.2e}", signals)
    u_vals = ensure_real(inverse_values(velocity, grid, line), config.imag_tolerance)
    p_vals = ensure_real(inverse_values(solution.p, grid, line.shifted(-1.0)), config.imag_tolerance)
    u = VectorField(grid, u_vals[:, 0], u_vals[:, 1])

    p0 = 0.0
    c_res = 0.0
    if alpha < 0.0 < M + alpha:
        c_res = pressure_residue(f, g_frak, grid, config.sin_tolerance)
        p0 = -c_res
        p_vals = p_vals + ZETA(grid.r_col) * c_res
    p = ScalarField(grid, p_vals)

    report = SolveReport(command="freeslip", status="ok")
    report.grid = {"n_radial": grid.s.size, "n_angular": grid.phi.size, "s_min": float(grid.s[0]), "s_max": float(grid.s[-1]), "theta": theta}
    report.truncation = {"re_lambda": gamma, "n_modes": line.n_modes, "T": line.T, **{f"signal_{k}": v for k, v in signals.items()}}
    report.constants = {"C_res": c_res, "p0": p0}
    f_frak = source_term(lam, data.F_r, data.F_phi, grid.dphi)
    report.residuals.update(
        {
            "mode_divergence": solution.divergence_defect(),
            "mode_fourth_order": solution.fourth_order_residual(f_frak),
            **{f"mode_{k}": v for k, v in solution.boundary_defect(data.g0, data.g_theta).items()},
            **physical_residuals(u, ScalarField(grid, p_vals + ZETA(grid.r_col) * p0), f, g_frak),
        }
    )
    report.estimate_ratios["freeslip"] = estimate_ratio(u, p, f, g_frak, M, alpha, strict_decay)
    report.wall_time = time.perf_counter() - started
    logger.info(
        f"✅ Free-Slip gelöst: Re λ = {gamma:.3f}, {line.n_modes} Moden, "
        f"Impulsresiduum {report.residuals['momentum']:.2e}"
    )
    return u, p, p0, report


def _interior(values: np.ndarray) -> np.ndarray:
    n = values.shape[0]
    return values[n // 5 : n - n // 5, 3:-3]


def physical_residuals(u: VectorField, p: ScalarField, f: VectorField, g_frak: BoundaryData) -> Dict[str, float]:
    """Relative Residuen des physikalischen Systems im Inneren (20 % Rand ausgespart)."""
    grid = u.grid
    lap = laplacian_vector(u)
    grad = gradient(p)
    res_r = -lap.u_r + grad.u_r - f.u_r
    res_phi = -lap.u_phi + grad.u_phi - f.u_phi
    scale = max(float(np.max(np.abs(_interior(f.u_r)))), float(np.max(np.abs(_interior(f.u_phi)))), float(np.max(np.abs(_interior(lap.u_r)))), 1e-300)
    div = _interior(divergence(u).values * grid.r_col)
    u_scale = float(np.max(np.abs(u.stacked()))) or 1.0
    du_r = d_phi(u.u_r, grid)
    n = grid.s.size
    inner = slice(n // 5, n - n // 5)
    slip = max(
        float(np.max(np.abs(du_r[inner, 0] - g_frak.at_zero[inner]))),
        float(np.max(np.abs(du_r[inner, -1] - g_frak.at_theta[inner]))),
    )
    return {
        "momentum": float(max(np.max(np.abs(_interior(res_r))), np.max(np.abs(_interior(res_phi))))) / scale,
        "divergence": float(np.max(np.abs(div))) / u_scale,
        "normal_velocity": float(max(np.max(np.abs(u.u_phi[:, 0])), np.max(np.abs(u.u_phi[:, -1])))) / u_scale,
        "slip": slip / (float(np.max(np.abs(du_r))) or 1.0),
    }


def estimate_ratio(
    u: VectorField,
    p: ScalarField,
    f: VectorField,
    g_frak: BoundaryData,
    M: int,
    alpha: float,
    strict_decay: bool = True,
) -> float:
    """
    (⟦u⟧_{M+2,α} + ⟦p⟧_{M+1,α}) / (⟦f⟧_{M,α} + ⟦E𝔤⟧_{M+1,α}); E𝔤 ist die
    Fortsetzung der Randdaten, eine obere Ersatzgröße der Spurnorm.
    Reicht der Abfall von 𝔤 auf Re λ = M + α nicht, ist der Quotient NaN.
    """
    numerator = math.sqrt(seminorm_sq(u, M + 2, alpha)) + math.sqrt(seminorm_sq(p, M + 1, alpha))
    denominator = math.sqrt(seminorm_sq(f, M, alpha)) if np.any(f.stacked()) else 0.0
    if np.any(g_frak.at_zero) or np.any(g_frak.at_theta):
        try:
            extension = extend_trace([(g_frak.at_zero, g_frak.at_theta)], M + 1, alpha, u.grid, strict_decay=strict_decay)
        except DecayError as exc:
            logger.warning(f"⚠️ Schätzquotient nicht auswertbar: {exc.message}")
            return math.nan
        denominator += math.sqrt(seminorm_sq(extension, M + 1, alpha))
    if denominator == 0.0:
        return 0.0
    ratio = numerator / denominator
    if not math.isfinite(ratio):
        logger.warning(f"⚠️ Schätzquotient nicht endlich: {ratio}")
        return math.nan
    return ratio


# ─────────────────────────────────────────────
# 📏 Modennormen
# ─────────────────────────────────────────────
def mode_norm_ratios(solution: ModeSolution, f_frak: np.ndarray, min_modulus: float = 1.0) -> Dict[int, float]:
    """max_λ ‖∂_φ^ℓ û_φ‖ / (|λ|^{ℓ−2}‖𝔣̂‖) für ℓ = 0..2 über aufgelöste Moden mit |λ| ≥ min_modulus."""
    dphi = float(solution.phi[1] - solution.phi[0])
    lam = solution.lam
    mask = (np.abs(lam) >= min_modulus) & (np.abs(lam) * dphi < 0.3)
    source = np.sqrt(kernels.integrate_angle(np.abs(f_frak[mask]) ** 2, dphi))
    derivs = {0: solution.u_phi, 1: differentiate(solution.u_phi, dphi, axis=1), 2: solution.d2_u_phi}
    ratios: Dict[int, float] = {}
    for ell, values in derivs.items():
        norm = np.sqrt(kernels.integrate_angle(np.abs(values[mask]) ** 2, dphi))
        weight = np.abs(lam[mask]) ** (ell - 2)
        valid = source > 0
        ratios[ell] = float(np.max(norm[valid] / (weight[valid] * source[valid]))) if np.any(valid) else 0.0
    return ratios


def mode_field(solution: ModeSolution, line) -> MellinField:
    """Geschwindigkeitsmoden als vektorwertiges MellinField."""
    return MellinField(line, solution.phi, np.stack([solution.u_r, solution.u_phi]))
