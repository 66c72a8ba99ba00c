"""
──────────────────────────────────────────────
💧 solver/helmholtz.py
Helmholtz-Projektion im Keil und ihre Kommutatoren
──────────────────────────────────────────────
Neumann-Potential Φ zu w:

    ΔΦ = div w in Ω,   ∂_nΦ = w·n auf beiden Kanten,   ℙw = w − ∇Φ.

Pro Mellin-Mode λ = μ + 1 (μ auf der Linie von w):

    Φ̂(λ) = ∫ [λ N ŵ_r(μ) − ∂_{φ′}N ŵ_φ(μ)] dφ′,
    N = cos(λ(θ−φ)) cos(λφ′) / (λ sin λθ)  für φ′ ≤ φ (symmetrisch fortgesetzt).

Die schwache Form braucht keine Ableitungen der Daten; die Neumann-Randwerte
entstehen aus dem Sprung von ∂_φ∂_{φ′}N.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Literal, Optional, Sequence

import numpy as np
from models.config import WedgeConfig
from models.fields import Grid, MellinField, MellinLine, VectorField
from solver import kernels
from solver.mellin import check_decay, forward_values, make_line, mellin_inverse, shifted_forward, spectral_r_dr, truncation_signal
from solver.polar_core import check_solenoidal_tangent, d_phi, divergence, field_alpha_sq, laplacian_vector, seminorm_sq
from utils.errors import AdmissibilityError, ConsistencyError, ResonanceError, TruncationError

logger = logging.getLogger(__name__)

DEFAULT_GAMMA = -0.5
DEFAULT_TAIL_TOLERANCE = 1e-2
PRECONDITION_TOLERANCE = 1e-3


# ─────────────────────────────────────────────
# 🧾 Ergebnis-Typen
# ─────────────────────────────────────────────
@dataclass(frozen=True)
class FourierModes:
    """
    Koeffizienten gegen e_k = √(2/θ)cos(kπφ/θ) (e_0 = 1/√θ) bzw.
    ẽ_k = √(2/θ)sin(kπφ/θ). coefficients: (K_λ, truncation + 1), Spalte k.
    """

    kind: Literal["cos", "sin"]
    theta: float
    coefficients: np.ndarray
    norm_sq: np.ndarray
    partial_sums: np.ndarray
    truncation: int

    @property
    def tail(self) -> float:
        """Relativer Bessel-Rest (Amplitude), über alle λ-Knoten aggregiert."""
        total = float(np.sum(self.norm_sq))
        if total == 0.0:
            return 0.0
        return math.sqrt(max(total - float(np.sum(self.partial_sums[:, self.truncation])), 0.0) / total)

    def bessel_monotone(self) -> bool:
        steps = np.diff(self.partial_sums, axis=1)
        return bool(np.all(steps >= -1e-14 * np.max(self.norm_sq, initial=1.0)))


@dataclass(frozen=True)
class NeumannPotential:
    """Φ̂ auf Re λ = γ + 1 und der Gradient ((λ)Φ̂, ∂_φΦ̂) auf der Linie γ von w."""

    phi_hat: MellinField
    gradient: MellinField
    neumann_defect: float = 0.0
    modes: Optional[FourierModes] = None

    def gradient_field(self, grid: Grid, imag_tolerance: float = 1e-8) -> VectorField:
        signal = truncation_signal(self.gradient.values)
        if signal > 1e-6:
            logger.warning(f"⚠️ Gradient bei |t| = T nicht abgeklungen: {signal:.2e}")
        return mellin_inverse(self.gradient, grid, check_truncation=False, imag_tolerance=imag_tolerance)


# ─────────────────────────────────────────────
# 🛡️ Linien und Resonanzen
# ─────────────────────────────────────────────
def _tolerances(config: Optional[WedgeConfig]) -> tuple[float, float, float]:
    config = config or WedgeConfig()
    return config.sin_tolerance, config.decay_floor, config.imag_tolerance


def _potential_line(grid: Grid, gamma: float, sin_tolerance: float) -> tuple[MellinLine, np.ndarray]:
    """Linie μ = γ + it und die zugehörigen λ = μ + 1 als Spalte (K, 1)."""
    theta = grid.theta
    if not -math.pi / theta < gamma + 1.0 < math.pi / theta:
        raise AdmissibilityError(
            f"❌ γ = {gamma} außerhalb (−(π+θ)/θ, (π−θ)/θ)",
            {"gamma": gamma, "theta": theta},
        )
    line = make_line(grid, gamma)
    lam = (line.lambdas + 1.0)[:, None]
    guard = float(np.min(np.minimum(np.abs(np.sin(lam * theta)), np.abs(lam))))
    if guard < sin_tolerance:
        raise ResonanceError(
            f"❌ Neumann-Problem resonant auf Re λ = {gamma + 1.0}: min |sin λθ|, |λ| = {guard:.2e}",
            {"gamma": gamma, "guard": guard, "sin_tolerance": sin_tolerance},
        )
    return line, lam


def neumann_kernel(lam: np.ndarray, grid: Grid) -> kernels.SeparableKernel:
    theta, phi = grid.theta, grid.phi[None, :]
    denom = lam * np.sin(lam * theta)
    term = kernels.SeparableTerm(
        a=lambda d: kernels.cos_reflected_deriv(lam, theta, phi, d) / denom,
        b=lambda d: kernels.cos_deriv(lam, phi, d),
    )
    return kernels.SeparableKernel((term,), grid.dphi)


# ─────────────────────────────────────────────
# 🌿 Green-Darstellung
# ─────────────────────────────────────────────
def potential_green(w: VectorField, gamma: float = DEFAULT_GAMMA, config: Optional[WedgeConfig] = None) -> NeumannPotential:
    """Neumann-Potential über die Green-Funktion, w transformiert auf Re μ = γ."""
    sin_tol, decay_floor, _ = _tolerances(config)
    grid = w.grid
    line, lam = _potential_line(grid, gamma, sin_tol)
    stack = w.stacked()
    if not np.any(stack):
        zeros = np.zeros((line.n_modes, grid.phi.size))
        return NeumannPotential(
            MellinField(line.shifted(1.0), grid.phi, zeros),
            MellinField(line, grid.phi, np.stack([zeros, zeros])),
        )

    check_decay(np.moveaxis(stack, 0, 1), grid, gamma, decay_floor)
    hat, _ = forward_values(np.moveaxis(stack, 0, 1), grid, gamma, line=line)
    w_r, w_phi = hat[:, 0], hat[:, 1]

    kernel = neumann_kernel(lam, grid)
    phi_hat = lam * kernel.apply(w_r) - kernel.apply(w_phi, inner=1)
    dphi_hat = lam * kernel.apply(w_r, order=1) - kernel.apply(w_phi, inner=1, order=1)

    scale = float(np.max(np.abs(w_phi))) or 1.0
    defect = float(max(np.max(np.abs(dphi_hat[:, 0] - w_phi[:, 0])), np.max(np.abs(dphi_hat[:, -1] - w_phi[:, -1])))) / scale
    logger.debug(f"💧 Neumann-Potential auf Re λ = {gamma + 1.0}: Randdefekt {defect:.2e}")
    return NeumannPotential(
        phi_hat=MellinField(line.shifted(1.0), grid.phi, phi_hat),
        gradient=MellinField(line, grid.phi, np.stack([lam * phi_hat, dphi_hat])),
        neumann_defect=defect,
    )


def project(w: VectorField, gamma: float = DEFAULT_GAMMA, config: Optional[WedgeConfig] = None) -> VectorField:
    """ℙw = w − ∇Φ."""
    _, _, imag_tol = _tolerances(config)
    potential = potential_green(w, gamma, config)
    return w - potential.gradient_field(w.grid, imag_tol)


# ─────────────────────────────────────────────
# 🎼 Fourier-Darstellung
# ─────────────────────────────────────────────
def angular_basis(phi: np.ndarray, theta: float, kind: Literal["cos", "sin"], count: int, order: int = 0) -> np.ndarray:
    """Zeilen k = 0..count: ∂_φ^order von e_k bzw. ẽ_k (ẽ_0 ≡ 0)."""
    k = np.arange(count + 1)[:, None]
    kappa = k * math.pi / theta
    norm = np.where(k == 0, 1.0 / math.sqrt(theta), math.sqrt(2.0 / theta))
    if kind == "cos":
        values = kernels.cos_deriv(kappa, phi[None, :], order)
    else:
        values = kernels.sin_deriv(kappa, phi[None, :], order)
    if order:
        values = np.where(k == 0, 0.0, values)
    return norm * values


def fourier_modes(
    values: np.ndarray,
    phi: np.ndarray,
    theta: float,
    kind: Literal["cos", "sin"] = "cos",
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
    max_modes: Optional[int] = None,
) -> FourierModes:
    """Winkelkoeffizienten jeder Zeile von values; K wächst, bis der Bessel-Rest unter tail_tolerance liegt."""
    values = np.atleast_2d(values)
    dphi = float(phi[1] - phi[0])
    max_modes = max_modes or phi.size // 2
    basis = angular_basis(phi, theta, kind, max_modes)
    coeffs = kernels.integrate_angle(values[:, None, :] * basis[None, :, :], dphi)
    norm_sq = kernels.integrate_angle(np.abs(values) ** 2, dphi)
    partial = np.cumsum(np.abs(coeffs) ** 2, axis=1)

    total = float(np.sum(norm_sq))
    truncation = None
    for K in range(max_modes + 1):
        rest = max(total - float(np.sum(partial[:, K])), 0.0)
        if total == 0.0 or math.sqrt(rest / total) <= tail_tolerance:
            truncation = K
            break
    if truncation is None:
        tail = math.sqrt(max(total - float(np.sum(partial[:, -1])), 0.0) / total)
        raise TruncationError(
            f"❌ Bessel-Rest {tail:.2e} auch mit K = {max_modes} über {tail_tolerance:.0e}",
            {"tail": tail, "max_modes": max_modes, "tolerance": tail_tolerance},
        )
    return FourierModes(kind, theta, coeffs[:, : truncation + 1], norm_sq, partial, truncation)


def potential_fourier(
    v: VectorField,
    alpha: float,
    gamma: float = DEFAULT_GAMMA,
    config: Optional[WedgeConfig] = None,
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
) -> NeumannPotential:
    """
    Potential zu r^{−2α}v für divergenzfreies, tangentiales v:
        Φ̂(λ) = −2α Σ_{k≥1} v̂_{rk}(λ+2α−1) e_k / (λ² − (kπ/θ)²).
    """
    sin_tol, decay_floor, _ = _tolerances(config)
    grid = v.grid
    theta = grid.theta
    line = make_line(grid, gamma)
    lam = (line.lambdas + 1.0)[:, None]
    if not -math.pi / theta < gamma + 1.0 < math.pi / theta:
        raise AdmissibilityError(f"❌ Re λ = {gamma + 1.0} außerhalb (−π/θ, π/θ)", {"gamma": gamma})
    if float(np.min(np.abs(lam + 2.0 * alpha))) < sin_tol:
        raise ResonanceError("❌ λ = −2α liegt auf der Linie", {"gamma": gamma, "alpha": alpha})

    zeros = np.zeros((line.n_modes, grid.phi.size))
    if not np.any(v.stacked()):
        return NeumannPotential(MellinField(line.shifted(1.0), grid.phi, zeros), MellinField(line, grid.phi, np.stack([zeros, zeros])))
    check_solenoidal_tangent(v, PRECONDITION_TOLERANCE)

    weighted = v.u_r * np.exp((1.0 - 2.0 * alpha) * grid.s)[:, None]
    check_decay(weighted, grid, gamma + 1.0, decay_floor)
    q = shifted_forward(v.u_r, grid, line.shifted(1.0), 2.0 * alpha - 1.0)
    modes = fourier_modes(q, grid.phi, theta, "cos", tail_tolerance)

    K = modes.truncation
    kappa = (np.arange(1, K + 1) * math.pi / theta)[None, :]
    denom = lam**2 - kappa**2
    guard = float(np.min(np.abs(denom) / kappa**2)) if K else 1.0
    if guard < sin_tol:
        raise ResonanceError(f"❌ λ² ≈ (kπ/θ)² auf der Linie: {guard:.2e}", {"guard": guard})
    c = -2.0 * alpha * modes.coefficients[:, 1:] / denom if K else np.zeros((line.n_modes, 0))

    basis = angular_basis(grid.phi, theta, "cos", K)[1:]
    dbasis = angular_basis(grid.phi, theta, "cos", K, order=1)[1:]
    phi_hat = c @ basis
    dphi_hat = c @ dbasis
    logger.debug(f"🎼 Fourier-Potential: K = {K}, Bessel-Rest {modes.tail:.2e}")
    return NeumannPotential(
        phi_hat=MellinField(line.shifted(1.0), grid.phi, phi_hat),
        gradient=MellinField(line, grid.phi, np.stack([lam * phi_hat, dphi_hat])),
        modes=modes,
    )


# ─────────────────────────────────────────────
# 🔀 Kommutatoren
# ─────────────────────────────────────────────
CommutatorKind = Literal["laplace", "weight"]


def _check_commutator_alpha(kind: CommutatorKind, alpha: float, config: Optional[WedgeConfig]) -> None:
    if kind == "weight" and alpha == 0.0:
        raise AdmissibilityError("❌ [ℙ, r^{−2α}] verlangt α ≠ 0", {"alpha": alpha})
    if config is None:
        return
    value = alpha - 1.0 if kind == "laplace" else alpha
    if not config.in_interval(value):
        raise AdmissibilityError(
            f"❌ {'α−1' if kind == 'laplace' else 'α'} = {value} nicht in I_ε",
            {"kind": kind, "alpha": alpha, "interval": config.alpha_interval},
        )


def laplace_potential(v: VectorField, gamma: float = DEFAULT_GAMMA, config: Optional[WedgeConfig] = None) -> NeumannPotential:
    """
    Potential zu Δv bei divergenzfreiem, tangentialem v: harmonisch mit
    ∂_φΦ̂(λ) = −λ ∂_φv̂_r(λ+1) auf beiden Kanten.
    """
    sin_tol, decay_floor, _ = _tolerances(config)
    grid = v.grid
    theta, phi = grid.theta, grid.phi[None, :]
    line, lam = _potential_line(grid, gamma, sin_tol)
    edges = d_phi(v.u_r, grid)[:, [0, -1]]
    check_decay(edges * np.exp(-grid.s)[:, None], grid, gamma + 1.0, decay_floor)
    hat = shifted_forward(edges, grid, line.shifted(1.0), 1.0)
    b0 = -lam * hat[:, :1]
    b_theta = -lam * hat[:, 1:]

    sin_theta = np.sin(lam * theta)
    lam_phi_hat = (b0 * np.cos(lam * (theta - phi)) - b_theta * np.cos(lam * phi)) / sin_theta
    dphi_hat = (b0 * np.sin(lam * (theta - phi)) + b_theta * np.sin(lam * phi)) / sin_theta
    return NeumannPotential(
        phi_hat=MellinField(line.shifted(1.0), grid.phi, lam_phi_hat / lam),
        gradient=MellinField(line, grid.phi, np.stack([lam_phi_hat, dphi_hat])),
    )


def commutator(
    kind: CommutatorKind,
    v: VectorField,
    alpha: float,
    gamma: float = DEFAULT_GAMMA,
    config: Optional[WedgeConfig] = None,
    representation: Literal["fourier", "green"] = "fourier",
) -> VectorField:
    """[ℙ,Δ]v bzw. [ℙ, r^{−2α}]v, jeweils −∇Φ."""
    _check_commutator_alpha(kind, alpha, config)
    _, _, imag_tol = _tolerances(config)
    if not np.any(v.stacked()):
        return VectorField.zeros(v.grid)
    if kind == "laplace":
        check_solenoidal_tangent(v, PRECONDITION_TOLERANCE)
        potential = laplace_potential(v, gamma, config)
    elif representation == "fourier":
        potential = potential_fourier(v, alpha, gamma, config)
    else:
        potential = potential_green(v.scaled(np.exp(-2.0 * alpha * v.grid.s)[:, None]), gamma, config)
    return potential.gradient_field(v.grid, imag_tol).scaled(-1.0)


def commutator_direct(
    kind: CommutatorKind,
    v: VectorField,
    alpha: float,
    gamma: float = DEFAULT_GAMMA,
    config: Optional[WedgeConfig] = None,
) -> VectorField:
    """Vergleichswert aus zwei Projektionen: ℙ(r^{−2α}v) − r^{−2α}ℙv bzw. ℙΔv − Δℙv."""
    if kind == "weight":
        weight = np.exp(-2.0 * alpha * v.grid.s)[:, None]
        return project(v.scaled(weight), gamma, config) - project(v, gamma, config).scaled(weight)
    return project(laplacian_vector(v), gamma, config) - laplacian_vector(project(v, gamma, config))


# ─────────────────────────────────────────────
# 🔍 Audits
# ─────────────────────────────────────────────
def _rel(diff: VectorField, ref: VectorField, alpha: float = 0.0) -> float:
    denom = field_alpha_sq(ref, alpha)
    return math.sqrt(field_alpha_sq(diff, alpha) / denom) if denom > 0 else math.sqrt(field_alpha_sq(diff, alpha))


def projection_laws(
    w: VectorField,
    other: Optional[VectorField] = None,
    gamma: float = DEFAULT_GAMMA,
    config: Optional[WedgeConfig] = None,
) -> Dict[str, float]:
    """Relative Defekte von ℙ² = ℙ, Symmetrie, ℙ r∂_r = r∂_r ℙ, div ℙw = 0, n·ℙw = 0."""
    grid = w.grid
    pw = project(w, gamma, config)
    report: Dict[str, float] = {"idempotency": _rel(project(pw, gamma, config) - pw, pw)}

    r_dr_w = spectral_r_dr(w, gamma)
    report["r_dr_commutation"] = _rel(project(r_dr_w, gamma, config) - spectral_r_dr(pw, gamma), project(r_dr_w, gamma, config))

    interior = (slice(4, -4), slice(2, -2))
    div = (divergence(pw).values * grid.r_col)[interior]
    scale = float(np.max(np.abs(pw.stacked()))) or 1.0
    report["divergence"] = float(np.max(np.abs(div))) / scale
    report["normal_trace"] = float(max(np.max(np.abs(pw.u_phi[:, 0])), np.max(np.abs(pw.u_phi[:, -1])))) / scale

    if other is not None:
        grid.check_same(other.grid)
        p_other = project(other, gamma, config)
        lhs = _inner(pw, other)
        rhs = _inner(w, p_other)
        norm = math.sqrt(field_alpha_sq(w, 0.0) * field_alpha_sq(other, 0.0)) or 1.0
        report["symmetry"] = abs(lhs - rhs) / norm
    return report


def _inner(u: VectorField, v: VectorField) -> float:
    from solver.polar_core import integrate_domain

    return integrate_domain(u.u_r * v.u_r + u.u_phi * v.u_phi, u.grid, 2.0)


def projection_bound_ratios(w: VectorField, alphas: Sequence[float], gamma: float = DEFAULT_GAMMA) -> Dict[float, float]:
    """‖ℙw‖_α / ‖w‖_α über eine α-Reihe."""
    pw = project(w, gamma)
    return {a: math.sqrt(field_alpha_sq(pw, a) / field_alpha_sq(w, a)) for a in alphas if field_alpha_sq(w, a) > 0}


def commutator_ratios(v: VectorField, alpha: float, gamma: float = DEFAULT_GAMMA, config: Optional[WedgeConfig] = None) -> Dict[str, float]:
    """
    Gemessene Quotienten der Kommutatorschranken, einzeln berichtet:
      weight_scaled   ‖r⁻¹[ℙ,r^{−2α}]v‖_{−α} / (|α|θ‖v‖_{α+1})
      weight_gradient ⟦[ℙ,r^{−2α}]v⟧_{1,−α} / (|α|‖v‖_{α+1})
      laplace_*       ‖[ℙ,Δ]v‖_α gegen θ⁻²‖v‖_{α+2}, θ⁻¹⟦v⟧_{1,α+1}, ⟦v⟧_{2,α}
    """
    grid = v.grid
    theta = grid.theta
    out: Dict[str, float] = {}
    weight = commutator("weight", v, alpha, gamma, config)
    v_norm = math.sqrt(field_alpha_sq(v, alpha + 1.0))
    if v_norm == 0.0:
        return {"weight_scaled": 0.0, "weight_gradient": 0.0}
    scaled = weight.scaled(1.0 / grid.r_col)
    out["weight_scaled"] = math.sqrt(field_alpha_sq(scaled, -alpha)) / (abs(alpha) * theta * v_norm)
    out["weight_gradient"] = math.sqrt(seminorm_sq(weight, 1, -alpha)) / (abs(alpha) * v_norm)

    lap = commutator("laplace", v, alpha, gamma, config)
    lap_norm = math.sqrt(field_alpha_sq(lap, alpha))
    terms = {"laplace_zero_order": math.sqrt(field_alpha_sq(v, alpha + 2.0)) / theta**2}
    if alpha + 1.0 != 0.0:
        terms["laplace_first_order"] = math.sqrt(seminorm_sq(v, 1, alpha + 1.0)) / theta
        terms["laplace_second_order"] = math.sqrt(seminorm_sq(v, 2, alpha))
    for key, term in terms.items():
        out[key] = lap_norm / term if term > 0 else float("inf")
    return out


def commutator_oracle_gap(kind: CommutatorKind, v: VectorField, alpha: float, gamma: float = DEFAULT_GAMMA, config: Optional[WedgeConfig] = None) -> float:
    """Relative Abweichung zwischen geschlossener Darstellung und direkter Zusammensetzung."""
    closed = commutator(kind, v, alpha, gamma, config)
    direct = commutator_direct(kind, v, alpha, gamma, config)
    interior = VectorField(v.grid, _mask(closed.u_r - direct.u_r), _mask(closed.u_phi - direct.u_phi))
    scale = float(np.max(np.abs(closed.stacked()))) or 1.0
    if not np.all(np.isfinite(interior.stacked())):
        raise ConsistencyError("❌ Nicht-endliche Kommutatorwerte", {"kind": kind})
    return float(np.max(np.abs(interior.stacked()))) / scale


def _mask(values: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values)
    out[4:-4, 2:-2] = values[4:-4, 2:-2]
    return out
