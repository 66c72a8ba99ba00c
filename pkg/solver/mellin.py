"""
──────────────────────────────────────────────
🔭 solver/mellin.py
Numerische Mellin-Transformation auf dem log-radialen Gitter
──────────────────────────────────────────────
    f̂(λ) = (2π)^{−1/2} ∫ r^{−λ} f(r) dr/r = (2π)^{−1/2} ∫ e^{−λs} f(e^s) ds

Stützstellen t_k = (k − c)·Δt mit Δt = 2π/(K·Δs), K ungerade, c = (K−1)/2.
Mit dieser Wahl sind Hin- und Rücktransformation ein exaktes diskretes Paar:
Rundreise und Parseval gelten bis auf Rundungsfehler. Randknoten tragen
nach der Abfallprüfung nichts bei, Rechteck- und Trapezsumme stimmen überein.
"""

from __future__ import annotations

import logging
import math
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import fft as sp_fft
from scipy import special
from scipy.integrate import trapezoid

from models.fields import Grid, MellinField, MellinLine, ScalarField, VectorField
from solver.polar_core import ZETA, d_s
from utils.errors import AdmissibilityError, ConfigError, ConsistencyError, DecayError, GridMismatchError, TruncationError
from utils.finite_diff import differentiate

logger = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2.0 * math.pi)
DEFAULT_DECAY_FLOOR = 1e-8
DEFAULT_TRUNCATION_FLOOR = 1e-6
DEFAULT_IMAG_TOLERANCE = 1e-8

Method = Literal["direct", "fft"]


# ─────────────────────────────────────────────
# 🔍 Prüfungen
# ─────────────────────────────────────────────
def check_decay(values: np.ndarray, grid: Grid, re_lambda: float, floor: float = DEFAULT_DECAY_FLOOR) -> float:
    """Relativer Randwert von e^{−γs}f; über `floor` liegt γ außerhalb des Konvergenzstreifens."""
    weighted = np.abs(np.asarray(values)) * np.exp(-re_lambda * grid.s).reshape((-1,) + (1,) * (np.ndim(values) - 1))
    peak = float(np.max(weighted)) if weighted.size else 0.0
    if peak == 0.0:
        return 0.0
    tail = float(max(np.max(weighted[0]), np.max(weighted[-1]))) / peak
    if tail > floor:
        raise DecayError(
            f"❌ Ungenügender Abfall auf Re λ = {re_lambda:.4f}: Randanteil {tail:.2e} > {floor:.0e}",
            {"re_lambda": re_lambda, "tail": tail, "floor": floor},
        )
    return tail


def truncation_signal(values: np.ndarray) -> float:
    """|û| bei |t| = T relativ zum Maximum."""
    mag = np.abs(values)
    peak = float(np.max(mag)) if mag.size else 0.0
    if peak == 0.0:
        return 0.0
    return float(max(np.max(mag[..., 0, :]), np.max(mag[..., -1, :]))) / peak


# ─────────────────────────────────────────────
# ➡️ Hin- und Rücktransformation (Arrays)
# ─────────────────────────────────────────────
def make_line(grid: Grid, re_lambda: float, n_modes: Optional[int] = None) -> MellinLine:
    return MellinLine.for_grid(grid, re_lambda, n_modes)


def forward_values(
    values: np.ndarray,
    grid: Grid,
    re_lambda: float,
    n_modes: Optional[int] = None,
    method: Method = "direct",
    line: Optional[MellinLine] = None,
) -> Tuple[np.ndarray, MellinLine]:
    """Transformiert entlang Achse 0 (s). Rückgabe hat Form (K, ...) wie die Eingabe."""
    values = np.asarray(values)
    if values.shape[0] != grid.s.size:
        raise GridMismatchError("❌ Radiale Länge passt nicht zum Gitter", {"values": values.shape})
    line = line or make_line(grid, re_lambda, n_modes)
    tail_shape = values.shape[1:]
    flat = values.reshape(grid.s.size, -1)
    weighted = flat * np.exp(-line.re_lambda * grid.s)[:, None]

    if method == "fft":
        spec = sp_fft.fftshift(sp_fft.fft(weighted, n=line.n_modes, axis=0), axes=0)
        out = (grid.ds / SQRT_2PI) * np.exp(-1j * line.t * grid.s[0])[:, None] * spec
    else:
        kernel = np.exp(-1j * np.outer(line.t, grid.s))
        out = (grid.ds / SQRT_2PI) * (kernel @ weighted)
    return out.reshape((line.n_modes,) + tail_shape), line


def inverse_values(values: np.ndarray, grid: Grid, line: MellinLine, method: Method = "direct") -> np.ndarray:
    """Rücktransformation; komplexes Ergebnis der Form (Nr, ...)."""
    values = np.asarray(values, dtype=complex)
    if values.shape[0] != line.n_modes:
        raise GridMismatchError("❌ Anzahl der Moden passt nicht zur Linie", {"values": values.shape})
    tail_shape = values.shape[1:]
    flat = values.reshape(line.n_modes, -1)

    if method == "fft":
        shifted = np.exp(1j * line.t * grid.s[0])[:, None] * flat
        raw = line.n_modes * sp_fft.ifft(sp_fft.ifftshift(shifted, axes=0), axis=0)[: grid.s.size]
    else:
        kernel = np.exp(1j * np.outer(grid.s, line.t))
        raw = kernel @ flat
    out = (line.dt / SQRT_2PI) * np.exp(line.re_lambda * grid.s)[:, None] * raw
    return out.reshape((grid.s.size,) + tail_shape)


def transform_at(values: np.ndarray, grid: Grid, lambdas: np.ndarray) -> np.ndarray:
    """Direkte Summe an beliebigen komplexen λ; Form (len(lambdas), ...)."""
    values = np.asarray(values)
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=complex))
    flat = values.reshape(grid.s.size, -1)
    kernel = np.exp(-np.outer(lambdas, grid.s))
    out = (grid.ds / SQRT_2PI) * (kernel @ flat)
    return out.reshape((lambdas.size,) + values.shape[1:])


def shifted_forward(values: np.ndarray, grid: Grid, line: MellinLine, beta: float, method: Method = "direct") -> np.ndarray:
    """f̂(λ + β) für λ auf `line`, d. h. die Transformation von r^{−β}f."""
    shifted = np.asarray(values) * np.exp(-beta * grid.s).reshape((-1,) + (1,) * (np.ndim(values) - 1))
    out, _ = forward_values(shifted, grid, line.re_lambda, line=line, method=method)
    return out


# ─────────────────────────────────────────────
# 🌊 Feldschnittstelle
# ─────────────────────────────────────────────
def _field_stack(field: Union[ScalarField, VectorField]) -> np.ndarray:
    if isinstance(field, VectorField):
        return np.stack([field.u_r, field.u_phi], axis=1)  # (Nr, 2, Na)
    return field.values


def mellin_forward(
    field: Union[ScalarField, VectorField],
    re_lambda: float,
    n_modes: Optional[int] = None,
    method: Method = "direct",
    decay_floor: float = DEFAULT_DECAY_FLOOR,
) -> MellinField:
    """Mellin-Transformation eines Feldes auf der Linie Re λ = re_lambda."""
    grid = field.grid
    stack = _field_stack(field)
    check_decay(stack, grid, re_lambda, decay_floor)
    out, line = forward_values(stack, grid, re_lambda, n_modes, method)
    if isinstance(field, VectorField):
        out = np.moveaxis(out, 1, 0)  # (2, K, Na)
    return MellinField(line, grid.phi, out)


def mellin_inverse(
    mf: MellinField,
    grid: Grid,
    method: Method = "direct",
    check_truncation: bool = True,
    truncation_floor: float = DEFAULT_TRUNCATION_FLOOR,
    imag_tolerance: float = DEFAULT_IMAG_TOLERANCE,
) -> Union[ScalarField, VectorField]:
    """Rücktransformation über Re λ = γ; verlangt reelles Ergebnis."""
    if check_truncation:
        signal = truncation_signal(mf.values)
        if signal > truncation_floor:
            raise TruncationError(
                f"❌ |û| bei |t| = T nicht vernachlässigbar: {signal:.2e}",
                {"signal": signal, "floor": truncation_floor, "T": mf.line.T},
            )
    values = np.moveaxis(mf.values, 1, 0) if mf.is_vector else mf.values
    raw = inverse_values(values, grid, mf.line, method)
    real = ensure_real(raw, imag_tolerance)
    if mf.is_vector:
        return VectorField(grid, real[:, 0], real[:, 1])
    return ScalarField(grid, real)


def ensure_real(values: np.ndarray, tolerance: float = DEFAULT_IMAG_TOLERANCE) -> np.ndarray:
    scale = float(np.max(np.abs(values))) if np.size(values) else 0.0
    residue = float(np.max(np.abs(values.imag))) if np.size(values) else 0.0
    if scale > 0.0 and residue > tolerance * scale:
        raise ConsistencyError(
            f"❌ Imaginärer Rest {residue / scale:.2e} über Toleranz {tolerance:.0e}",
            {"imag_residue": residue / scale},
        )
    return values.real.copy()


# ─────────────────────────────────────────────
# 🧮 Rechenregeln
# ─────────────────────────────────────────────
CalculusRule = Literal["weight_shift", "d_r_power", "r_dr_power", "pairing", "parseval"]


def _relative(lhs: np.ndarray | complex, rhs: np.ndarray | complex) -> float:
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    scale = float(np.max(np.abs(rhs)))
    diff = float(np.max(np.abs(lhs - rhs)))
    if scale == 0.0:
        return diff
    return diff / scale


def _as_profile(f: Any) -> np.ndarray:
    values = f.values if isinstance(f, ScalarField) else np.asarray(f, dtype=float)
    return values if values.ndim > 1 else values[:, None]


def mellin_calculus_check(
    rule: CalculusRule,
    f: Any,
    grid: Grid,
    g: Any = None,
    params: Optional[Dict[str, float]] = None,
) -> float:
    """
    Wertet beide Seiten einer Rechenregel aus und gibt die relative Abweichung zurück.
    params: `re_lambda` (Linie), `alpha`, `n`.
    """
    params = dict(params or {})
    fv = _as_profile(f)
    gamma = params.get("re_lambda", params.get("alpha", 0.0))

    if rule == "weight_shift":
        if "alpha" not in params:
            raise ConfigError("❌ weight_shift braucht params['alpha']", {"rule": rule})
        alpha = params["alpha"]
        line = make_line(grid, params.get("re_lambda", 0.0))
        lhs, _ = forward_values(fv * np.exp(-alpha * grid.s)[:, None], grid, line.re_lambda, line=line)
        rhs = transform_at(fv, grid, line.lambdas + alpha)
        return _relative(lhs, rhs)

    if rule == "d_r_power":
        if "n" not in params:
            raise ConfigError("❌ d_r_power braucht params['n']", {"rule": rule})
        n = int(params["n"])
        deriv = fv.astype(float)
        for _ in range(n):
            deriv = np.exp(-grid.s)[:, None] * d_s(deriv, grid)
        line = make_line(grid, gamma)
        lhs, _ = forward_values(deriv, grid, gamma, line=line)
        factor = np.ones_like(line.lambdas)
        for m in range(1, n + 1):
            factor = factor * (line.lambdas + m)
        rhs = factor[:, None] * transform_at(fv, grid, line.lambdas + n)
        return _relative(lhs, rhs)

    if rule == "r_dr_power":
        if "n" not in params:
            raise ConfigError("❌ r_dr_power braucht params['n']", {"rule": rule})
        n = int(params["n"])
        line = make_line(grid, gamma)
        deriv = d_s(fv, grid, n) if n else fv
        lhs, _ = forward_values(deriv, grid, gamma, line=line)
        rhs, _ = forward_values(fv, grid, gamma, line=line)
        return _relative(lhs, (line.lambdas**n)[:, None] * rhs)

    if rule in ("pairing", "parseval"):
        if "alpha" not in params:
            raise ConfigError(f"❌ {rule} braucht params['alpha']", {"rule": rule})
        alpha = params["alpha"]
        gv = fv if rule == "parseval" or g is None else _as_profile(g)
        weight = np.exp(-2.0 * alpha * grid.s)[:, None]
        lhs = grid.ds * np.sum(weight * np.conj(fv) * gv)
        line = make_line(grid, alpha)
        F, _ = forward_values(fv, grid, alpha, line=line)
        G, _ = forward_values(gv, grid, alpha, line=line)
        rhs = line.dt * np.sum(np.conj(F) * G)
        return _relative(lhs, rhs)

    raise ConfigError(f"❌ Unbekannte Regel: {rule}", {"rule": rule})


# ─────────────────────────────────────────────
# 📏 Sobolev-Norm auf der Transformationsseite
# ─────────────────────────────────────────────
def mellin_sobolev_norm(mf: MellinField, k: int, alpha: float) -> float:
    """(Σ_{j+ℓ=k} ∫∫ |λ|^{2j}|∂_φ^ℓ û|²)^{1/2} auf Re λ = α + k − 1."""
    expected = alpha + k - 1.0
    if not math.isclose(mf.line.re_lambda, expected, abs_tol=1e-12):
        raise AdmissibilityError(
            f"❌ Linie Re λ = {mf.line.re_lambda} passt nicht zu k={k}, α={alpha} (erwartet {expected})",
            {"re_lambda": mf.line.re_lambda, "expected": expected},
        )
    dphi = float(mf.phi[1] - mf.phi[0])
    lam2 = (np.abs(mf.line.lambdas) ** 2)[:, None]
    comps = [mf.values[0], mf.values[1]] if mf.is_vector else [mf.values]
    total = 0.0
    for comp in comps:
        for j in range(k + 1):
            deriv = differentiate(comp, dphi, axis=1, order=k - j)
            integrand = lam2**j * np.abs(deriv) ** 2
            total += mf.line.dt * float(np.sum(trapezoid(integrand, dx=dphi, axis=1)))
    return math.sqrt(total)


# ─────────────────────────────────────────────
# 🧩 Fortsetzung von Randspuren
# ─────────────────────────────────────────────
def extend_trace(
    traces: Sequence[Tuple[np.ndarray, np.ndarray]],
    k: int,
    alpha: float,
    grid: Grid,
    decay_floor: float = DEFAULT_DECAY_FLOOR,
    strict_decay: bool = True,
) -> ScalarField:
    """
    Fortsetzung U mit ∂_φ^ℓ U = u_ℓ auf beiden Kanten (ℓ < len(traces) ≤ k):
        Û = Σ_ℓ (φ^ℓ/ℓ!) û_ℓ(λ,0) h(φ(1+|λ|)/θ) + (−1)^ℓ ((θ−φ)^ℓ/ℓ!) û_ℓ(λ,θ) h((θ−φ)(1+|λ|)/θ)
    transformiert auf Re λ = α + k − 1.
    strict_decay=False übernimmt Spuren mit Restboden an den Gitterenden ungeprüft.
    """
    if k < 1 or len(traces) > k:
        raise GridMismatchError(f"❌ {len(traces)} Spuren passen nicht zu k={k}", {"k": k, "traces": len(traces)})
    n = grid.s.size
    for ell, pair in enumerate(traces):
        if len(pair) != 2 or any(np.shape(edge) != (n,) for edge in pair):
            raise GridMismatchError(f"❌ Spur {ell} hat inkonsistente Länge", {"trace": ell})

    gamma = alpha + k - 1.0
    line = make_line(grid, gamma)
    theta = grid.theta
    phi = grid.phi[None, :]
    scale = (1.0 + np.abs(line.lambdas))[:, None]
    near_zero = ZETA.bump(phi * scale / theta)
    near_theta = ZETA.bump((theta - phi) * scale / theta)

    total = np.zeros((line.n_modes, grid.phi.size), dtype=complex)
    for ell, (edge0, edge_theta) in enumerate(traces):
        stacked = np.stack([edge0, edge_theta], axis=1)
        if not np.any(stacked):
            continue
        if strict_decay:
            check_decay(stacked, grid, gamma, decay_floor)
        hat, _ = forward_values(stacked, grid, gamma, line=line)
        total += (phi**ell / math.factorial(ell)) * hat[:, :1] * near_zero
        total += ((-1.0) ** ell * (theta - phi) ** ell / math.factorial(ell)) * hat[:, 1:] * near_theta

    real = ensure_real(inverse_values(total, grid, line))
    return ScalarField(grid, real)


def extension_constant(traces: Sequence[Tuple[np.ndarray, np.ndarray]], k: int, alpha: float, grid: Grid) -> float:
    """⟦U⟧_{k,α} / (Σ_ℓ transformseitige Spurnorm): empirische Stetigkeitskonstante."""
    from solver.polar_core import seminorm_sq

    ext = extend_trace(traces, k, alpha, grid)
    gamma = alpha + k - 1.0
    line = make_line(grid, gamma)
    denom = 0.0
    for ell, (edge0, edge_theta) in enumerate(traces):
        hat, _ = forward_values(np.stack([edge0, edge_theta], axis=1), grid, gamma, line=line)
        weight = (1.0 + np.abs(line.lambdas)) ** (2 * (k - ell) - 1)
        denom += line.dt * float(np.sum(weight[:, None] * np.abs(hat) ** 2))
    if denom == 0.0:
        return 0.0
    return math.sqrt(seminorm_sq(ext, k, alpha)) / math.sqrt(denom)


def line_shift_discrepancy(field: ScalarField, gammas: List[float]) -> float:
    """Rücktransformation über verschiedene Linien im Analytizitätsstreifen stimmt überein."""
    results = [mellin_inverse(mellin_forward(field, g), field.grid, check_truncation=False).values for g in gammas]
    ref = results[0]
    scale = float(np.max(np.abs(ref))) or 1.0
    return max(float(np.max(np.abs(r - ref))) / scale for r in results[1:]) if len(results) > 1 else 0.0


def spectral_r_dr(field: Union[ScalarField, VectorField], re_lambda: float, order: int = 1) -> Union[ScalarField, VectorField]:
    """(r∂_r)^order als Multiplikation mit λ^order auf der Linie Re λ = re_lambda."""
    mf = mellin_forward(field, re_lambda)
    values = mf.values * (mf.line.lambdas**order)[:, None]
    return mellin_inverse(MellinField(mf.line, mf.phi, values), field.grid, check_truncation=False)


def gamma_check(
    re_lambda: float = -1.0,
    im_lambdas: Sequence[float] = tuple(np.linspace(-5.0, 5.0, 11)),
    s_range: Tuple[float, float] = (-30.0, 4.0),
    n_radial: int = 2049,
) -> float:
    """Transformation von e^{−r} gegen Γ(−λ)/√(2π) an Stützstellen auf Re λ = re_lambda (< 0)."""
    if re_lambda >= 0.0:
        raise AdmissibilityError(f"❌ Γ(−λ) verlangt Re λ < 0, erhalten {re_lambda}", {"re_lambda": re_lambda})
    s = np.linspace(s_range[0], s_range[1], n_radial)
    grid = Grid(theta=1.0, s=s, phi=np.linspace(0.0, 1.0, 8))
    lambdas = re_lambda + 1j * np.asarray(im_lambdas, dtype=float)
    values = transform_at(np.exp(-grid.r), grid, lambdas)
    reference = special.gamma(-lambdas) / SQRT_2PI
    return float(np.max(np.abs(values - reference) / np.abs(reference)))
