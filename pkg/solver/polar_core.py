"""
──────────────────────────────────────────────
🧭 solver/polar_core.py
Polare Differentialoperatoren, gewichtete Normen, Abschneidefunktion ζ
und die Prüfungen der klassischen Ungleichungen (Hardy, Poincaré).
──────────────────────────────────────────────
Konventionen:
  • s = log r, daher r∂_r = ∂_s
  • ∫_Ω F dx = ∫∫ F e^{2s} ds dφ
  • ∇⊥ψ = (−r⁻¹∂_φψ, ∂_rψ)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Iterable, List, Literal, Optional, Union

import numpy as np
from scipy.integrate import trapezoid

from models.fields import AngularPolynomial, BoundaryData, Grid, ScalarField, VectorField
from utils.errors import AdmissibilityError, ConsistencyError, FieldArityError
from utils.finite_diff import differentiate

logger = logging.getLogger(__name__)

Field = Union[ScalarField, VectorField]


# ─────────────────────────────────────────────
# ✂️ Abschneidefunktion ζ
# ─────────────────────────────────────────────
def _psi(x: np.ndarray) -> tuple[np.ndarray, ...]:
    """ψ(x) = e^{−1/x} mit den Ableitungen bis zur dritten, für x ∈ (0, 1)."""
    val = np.exp(-1.0 / x)
    d1 = val / x**2
    d2 = val * (1.0 / x**4 - 2.0 / x**3)
    d3 = val * (1.0 / x**6 - 6.0 / x**5 + 6.0 / x**4)
    return val, d1, d2, d3


def smooth_step(x: np.ndarray | float, order: int = 0) -> np.ndarray:
    """
    Glatter Übergang S: S = 0 für x ≤ 0, S = 1 für x ≥ 1, C^∞ dazwischen.
    order ∈ {0, 1, 2, 3} liefert S oder die entsprechende Ableitung.
    """
    if order not in (0, 1, 2, 3):
        raise ValueError(f"❌ Ableitungsordnung {order} nicht unterstützt")
    x = np.asarray(x, dtype=float)
    inside = (x > 0.0) & (x < 1.0)
    xc = np.clip(x, 1e-3, 1.0 - 1e-3)
    num = _psi(xc)
    mirrored = _psi(1.0 - xc)
    den = [num[k] + (-1) ** k * mirrored[k] for k in range(4)]

    # S·D = N, Leibniz-Regel nach S^{(k)} aufgelöst
    derivs = [num[0] / den[0]]
    for k in range(1, order + 1):
        acc = num[k] - sum(math.comb(k, i) * derivs[i] * den[k - i] for i in range(k))
        derivs.append(acc / den[0])

    if order == 0:
        return np.where(inside, derivs[0], (x >= 1.0).astype(float))
    return np.where(inside, derivs[order], 0.0)


@dataclass(frozen=True)
class Cutoff:
    """
    ζ(r) = 1 − S(r − 1): ζ = 1 auf [0, 1], ζ = 0 auf [2, ∞), monoton dazwischen.
    Dazu die Glocke h(x) = ζ(2x + ½) und die gestreckte Familie η_n(r) = ζ(|log r|/n).
    """

    def __call__(self, r: np.ndarray | float) -> np.ndarray:
        return 1.0 - smooth_step(np.asarray(r, dtype=float) - 1.0)

    def derivative(self, r: np.ndarray | float, order: int = 1) -> np.ndarray:
        if order == 0:
            return self(r)
        return -smooth_step(np.asarray(r, dtype=float) - 1.0, order)

    def r_dr(self, r: np.ndarray | float, order: int = 1) -> np.ndarray:
        """(r∂_r)^order ζ für order ≤ 2."""
        r = np.asarray(r, dtype=float)
        if order == 0:
            return self(r)
        if order == 1:
            return r * self.derivative(r, 1)
        if order == 2:
            return r * self.derivative(r, 1) + r**2 * self.derivative(r, 2)
        raise ValueError(f"❌ Ordnung {order} nicht unterstützt")

    def bump(self, x: np.ndarray | float) -> np.ndarray:
        """h(x) = ζ(2x + ½): 1 auf [0, ¼], 0 ab ¾."""
        return self(2.0 * np.asarray(x, dtype=float) + 0.5)

    def dilated(self, r: np.ndarray | float, n: float) -> np.ndarray:
        """η_n(r) = ζ(|log r|/n), Träger [e^{−2n}, e^{2n}]."""
        return self(np.abs(np.log(np.asarray(r, dtype=float))) / n)

    def dilated_r_dr(self, r: np.ndarray | float, n: float, order: int = 1) -> np.ndarray:
        """(r∂_r)^j η_n = n^{−j}·η^{(j)}(log r / n) mit η(x) = ζ(|x|)."""
        x = np.log(np.asarray(r, dtype=float)) / n
        sign = np.sign(x)
        if order == 1:
            return sign * self.derivative(np.abs(x), 1) / n
        if order == 2:
            return self.derivative(np.abs(x), 2) / n**2
        return self.dilated(r, n)


ZETA = Cutoff()


# ─────────────────────────────────────────────
# 📐 Ableitungen auf dem Gitter
# ─────────────────────────────────────────────
def d_s(values: np.ndarray, grid: Grid, order: int = 1) -> np.ndarray:
    """(r∂_r)^order = ∂_s^order entlang Achse 0."""
    return differentiate(values, grid.ds, axis=0, order=order)


def d_phi(values: np.ndarray, grid: Grid, order: int = 1) -> np.ndarray:
    return differentiate(values, grid.dphi, axis=1, order=order)


def mixed_derivative(values: np.ndarray, grid: Grid, j: int, ell: int) -> np.ndarray:
    """(r∂_r)^j ∂_φ^ℓ."""
    out = d_phi(values, grid, ell) if ell else np.asarray(values)
    return d_s(out, grid, j) if j else out


def radial_derivative(field: Field, order: int = 1) -> Field:
    """(r∂_r)^order komponentenweise."""
    g = field.grid
    if isinstance(field, VectorField):
        return VectorField(g, d_s(field.u_r, g, order), d_s(field.u_phi, g, order))
    return ScalarField(g, d_s(field.values, g, order))


# ─────────────────────────────────────────────
# 🧮 Polare Operatoren
# ─────────────────────────────────────────────
OperatorKind = Literal[
    "gradient", "divergence", "curl", "laplacian_vector", "laplacian_scalar", "rotated_gradient"
]
_SCALAR_KINDS = {"gradient", "laplacian_scalar", "rotated_gradient"}
_VECTOR_KINDS = {"divergence", "curl", "laplacian_vector"}


def gradient(p: ScalarField) -> VectorField:
    g = p.grid
    inv_r = 1.0 / g.r_col
    return VectorField(g, inv_r * d_s(p.values, g), inv_r * d_phi(p.values, g))


def divergence(u: VectorField) -> ScalarField:
    g = u.grid
    return ScalarField(g, (d_s(u.u_r, g) + u.u_r + d_phi(u.u_phi, g)) / g.r_col)


def curl(u: VectorField) -> ScalarField:
    g = u.grid
    return ScalarField(g, (d_s(u.u_phi, g) + u.u_phi - d_phi(u.u_r, g)) / g.r_col)


def laplacian_scalar(p: ScalarField) -> ScalarField:
    g = p.grid
    return ScalarField(g, (d_s(p.values, g, 2) + d_phi(p.values, g, 2)) / g.r_col**2)


def laplacian_vector(u: VectorField) -> VectorField:
    g = u.grid
    inv_r2 = 1.0 / g.r_col**2
    lap_r = d_s(u.u_r, g, 2) + d_phi(u.u_r, g, 2)
    lap_phi = d_s(u.u_phi, g, 2) + d_phi(u.u_phi, g, 2)
    return VectorField(
        g,
        inv_r2 * (lap_r - u.u_r - 2.0 * d_phi(u.u_phi, g)),
        inv_r2 * (lap_phi - u.u_phi + 2.0 * d_phi(u.u_r, g)),
    )


def rotated_gradient(psi: ScalarField) -> VectorField:
    g = psi.grid
    inv_r = 1.0 / g.r_col
    return VectorField(g, -inv_r * d_phi(psi.values, g), inv_r * d_s(psi.values, g))


_OPERATORS = {
    "gradient": gradient,
    "divergence": divergence,
    "curl": curl,
    "laplacian_vector": laplacian_vector,
    "laplacian_scalar": laplacian_scalar,
    "rotated_gradient": rotated_gradient,
}


def polar_operator(kind: OperatorKind, field: Field, grid: Optional[Grid] = None) -> Field:
    """Wendet den polaren Operator `kind` knotenweise an."""
    if kind not in _OPERATORS:
        raise FieldArityError(f"❌ Unbekannter Operator: {kind}", {"kind": kind})
    if grid is not None:
        grid.check_same(field.grid)
    if kind in _SCALAR_KINDS and not isinstance(field, ScalarField):
        raise FieldArityError(f"❌ Operator {kind} erwartet ein Skalarfeld", {"kind": kind})
    if kind in _VECTOR_KINDS and not isinstance(field, VectorField):
        raise FieldArityError(f"❌ Operator {kind} erwartet ein Vektorfeld", {"kind": kind})
    return _OPERATORS[kind](field)


# ─────────────────────────────────────────────
# 📏 Gewichtete Normen
# ─────────────────────────────────────────────
def _components(obj: Field) -> List[np.ndarray]:
    if isinstance(obj, VectorField):
        return [obj.u_r, obj.u_phi]
    return [obj.values]


def integrate_domain(values: np.ndarray, grid: Grid, weight_exponent: float) -> float:
    """∫∫ e^{weight_exponent·s} values ds dφ (Trapezregel in s und φ)."""
    weighted = values * np.exp(weight_exponent * grid.s)[:, None]
    return float(trapezoid(trapezoid(weighted, dx=grid.dphi, axis=1), dx=grid.ds))


def integrate_edges(values: tuple[np.ndarray, np.ndarray], grid: Grid, weight_exponent: float) -> float:
    w = np.exp(weight_exponent * grid.s)
    return float(sum(trapezoid(edge * w, dx=grid.ds) for edge in values))


def field_alpha_sq(obj: Field, alpha: float) -> float:
    """‖u‖²_α = ∫ r^{−2α}|u|² dx."""
    return sum(integrate_domain(c**2, obj.grid, 2.0 - 2.0 * alpha) for c in _components(obj))


def _check_weight(k: int, alpha: float) -> None:
    if math.isclose(alpha + k - 1.0, 0.0, abs_tol=1e-12):
        raise AdmissibilityError(
            f"❌ Entartetes Gewicht: k + α − 1 = 0 (k={k}, α={alpha})", {"k": k, "alpha": alpha}
        )


def seminorm_sq(obj: Field, k: int, alpha: float) -> float:
    """⟦u⟧²_{k,α} = Σ_{j+ℓ=k} ∫ r^{−2α−2k}|(r∂_r)ʲ∂_φ^ℓ u|² dx."""
    _check_weight(k, alpha)
    exponent = -2.0 * (alpha + k - 1.0)
    total = 0.0
    for comp in _components(obj):
        for j in range(k + 1):
            total += integrate_domain(mixed_derivative(comp, obj.grid, j, k - j) ** 2, obj.grid, exponent)
    return total


def boundary_alpha_sq(data: BoundaryData, alpha: float) -> float:
    """|u|²_α = Σ_Kanten ∫ r^{−2α}|u|² dr."""
    return integrate_edges((data.at_zero**2, data.at_theta**2), data.grid, 1.0 - 2.0 * alpha)


def hk_sq(obj: Field, k: int, alpha: float, start: int = 0) -> float:
    """Σ_{ℓ=start..k} ⟦u⟧²_{ℓ,α}."""
    return sum(seminorm_sq(obj, ell, alpha) for ell in range(start, k + 1))


def scriptH_norm(u: VectorField, k: int, alpha: float) -> float:
    return math.sqrt(hk_sq(u, k, alpha, start=1) + boundary_alpha_sq(u.edge_traces(), alpha))


def scriptZ_norm(f: VectorField, k: int, alpha: float) -> float:
    return math.sqrt(field_alpha_sq(f, alpha - 1.0)) + math.sqrt(hk_sq(f, k, alpha))


def trace_seminorm(extension: Field, k: int, alpha: float) -> float:
    """[·]_{k−½,α} ausgewertet an einer gegebenen Fortsetzung (obere Schranke)."""
    return math.sqrt(seminorm_sq(extension, k, alpha))


def scriptX_norm(g: BoundaryData, k: int, alpha: float) -> float:
    """|g|_{𝒳^k_α} mit der konstruktiven Fortsetzung als Ersatz für das Infimum."""
    from solver.mellin import extend_trace

    rdr = BoundaryData(g.grid, d_s(g.at_zero[:, None], g.grid)[:, 0], d_s(g.at_theta[:, None], g.grid)[:, 0])
    total = boundary_alpha_sq(g, alpha) + boundary_alpha_sq(rdr, alpha)
    for ell in range(1, k + 1):
        ext = extend_trace([(g.at_zero, g.at_theta)], ell, alpha, g.grid)
        total += seminorm_sq(ext, ell, alpha)
    return math.sqrt(total)


def polynomial_norm(poly: AngularPolynomial, M: int) -> float:
    """‖P‖_{P_{k,M}} = (Σ_j ‖a⁽ʲ⁾‖²_{H^M(0,θ)})^{1/2}, Ableitungen per Differenzen."""
    if poly.is_zero():
        return 0.0
    h = float(poly.phi[1] - poly.phi[0])
    total = 0.0
    for j in range(poly.degree + 1):
        coeff = np.atleast_2d(poly.coefficient(j))
        for m in range(M + 1):
            deriv = differentiate(coeff, h, axis=1, order=m)
            total += float(np.sum(trapezoid(deriv**2, dx=h, axis=1)))
    return math.sqrt(total)


def _split(obj: Any) -> tuple[Optional[AngularPolynomial], Field]:
    poly = getattr(obj, "polynomial_part", None)
    regular = getattr(obj, "regular_part", obj)
    return poly, regular


def X_norm(obj: Any, M: int, alpha: float) -> float:
    poly, u1 = _split(obj)
    base = polynomial_norm(poly, M) if poly is not None else 0.0
    return base + scriptH_norm(u1, M, alpha)


def Y_norm(obj: Any, M: int, alpha: float, p0: float = 0.0) -> float:
    poly, p1 = _split(obj)
    base = polynomial_norm(poly, M) if poly is not None else 0.0
    return base + abs(p0) + math.sqrt(hk_sq(p1, M, alpha, start=1))


def Z_norm(obj: Any, M: int, alpha: float) -> float:
    poly, f1 = _split(obj)
    base = polynomial_norm(poly, M) if poly is not None else 0.0
    return base + scriptZ_norm(f1, M, alpha)


def frakX_sq_parts(u: VectorField, alpha: float, theta: float) -> dict[str, float]:
    """Die vier Summanden von ‖u‖²_𝔛 einzeln (ohne Skalierung)."""
    traces = u.edge_traces()
    g = u.grid
    rdr_traces = BoundaryData(g, d_s(u.u_r, g)[:, 0], d_s(u.u_r, g)[:, -1])
    return {
        "u_r": boundary_alpha_sq(traces, alpha),
        "r_dr_u_r": boundary_alpha_sq(rdr_traces, alpha),
        "seminorm_1": seminorm_sq(u, 1, alpha),
        "seminorm_2": seminorm_sq(u, 2, alpha - 1.0),
    }


def frakX_norm(u: VectorField, alpha: float, theta: float) -> float:
    scale = abs(alpha) * theta**3
    parts = frakX_sq_parts(u, alpha, theta)
    return math.sqrt(parts["u_r"] + scale * parts["r_dr_u_r"] + parts["seminorm_1"] + scale * parts["seminorm_2"])


def frakY_norm(p: ScalarField, alpha: float, theta: float) -> float:
    return math.sqrt(abs(alpha) * theta**3 * seminorm_sq(p, 1, alpha - 1.0))


NormKind = Literal[
    "field_alpha", "seminorm_k_alpha", "boundary_alpha", "trace_seminorm", "X_norm", "Y_norm",
    "Z_norm", "frakX", "frakY", "scriptH", "scriptZ", "scriptX", "P_kM",
]


def weighted_norm(kind: NormKind, obj: Any, k: int = 0, alpha: float = 0.5, theta: Optional[float] = None) -> float:
    """
    Einheitlicher Einstieg für alle Normen. Gibt immer die Norm zurück
    (Wurzel der quadratischen Größe). k dient bei X/Y/Z/P_kM als M.
    """
    if kind == "field_alpha":
        return math.sqrt(field_alpha_sq(obj, alpha))
    if kind == "seminorm_k_alpha":
        return math.sqrt(seminorm_sq(obj, k, alpha))
    if kind == "boundary_alpha":
        data = obj if isinstance(obj, BoundaryData) else obj.edge_traces()
        return math.sqrt(boundary_alpha_sq(data, alpha))
    if kind == "trace_seminorm":
        return trace_seminorm(obj, k, alpha)
    if kind == "X_norm":
        return X_norm(obj, k, alpha)
    if kind == "Y_norm":
        return Y_norm(obj, k, alpha)
    if kind == "Z_norm":
        return Z_norm(obj, k, alpha)
    if kind == "scriptH":
        return scriptH_norm(obj, k, alpha)
    if kind == "scriptZ":
        return scriptZ_norm(obj, k, alpha)
    if kind == "scriptX":
        return scriptX_norm(obj, k, alpha)
    if kind == "P_kM":
        return polynomial_norm(obj, k)
    if kind in ("frakX", "frakY"):
        theta = theta if theta is not None else _grid_of(obj).theta
        return frakX_norm(obj, alpha, theta) if kind == "frakX" else frakY_norm(obj, alpha, theta)
    raise FieldArityError(f"❌ Unbekannte Norm: {kind}", {"kind": kind})


def _grid_of(obj: Any) -> Grid:
    return getattr(obj, "grid")


def cutoff_density_defect(u: Field, k: int, alpha: float, orders: Iterable[float]) -> List[float]:
    """⟦η_n u − u⟧_{k,α} für die gegebenen n; fällt mit wachsendem n."""
    g = u.grid
    out = []
    for n in orders:
        eta = ZETA.dilated(g.r, n)[:, None]
        diff = u.scaled(eta) - u
        out.append(math.sqrt(seminorm_sq(diff, k, alpha)))
    return out


# ─────────────────────────────────────────────
# ⚖️ Ungleichungsprüfungen
# ─────────────────────────────────────────────
def hardy_ratio(profile: np.ndarray, grid: Grid, alpha: float) -> float:
    """
    α²∫r^{2α}|u|² dr/r  /  ∫r^{2α}|r∂_r u|² dr/r per Trapezregel in s und
    Differenzen für r∂_r. Profile, die an den Gitterenden nicht abfallen, können
    über 1 liegen; das ist dann ein echter Befund.
    """
    if alpha == 0.0:
        raise AdmissibilityError("❌ Hardy-Ungleichung verlangt α ≠ 0", {"alpha": alpha})
    profile = np.asarray(profile, dtype=float)
    if profile.shape != grid.s.shape:
        raise FieldArityError("❌ Profil passt nicht zum radialen Gitter", {"profile": profile.shape, "grid": grid.s.shape})
    weight = np.exp(2.0 * alpha * grid.s)
    derivative = d_s(profile[:, None], grid)[:, 0]
    rhs = float(trapezoid(weight * derivative**2, dx=grid.ds))
    if rhs == 0.0:
        return 0.0
    return float(alpha**2 * trapezoid(weight * profile**2, dx=grid.ds) / rhs)


def _dct1_energies(values: np.ndarray) -> np.ndarray:
    """Energie je Kosinusmode cos(kπφ/θ), k = 0..N−1, bzgl. Trapezgewichten."""
    n = values.size
    n1 = n - 1
    j = np.arange(n)
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    basis = np.cos(np.pi * np.outer(np.arange(n), j) / n1)
    coeff = basis @ (w * values)
    norms = np.full(n, n1 / 2.0)
    norms[0] = norms[-1] = float(n1)
    return coeff**2 / norms


def _dst1_energies(values: np.ndarray) -> np.ndarray:
    """Energie je Sinusmode sin(kπφ/θ), k = 1..N−2, aus den inneren Knoten."""
    n1 = values.size - 1
    j = np.arange(1, n1)
    basis = np.sin(np.pi * np.outer(np.arange(1, n1), j) / n1)
    coeff = basis @ values[1:-1]
    return coeff**2 / (n1 / 2.0)


def poincare_ratio(
    profile: np.ndarray, theta: float, mode: Literal["auto", "dirichlet", "mean_zero"] = "auto", tol: float = 1e-8
) -> float:
    """
    ∫|f|² / ((θ²/π²)∫|∂_φf|²) mit spektraler Ableitung; exakt 1 für sin(πφ/θ).
    """
    f = np.asarray(profile, dtype=float)
    scale = max(float(np.max(np.abs(f))), 1e-300)
    if mode == "auto":
        mode = "dirichlet" if max(abs(f[0]), abs(f[-1])) <= tol * scale else "mean_zero"

    if mode == "dirichlet":
        if max(abs(f[0]), abs(f[-1])) > tol * scale:
            raise ConsistencyError("❌ Profil verschwindet nicht an beiden Enden", {"f0": f[0], "f_theta": f[-1]})
        energy = _dst1_energies(f)
        k = np.arange(1, energy.size + 1)
    else:
        energy = _dct1_energies(f)
        if energy[0] > (tol * scale) ** 2 * f.size:
            raise ConsistencyError("❌ Profil hat keinen Mittelwert null", {"mean_energy": energy[0]})
        energy = energy[1:]
        k = np.arange(1, energy.size + 1)
    rhs = float(np.sum(k**2 * energy))
    if rhs == 0.0:
        return 0.0
    return float(np.sum(energy) / rhs)


def gradient_energy_density(u: VectorField) -> np.ndarray:
    """r²|∇u|² in Polarkomponenten."""
    g = u.grid
    return (
        d_s(u.u_r, g) ** 2
        + d_s(u.u_phi, g) ** 2
        + (d_phi(u.u_r, g) - u.u_phi) ** 2
        + (d_phi(u.u_phi, g) + u.u_r) ** 2
    )


def check_solenoidal_tangent(u: VectorField, tol: float) -> None:
    g = u.grid
    grad = math.sqrt(integrate_domain(gradient_energy_density(u), g, 0.0)) or 1.0
    div = math.sqrt(integrate_domain((divergence(u).values * g.r_col) ** 2, g, 0.0))
    tangent = float(max(np.max(np.abs(u.u_phi[:, 0])), np.max(np.abs(u.u_phi[:, -1]))))
    scale = float(np.max(np.abs(u.stacked()))) or 1.0
    if div > tol * grad or tangent > tol * scale:
        raise ConsistencyError(
            "❌ Feld ist nicht divergenzfrei und tangential",
            {"divergence": div / grad, "normal_trace": tangent / scale},
        )


def improved_hardy_constant(u: VectorField, alpha: float) -> float:
    """Empirische Konstante ‖r⁻¹u‖²_α / (θ²‖∇u‖²_α)."""
    g = u.grid
    lhs = integrate_domain(u.u_r**2 + u.u_phi**2, g, -2.0 * alpha)
    rhs = integrate_domain(gradient_energy_density(u), g, -2.0 * alpha)
    return lhs / (g.theta**2 * rhs) if rhs > 0 else 0.0


def improved_hardy_ratio(u: VectorField, alpha: float, c0: Optional[float] = None, tol: float = 1e-3) -> float:
    """
    ‖r⁻¹u‖²_α / (C₀θ²‖∇u‖²_α) für ein vorgegebenes C₀. Ohne C₀ kommt die
    empirische Konstante ‖r⁻¹u‖²_α / (θ²‖∇u‖²_α) zurück, ohne Vergleich.
    """
    if alpha == 0.0:
        raise AdmissibilityError("❌ Verbesserte Hardy-Ungleichung verlangt α ≠ 0", {"alpha": alpha})
    check_solenoidal_tangent(u, tol)
    constant = improved_hardy_constant(u, alpha)
    return constant if c0 is None else constant / c0


AuditKind = Literal["hardy", "improved_hardy", "poincare"]


def inequality_audit(
    kind: AuditKind,
    obj: Any,
    alpha: float,
    *,
    grid: Optional[Grid] = None,
    theta: Optional[float] = None,
    c0: Optional[float] = None,
) -> float:
    """
    Quotient linke Seite / (rechte Seite × Konstante); ≤ 1 bestätigt die Instanz.
    improved_hardy ohne c0 liefert die empirische Konstante statt eines Quotienten.
    """
    if kind == "hardy":
        if grid is None:
            raise FieldArityError("❌ Hardy-Prüfung braucht das radiale Gitter", {})
        ratio = hardy_ratio(obj, grid, alpha)
    elif kind == "improved_hardy":
        ratio = improved_hardy_ratio(obj, alpha, c0)
    elif kind == "poincare":
        if theta is None:
            theta = grid.theta if grid is not None else None
        if theta is None:
            raise FieldArityError("❌ Poincaré-Prüfung braucht θ", {})
        ratio = poincare_ratio(obj, theta)
    else:
        raise FieldArityError(f"❌ Unbekannte Prüfung: {kind}", {"kind": kind})
    logger.debug(f"⚖️ {kind}: Quotient {ratio:.6f}")
    return ratio
