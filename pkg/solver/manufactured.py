"""
──────────────────────────────────────────────
🧪 solver/manufactured.py
Geschlossene Lösungen für Selbsttests: Stromfunktion × Gauß, Spitzenpolynom j = 2
──────────────────────────────────────────────
u = ∇⊥ψ mit ψ = B(s)Θ(φ), also u_r = −e^{−s}BΘ′, u_φ = e^{−s}B′Θ, und
p = P(s)Φ(φ). Daraus f = −Δu + ∇p, 𝔤 = ∂_φu_r und die Navier-Daten g.
Θ(0) = Θ(θ) = 0 sorgt für u_φ = 0 auf den Kanten.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np

from models.fields import AngularPolynomial, BoundaryData, Grid, ScalarField, VectorField

AngularKind = Literal["sin", "parabola"]


def gaussian(s: np.ndarray, center: float, width: float, amplitude: float = 1.0) -> Tuple[np.ndarray, ...]:
    """B und die ersten drei Ableitungen in s."""
    z = (np.asarray(s, dtype=float) - center) / width
    b = amplitude * np.exp(-(z**2))
    return b, -2.0 * z / width * b, (4.0 * z**2 - 2.0) / width**2 * b, (-8.0 * z**3 + 12.0 * z) / width**3 * b


def angular_profile(phi: np.ndarray, theta: float, kind: AngularKind = "sin", m: int = 1) -> Tuple[np.ndarray, ...]:
    phi = np.asarray(phi, dtype=float)
    if kind == "sin":
        k = m * math.pi / theta
        return np.sin(k * phi), k * np.cos(k * phi), -(k**2) * np.sin(k * phi), -(k**3) * np.cos(k * phi)
    zeros = np.zeros_like(phi)
    return phi * (theta - phi), theta - 2.0 * phi, zeros - 2.0, zeros


@dataclass(frozen=True, eq=False)
class ManufacturedCase:
    u: VectorField
    p: ScalarField
    f: VectorField
    g_navier: BoundaryData
    g_frak: BoundaryData


@dataclass(frozen=True)
class StreamCase:
    """Parameter von ψ = B(s)Θ(φ) und p = P(s)cos(κφ); pressure_amplitude = 0 schaltet den Druck ab."""

    center: float = 0.0
    width: float = 1.0
    amplitude: float = 1.0
    kind: AngularKind = "sin"
    m: int = 1
    pressure_center: float = 0.3
    pressure_width: float = 0.8
    pressure_amplitude: float = 0.0

    def sample(self, s: np.ndarray, phi: np.ndarray, theta: float) -> dict[str, np.ndarray]:
        """Alle Größen an beliebigen (s, φ) (broadcastfähig)."""
        s = np.asarray(s, dtype=float)
        phi = np.asarray(phi, dtype=float)
        B, B1, B2, B3 = gaussian(s, self.center, self.width, self.amplitude)
        T, T1, T2, T3 = angular_profile(phi, theta, self.kind, self.m)
        e1, e2 = np.exp(-s), np.exp(-2.0 * s)

        u_r = -e1 * B * T1
        u_phi = e1 * B1 * T
        d_omega_phi = e2 * (B2 * T1 + B * T3)
        d_omega_s = e2 * (B3 * T + B1 * T2 - 2.0 * B2 * T - 2.0 * B * T2)
        f_r = e1 * d_omega_phi
        f_phi = -e1 * d_omega_s

        k = math.pi / theta
        P, P1, _, _ = gaussian(s, self.pressure_center, self.pressure_width, self.pressure_amplitude)
        p = P * np.cos(k * phi)
        f_r = f_r + e1 * P1 * np.cos(k * phi)
        f_phi = f_phi - e1 * P * k * np.sin(k * phi)
        du_r = -e1 * B * T2
        return {"u_r": u_r, "u_phi": u_phi, "p": p, "f_r": f_r, "f_phi": f_phi, "du_r": du_r}

    def velocity(self, theta: float):
        """(s, φ) ↦ (u_r, u_φ), etwa als Dirichlet-Referenz des FD-Orakels."""

        def sample(s: np.ndarray, phi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
            values = self.sample(s, phi, theta)
            return values["u_r"], values["u_phi"]

        return sample

    def forcing(self, theta: float):
        def sample(s: np.ndarray, phi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
            values = self.sample(s, phi, theta)
            return values["f_r"], values["f_phi"]

        return sample

    def navier_data(self, theta: float):
        """s ↦ (g₀, g_θ) mit g = u_r + σr⁻¹∂_φu_r, σ₀ = −1, σ_θ = +1."""

        def sample(s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
            s = np.asarray(s, dtype=float)
            r_inv = np.exp(-s)
            edges = []
            for phi, sigma in ((0.0, -1.0), (theta, 1.0)):
                values = self.sample(s, np.full_like(s, phi), theta)
                edges.append(values["u_r"] + sigma * r_inv * values["du_r"])
            return edges[0], edges[1]

        return sample

    def on_grid(self, grid: Grid) -> ManufacturedCase:
        values = self.sample(grid.s[:, None], grid.phi[None, :], grid.theta)
        g0, g_theta = self.navier_data(grid.theta)(grid.s)
        return ManufacturedCase(
            u=VectorField(grid, values["u_r"], values["u_phi"]),
            p=ScalarField(grid, values["p"]),
            f=VectorField(grid, values["f_r"], values["f_phi"]),
            g_navier=BoundaryData(grid, g0, g_theta),
            g_frak=BoundaryData(grid, values["du_r"][:, 0], values["du_r"][:, -1]),
        )


def stream_case(grid: Grid, case: Optional[StreamCase] = None) -> ManufacturedCase:
    return (case or StreamCase()).on_grid(grid)


# ─────────────────────────────────────────────
# 🌱 Spitzenpolynom j = 2
# ─────────────────────────────────────────────
def polynomial_case(
    grid: Grid, A: float = 1.0, B: float = 0.5, c: float = 0.25, m: int = 1
) -> Tuple[AngularPolynomial, AngularPolynomial, AngularPolynomial]:
    """
    u⁽²⁾ = (−(Aκ/3)cos κφ, A sin κφ), p⁽¹⁾ = B cos κφ + c mit κ = mπ/θ.
    Rückgabe (𝓟_f vom Grad 0, erwartetes 𝓟_u vom Grad 2, erwartetes 𝓟_p vom Grad 1).
    """
    phi, theta = grid.phi, grid.theta
    k = m * math.pi / theta
    cos, sin = np.cos(k * phi), np.sin(k * phi)

    f = np.zeros((1, 2, phi.size))
    f[0, 0] = (A * k * (9.0 - k**2) / 3.0 + B) * cos + c
    f[0, 1] = -((3.0 - k**2) * A + 2.0 * A * k**2 / 3.0 + B * k) * sin

    u = np.zeros((3, 2, phi.size))
    u[2, 0] = -(A * k / 3.0) * cos
    u[2, 1] = A * sin

    p = np.zeros((2, phi.size))
    p[1] = B * cos + c
    return (
        AngularPolynomial(theta, phi, f),
        AngularPolynomial(theta, phi, u),
        AngularPolynomial(theta, phi, p),
    )
