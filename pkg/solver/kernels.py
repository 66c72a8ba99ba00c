"""
──────────────────────────────────────────────
🧷 solver/kernels.py
Separable Green-Kerne in φ, vektorisiert über alle Mellin-Moden
──────────────────────────────────────────────
Ein symmetrischer Kern

    K(φ, φ′) = Σ_m a_m(φ) b_m(φ′)   für φ′ ≤ φ
             = Σ_m b_m(φ) a_m(φ′)   für φ′ ≥ φ

wird auf eine Dichte q angewendet über kumulative Integrale
A_m(φ) = ∫_0^φ b_m q und B_m(φ) = ∫_φ^θ a_m q. Ableitungen nach φ
erzeugen am Diagonalsprung den Term J_{d−1}·q; die Formel gilt, solange
alle Sprünge niedrigerer Ordnung identisch verschwinden (für alle hier
verwendeten Kerne der Fall).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

Profile = Callable[[int], np.ndarray]


def cumulative_from_start(q: np.ndarray, dphi: float) -> np.ndarray:
    """∫_0^φ q entlang der letzten Achse (Simpson, komplex)."""
    q = np.asarray(q)
    real = cumulative_simpson(q.real, dx=dphi, axis=-1, initial=0.0)
    if np.iscomplexobj(q):
        return real + 1j * cumulative_simpson(q.imag, dx=dphi, axis=-1, initial=0.0)
    return real


def integrate_angle(q: np.ndarray, dphi: float) -> np.ndarray:
    """∫_0^θ q entlang der letzten Achse (Simpson, komplex)."""
    q = np.asarray(q)
    real = simpson(q.real, dx=dphi, axis=-1)
    if np.iscomplexobj(q):
        return real + 1j * simpson(q.imag, dx=dphi, axis=-1)
    return real


def cumulative_from_end(q: np.ndarray, dphi: float) -> np.ndarray:
    """∫_φ^θ q entlang der letzten Achse."""
    return np.flip(cumulative_from_start(np.flip(q, axis=-1), dphi), axis=-1)


# ─────────────────────────────────────────────
# 📐 Trigonometrische Ableitungen (geschlossen)
# ─────────────────────────────────────────────
def sin_deriv(mu: np.ndarray, x: np.ndarray, order: int) -> np.ndarray:
    """∂_x^order sin(μx)."""
    return mu**order * np.sin(mu * x + order * np.pi / 2.0)


def cos_deriv(mu: np.ndarray, x: np.ndarray, order: int) -> np.ndarray:
    return mu**order * np.cos(mu * x + order * np.pi / 2.0)


def sin_reflected_deriv(mu: np.ndarray, theta: float, phi: np.ndarray, order: int) -> np.ndarray:
    """∂_φ^order sin(μ(θ − φ))."""
    return (-mu) ** order * np.sin(mu * (theta - phi) + order * np.pi / 2.0)


def cos_reflected_deriv(mu: np.ndarray, theta: float, phi: np.ndarray, order: int) -> np.ndarray:
    return (-mu) ** order * np.cos(mu * (theta - phi) + order * np.pi / 2.0)


# ─────────────────────────────────────────────
# 🧮 Kern
# ─────────────────────────────────────────────
@dataclass(frozen=True)
class SeparableTerm:
    """a(d), b(d) liefern die d-te φ-Ableitung als Array (K, Na)."""

    a: Profile
    b: Profile


@dataclass(frozen=True)
class SeparableKernel:
    terms: Tuple[SeparableTerm, ...]
    dphi: float

    def jump(self, inner: int, order: int) -> np.ndarray:
        """J = Σ_m (a_m^{(order)} b_m^{(inner)} − b_m^{(order)} a_m^{(inner)}) auf der Diagonale."""
        return sum(t.a(order) * t.b(inner) - t.b(order) * t.a(inner) for t in self.terms)

    def apply(self, q: np.ndarray, inner: int = 0, order: int = 0) -> np.ndarray:
        """
        ∂_φ^order ∫_0^θ ∂_{φ′}^inner K(φ, φ′) q(φ′) dφ′ für jede Mode (Zeile) von q.
        """
        out = np.zeros(np.broadcast_shapes(np.shape(q), self.terms[0].a(0).shape), dtype=complex)
        for term in self.terms:
            lower = cumulative_from_start(term.b(inner) * q, self.dphi)
            upper = cumulative_from_end(term.a(inner) * q, self.dphi)
            out += term.a(order) * lower + term.b(order) * upper
        if order >= 1:
            out += self.jump(inner, order - 1) * q
        return out


def evaluate_pointwise(
    terms: Sequence[Tuple[Callable[[float, int], complex], Callable[[float, int], complex]]],
    phi: float,
    phi_prime: float,
    outer: int = 0,
    inner: int = 0,
) -> complex:
    """∂_φ^outer ∂_{φ′}^inner K(φ, φ′) punktweise aus skalaren Profilfunktionen (x, Ordnung)."""
    total = 0.0 + 0.0j
    for a, b in terms:
        if phi_prime <= phi:
            total += a(phi, outer) * b(phi_prime, inner)
        else:
            total += b(phi, outer) * a(phi_prime, inner)
    return complex(total)
