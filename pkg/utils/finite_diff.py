# =============================================================================
# 📐 utils/finite_diff.py
# Differenzen-Sterne auf gleichmäßigen Gittern (s = log r und φ)
# -----------------------------------------------------------------------------
# Innen: zentrierte Sterne 4. Ordnung
# Nachbarn des Randes: zentrierte Sterne 2. Ordnung
# Rand: einseitige Sterne 2. Ordnung
# =============================================================================

from __future__ import annotations

from functools import lru_cache

import numpy as np


# ─────────────────────────────────────────────
# 🧮 Matrizen
# ─────────────────────────────────────────────
@lru_cache(maxsize=64)
def first_derivative_matrix(n: int, h: float) -> np.ndarray:
    """Dichte (n × n)-Matrix der ersten Ableitung."""
    if n < 5:
        raise ValueError(f"❌ Mindestens 5 Knoten nötig, erhalten: {n}")
    D = np.zeros((n, n))
    for i in range(2, n - 2):
        D[i, i - 2 : i + 3] = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * h)
    for i in (1, n - 2):
        D[i, i - 1] = -1.0 / (2.0 * h)
        D[i, i + 1] = 1.0 / (2.0 * h)
    D[0, :3] = np.array([-3.0, 4.0, -1.0]) / (2.0 * h)
    D[-1, -3:] = np.array([1.0, -4.0, 3.0]) / (2.0 * h)
    D.setflags(write=False)
    return D


@lru_cache(maxsize=64)
def second_derivative_matrix(n: int, h: float) -> np.ndarray:
    """Dichte (n × n)-Matrix der zweiten Ableitung."""
    if n < 5:
        raise ValueError(f"❌ Mindestens 5 Knoten nötig, erhalten: {n}")
    D = np.zeros((n, n))
    h2 = h * h
    for i in range(2, n - 2):
        D[i, i - 2 : i + 3] = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * h2)
    for i in (1, n - 2):
        D[i, i - 1 : i + 2] = np.array([1.0, -2.0, 1.0]) / h2
    D[0, :4] = np.array([2.0, -5.0, 4.0, -1.0]) / h2
    D[-1, -4:] = np.array([-1.0, 4.0, -5.0, 2.0]) / h2
    D.setflags(write=False)
    return D


def derivative_matrix(n: int, h: float, order: int) -> np.ndarray:
    """Ableitung beliebiger Ordnung durch Verkettung der Basissterne."""
    if order == 0:
        return np.eye(n)
    if order == 1:
        return first_derivative_matrix(n, h)
    if order == 2:
        return second_derivative_matrix(n, h)
    return second_derivative_matrix(n, h) @ derivative_matrix(n, h, order - 2)


# ─────────────────────────────────────────────
# 🔧 Anwendung entlang einer Achse
# ─────────────────────────────────────────────
def differentiate(values: np.ndarray, h: float, axis: int, order: int = 1) -> np.ndarray:
    """Wendet die Ableitungsmatrix entlang `axis` an (reell oder komplex)."""
    if order == 0:
        return np.array(values, copy=True)
    values = np.asarray(values)
    D = derivative_matrix(values.shape[axis], float(h), order)
    moved = np.moveaxis(values, axis, 0)
    out = np.tensordot(D, moved, axes=(1, 0))
    return np.moveaxis(out, 0, axis)
