"""
──────────────────────────────────────────────
🚰 solver/navier_slip.py
Stokes im Keil mit Navier-Slip: Spitzenpolynom, Lokalisierung, regulärer Teil
──────────────────────────────────────────────
Randbedingung auf beiden Kanten (σ₀ = −1, σ_θ = +1):

    u_φ = 0,   u_r + σ r⁻¹ ∂_φu_r = g.

Der reguläre Teil wird auf Free-Slip zurückgeführt: ∂_φu_r = 𝔤 mit
𝔤 = σ(rg − r·u_r|Kante). Unbekannt sind nur die Kantenspuren t von u_r;
mit c = Tr S(f₁, σrg) und B t = Tr S(0, (rWt₀, −rWt_θ)) gilt (I − B)t = c.
B ist je Mellin-Mode eine 2×2-Matrix aus freeslip.edge_response; W = 1 bis
auf die äußeren 10 % des s-Bereichs, dort glatt auf 0.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from models.config import SolverOptions, WedgeConfig
from models.fields import AngularPolynomial, BoundaryData, Grid, MellinLine, ScalarField, VectorField
from models.report import SolveReport
from solver.freeslip import FreeSlipData, ModeSolution, edge_response, freeslip_solve, physical_residuals, solve_modes, transform_data
from solver.mellin import forward_values, inverse_values, make_line
from solver.polar_core import (
    ZETA,
    X_norm,
    Y_norm,
    Z_norm,
    d_phi,
    divergence,
    gradient,
    integrate_domain,
    laplacian_vector,
    scriptH_norm,
    scriptX_norm,
    smooth_step,
)
from solver.polynomial import (
    Representation,
    TipDecomposition,
    degree_bound,
    localization_remainders,
    localize_velocity,
    solve_polynomial_problem,
    stream_from_velocity_poly,
)
from utils.errors import AdmissibilityError, DecayError, GridMismatchError

logger = logging.getLogger(__name__)

SIGMA = (-1.0, 1.0)
OSCILLATION_LIMIT = 3
DIVERGENCE_FACTOR = 1e6
TAPER_FRACTION = 0.1


# ─────────────────────────────────────────────
# 🔁 Randoperator
# ─────────────────────────────────────────────
def edge_taper(grid: Grid, fraction: float = TAPER_FRACTION) -> np.ndarray:
    """W(s): 1 im Inneren, glatt auf 0 an beiden Gitterenden (Übergangsbreite fraction·(s_max − s_min))."""
    s = grid.s
    width = fraction * float(s[-1] - s[0])
    return smooth_step((s - s[0]) / width) * smooth_step((s[-1] - s) / width)


def _velocity(solution: ModeSolution, grid: Grid, line: MellinLine) -> VectorField:
    values = inverse_values(np.stack([solution.u_r, solution.u_phi], axis=1), grid, line).real
    return VectorField(grid, values[:, 0], values[:, 1])


@dataclass(frozen=True, eq=False)
class EdgeTraceOperator:
    """
    t ↦ Tr S(0, (rWt₀, −rWt_θ)) auf den Kantenspuren, modenweise über R(λ).
    W = edge_taper: der Rücktransformationsboden der Spuren wird vor dem
    Faktor r an den Gitterenden abgeschaltet.
    """

    grid: Grid
    line: MellinLine
    response: np.ndarray
    taper: np.ndarray
    sin_tolerance: float = 1e-6

    @classmethod
    def build(cls, grid: Grid, line: MellinLine, sin_tolerance: float) -> "EdgeTraceOperator":
        return cls(grid, line, edge_response(line.lambdas, grid, sin_tolerance), edge_taper(grid), sin_tolerance)

    @property
    def size(self) -> int:
        return 2 * self.grid.s.size

    def _slip_hat(self, traces: np.ndarray) -> np.ndarray:
        weight = self.grid.r * self.taper
        data = np.stack([weight * traces[:, 0], -weight * traces[:, 1]], axis=1)
        g_hat, _ = forward_values(data, self.grid, self.line.re_lambda, line=self.line)
        return g_hat

    def apply(self, traces: np.ndarray) -> np.ndarray:
        """traces (Nr, 2) → Kantenspuren (Nr, 2); keine Abfallprüfung der Iterierten."""
        u_hat = np.einsum("kij,kj->ki", self.response, self._slip_hat(traces))
        return inverse_values(u_hat, self.grid, self.line).real

    def velocity(self, traces: np.ndarray, max_workers: Optional[int] = None) -> VectorField:
        """U(t) = S(0, (rWt₀, −rWt_θ)) im ganzen Keil; Tr U(t) = apply(t)."""
        g_hat = self._slip_hat(traces)
        empty = np.zeros((self.line.n_modes, self.grid.phi.size), dtype=complex)
        data = FreeSlipData(empty, empty, g_hat[:, 0], g_hat[:, 1])
        solution = solve_modes(data, self.line.lambdas, self.grid, self.sin_tolerance, max_workers)
        return _velocity(solution, self.grid, self.line)

    def matvec(self, flat: np.ndarray) -> np.ndarray:
        traces = np.asarray(flat, dtype=float).reshape(self.grid.s.size, 2)
        return (traces - self.apply(traces)).ravel()


def slip_data(g: BoundaryData, traces: Optional[np.ndarray] = None) -> BoundaryData:
    """𝔤 = σr(g − Wt) auf beiden Kanten; ohne Spuren σrg."""
    r = g.grid.r
    if traces is None:
        t0, t_theta = 0.0, 0.0
    else:
        taper = edge_taper(g.grid)
        t0, t_theta = taper * traces[:, 0], taper * traces[:, 1]
    return BoundaryData(g.grid, SIGMA[0] * r * (g.at_zero - t0), SIGMA[1] * r * (g.at_theta - t_theta))


def _source_response(
    f1: VectorField, g: BoundaryData, line: MellinLine, config: WedgeConfig, max_workers: Optional[int]
) -> Tuple[np.ndarray, VectorField]:
    """c = Tr S(f₁, σrg) und die zugehörige Geschwindigkeit S(f₁, σrg)."""
    grid = f1.grid
    data = transform_data(f1, slip_data(g), line, config.decay_floor, strict_decay=False)
    solution = solve_modes(data, line.lambdas, grid, config.sin_tolerance, max_workers)
    velocity = _velocity(solution, grid, line)
    return velocity.u_r[:, [0, -1]].copy(), velocity


# ─────────────────────────────────────────────
# 🔧 Iterationen
# ─────────────────────────────────────────────
def _krylov(operator: EdgeTraceOperator, rhs: np.ndarray, options: SolverOptions, precondition: bool) -> Tuple[np.ndarray, List[float], str]:
    n = operator.size
    A = LinearOperator((n, n), matvec=operator.matvec, dtype=float)
    preconditioner = None
    if precondition:
        weight = np.repeat(1.0 / (1.0 + operator.grid.theta * operator.grid.r / 3.0), 2)
        preconditioner = LinearOperator((n, n), matvec=lambda x: weight * x, dtype=float)
    history: List[float] = []
    solution, info = gmres(
        A,
        rhs.ravel(),
        rtol=options.tolerance,
        atol=0.0,
        restart=options.max_iter,
        maxiter=1,
        M=preconditioner,
        callback=lambda norm: history.append(float(norm)),
        callback_type="pr_norm",
    )
    if info < 0:
        status = "diverged"
    elif info > 0:
        status = "max_iter"
    else:
        status = "converged"
    return solution.reshape(operator.grid.s.size, 2), history, status


def _picard(
    operator: EdgeTraceOperator,
    rhs: np.ndarray,
    source: VectorField,
    options: SolverOptions,
    alpha: float,
    max_workers: Optional[int] = None,
) -> Tuple[np.ndarray, List[float], str]:
    """
    t ← (1−ω)t + ω(c + Bt) mit u_k = S(f₁, σrg) + U(t_k). Verlauf und Abbruch
    über die relative Änderung ‖u_{k+1} − u_k‖_{ℋ¹_α} / ‖u_{k+1}‖_{ℋ¹_α}.
    ω halbiert sich, sobald der absolute Schritt mehrfach hintereinander wächst;
    wächst ‖u_k‖ um DIVERGENCE_FACTOR, gilt die Iteration als divergent.
    """
    omega = options.damping
    traces = np.zeros_like(rhs)
    applied = np.zeros_like(rhs)
    velocity = source
    history: List[float] = []
    steps: List[float] = []
    reference = scriptH_norm(source, 1, alpha)
    rising = 0
    for _ in range(options.max_iter):
        update = (1.0 - omega) * traces + omega * (rhs + applied)
        response = operator.velocity(update, max_workers)
        following = source + response
        step = scriptH_norm(following - velocity, 1, alpha)
        size = scriptH_norm(following, 1, alpha)
        change = step / max(size, 1e-300)
        traces, velocity = update, following
        applied = response.u_r[:, [0, -1]]
        history.append(change)
        steps.append(step)
        if not math.isfinite(change) or size > DIVERGENCE_FACTOR * max(reference, 1e-300):
            return traces, history, "diverged"
        if change <= options.tolerance:
            return traces, history, "converged"
        rising = rising + 1 if len(steps) > 1 and step > steps[-2] else 0
        if rising >= OSCILLATION_LIMIT:
            omega *= 0.5
            rising = 0
            logger.warning(f"⚠️ Picard oszilliert, Dämpfung auf ω = {omega:.3g}")
    return traces, history, "max_iter"


# ─────────────────────────────────────────────
# 🌍 Regulärer Löser
# ─────────────────────────────────────────────
def _zero_solution(grid: Grid, command: str) -> Tuple[VectorField, ScalarField, SolveReport]:
    report = SolveReport(command=command, status="converged", iterations=1, history=[0.0])
    report.constants = {"p0": 0.0}
    return VectorField.zeros(grid), ScalarField.zeros(grid), report


def solve_regular(
    f1: VectorField,
    g: BoundaryData,
    M: int,
    config: WedgeConfig,
    options: Optional[SolverOptions] = None,
    max_workers: Optional[int] = None,
    precondition: bool = True,
) -> Tuple[VectorField, ScalarField, SolveReport]:
    """
    Regulärer Navier-Slip-Löser. Rückgabe (u_reg, p_reg = p₁ + ζp₀, Bericht);
    p₀ steht in report.constants. Keine Konvergenz ist ein Status, kein Fehler.
    """
    options = options or SolverOptions()
    started = time.perf_counter()
    grid = f1.grid
    grid.check_same(g.grid)
    gamma = M + config.alpha + 1.0
    if not config.in_interval(gamma):
        raise AdmissibilityError(
            f"❌ Linie Re λ = M+α+1 = {gamma} nicht in I_ε \\ ℤ",
            {"gamma": gamma, "interval": config.alpha_interval},
        )
    if not (np.any(f1.stacked()) or np.any(g.at_zero) or np.any(g.at_theta)):
        logger.info("ℹ️ Navier-Slip: Nulldaten, Nulllösung")
        return _zero_solution(grid, "solve_regular")

    line = make_line(grid, gamma, config.grid.n_modes or None)
    operator = EdgeTraceOperator.build(grid, line, config.sin_tolerance)
    rhs, source = _source_response(f1, g, line, config, max_workers)

    if options.method == "krylov":
        traces, history, status = _krylov(operator, rhs, options, precondition)
    else:
        traces, history, status = _picard(operator, rhs, source, options, config.alpha, max_workers)
    logger.info(f"🔁 Navier-Slip ({options.method}): {len(history)} Schritte, Status {status}")

    # Iterierte mit Rücktransformationsboden: Abfall und Abschneidung nur im Bericht
    u, p1, p0, inner = freeslip_solve(
        f1, slip_data(g, traces), M, config, max_workers, check_truncation=False, strict_decay=False
    )
    p = p1 + ScalarField(grid, ZETA(grid.r_col) * p0 * np.ones(grid.shape))

    report = verify_solution(u, p, f1, g, config.alpha, M)
    report.command = "solve_regular"
    report.merge(inner, "freeslip")
    report.grid = inner.grid
    report.truncation = inner.truncation
    signal = max(v for k, v in inner.truncation.items() if k.startswith("signal_"))
    if signal > config.truncation_floor:
        report.notes.append(f"Spektrum bei |t| = T nicht abgeklungen: {signal:.2e}")
        logger.warning(f"⚠️ Abschneidesignal {signal:.2e} über {config.truncation_floor:.0e}")
    report.constants["p0"] = p0
    report.iterations = len(history)
    report.history = history
    monotone = report.history_monotone()
    if status == "converged" and not monotone:
        report.notes.append("Verlauf nicht monoton fallend")
        status = "max_iter"
    report.status = status
    report.wall_time = time.perf_counter() - started
    if status != "converged":
        logger.warning(f"⚠️ Navier-Iteration nicht konvergiert: {status}, letzte Änderung {history[-1] if history else math.nan:.2e}")
    return u, p, report


# ─────────────────────────────────────────────
# 🧩 Voller Löser
# ─────────────────────────────────────────────
def _as_parts(f: TipDecomposition | VectorField | None, f1: Optional[VectorField]) -> Tuple[Optional[AngularPolynomial], VectorField]:
    if isinstance(f, TipDecomposition):
        return f.polynomial_part, f.regular_part
    if isinstance(f, AngularPolynomial):
        if f1 is None:
            raise GridMismatchError("❌ Polynomanteil ohne regulären Anteil übergeben", {})
        return f, f1
    if f is not None:
        return None, f
    if f1 is None:
        raise GridMismatchError("❌ Weder Quelle noch regulärer Anteil übergeben", {})
    return None, f1


def solve_full(
    P_f: TipDecomposition | AngularPolynomial | VectorField | None,
    f1: Optional[VectorField],
    M: int,
    config: WedgeConfig,
    g: Optional[BoundaryData] = None,
    options: Optional[SolverOptions] = None,
    max_workers: Optional[int] = None,
    representation: Representation = "fourier",
) -> Tuple[VectorField, ScalarField, SolveReport]:
    """
    f = ζ𝓟_f + f₁. Spitzenpolynom → Q_u, Q_f, Q_g → regulärer Löser mit
    (f₁ − Q_f, g − Q_g) → u = Q_u + u_reg, p = ζ𝓟_p + p_reg.
    """
    started = time.perf_counter()
    poly, regular = _as_parts(P_f, f1)
    grid = regular.grid
    g = g if g is not None else BoundaryData.zeros(grid)

    if poly is None or poly.is_zero():
        u, p, report = solve_regular(regular, g, M, config, options, max_workers)
        report.command = "solve"
        return u, p, report

    n = math.floor(M + config.alpha + 1.0)
    bound = degree_bound(config)
    if not n > M + config.alpha:
        raise AdmissibilityError(f"❌ Grad n={n} ≤ M+α", {"n": n, "M": M, "alpha": config.alpha})
    if not 2 <= n <= bound:
        raise AdmissibilityError(
            f"❌ Grad n={n} außerhalb [2, {bound:.3f}] bei nichttrivialem Polynomanteil",
            {"n": n, "bound": bound},
        )

    stages: Dict[str, float] = {}
    P_u, P_p = solve_polynomial_problem(poly, n, config, grid, representation, stages)
    P_psi = stream_from_velocity_poly(P_u)
    Q_u = localize_velocity(P_u, grid)
    Q_f, Q_g = localization_remainders(P_u, P_p, P_psi, grid)

    u_reg, p_reg, report = solve_regular(regular - Q_f, g - Q_g, M, config, options, max_workers)
    u = Q_u + u_reg
    p = p_reg + ScalarField(grid, ZETA(grid.r_col) * P_p.evaluate(grid))

    forcing = poly.evaluate(grid) * ZETA(grid.r_col)[None]
    f_total = regular + VectorField(grid, forcing[0], forcing[1])
    final = verify_solution(u, p, f_total, g, config.alpha, M, polynomial=(poly, P_u, P_p, n))
    final.command = "solve"
    final.status = report.status
    final.iterations = report.iterations
    final.history = report.history
    final.grid = report.grid
    final.truncation = report.truncation
    final.constants.update({"p0": report.constants.get("p0", 0.0), "n": float(n)})
    final.merge(report, "regular")
    final.residuals.update({f"polynomial.{k}": abs(v) for k, v in stages.items()})
    final.wall_time = time.perf_counter() - started
    logger.info(f"✅ Navier-Slip voll gelöst: n={n}, Status {final.status}")
    return u, p, final


# ─────────────────────────────────────────────
# 🔍 Nachprüfung
# ─────────────────────────────────────────────
def _window(grid: Grid) -> Tuple[slice, slice]:
    n = grid.s.size
    return slice(n // 5, n - n // 5), slice(3, -3)


def navier_residual(u: VectorField, g: BoundaryData) -> Tuple[np.ndarray, np.ndarray]:
    """u_r + σr⁻¹∂_φu_r − g an beiden Kanten (einseitige Differenzen)."""
    grid = u.grid
    du = d_phi(u.u_r, grid)
    r = grid.r
    res0 = u.u_r[:, 0] + SIGMA[0] * du[:, 0] / r - g.at_zero
    res_theta = u.u_r[:, -1] + SIGMA[1] * du[:, -1] / r - g.at_theta
    return res0, res_theta


def _weighted_ratio(residual: np.ndarray, reference: np.ndarray, grid: Grid, exponent: float) -> float:
    rows, cols = _window(grid)
    mask = np.zeros(grid.shape)
    mask[rows, cols] = 1.0
    num = integrate_domain(mask * residual**2, grid, exponent)
    if num == 0.0:
        return 0.0
    den = integrate_domain(mask * reference**2, grid, exponent)
    return math.sqrt(num / den) if den > 0.0 else math.inf


def verify_solution(
    u: VectorField,
    p: ScalarField,
    f_total: VectorField,
    g: BoundaryData,
    alpha: float,
    M: int,
    polynomial: Optional[Tuple[AngularPolynomial, AngularPolynomial, AngularPolynomial, int]] = None,
) -> SolveReport:
    """
    Residuen von Impuls (je Komponente, gewichtet), Divergenz, u_φ = 0 und
    Navier-Bedingung sowie der Quotient (‖u‖_X + ‖p‖_Y)/‖f‖_Z. Wirft nicht.
    """
    grid = u.grid
    grid.check_same(p.grid)
    grid.check_same(f_total.grid)
    report = SolveReport(command="verify", status="ok")

    lap = laplacian_vector(u)
    grad = gradient(p)
    res_r = -lap.u_r + grad.u_r - f_total.u_r
    res_phi = -lap.u_phi + grad.u_phi - f_total.u_phi
    exponent = 2.0 - 2.0 * (alpha - 1.0)
    ref_r = np.abs(f_total.u_r) + np.abs(lap.u_r)
    ref_phi = np.abs(f_total.u_phi) + np.abs(lap.u_phi)
    report.residuals["momentum_r"] = _weighted_ratio(res_r, ref_r, grid, exponent)
    report.residuals["momentum_phi"] = _weighted_ratio(res_phi, ref_phi, grid, exponent)

    rows, cols = _window(grid)
    div = divergence(u).values * grid.r_col
    u_scale = float(np.max(np.abs(u.stacked())))
    res0, res_theta = navier_residual(u, g)
    navier_scale = max(float(np.max(np.abs(g.at_zero))), float(np.max(np.abs(g.at_theta))), float(np.max(np.abs(u.u_r[:, [0, -1]]))))

    def _relative(value: float, scale: float) -> float:
        return value / scale if value > 0.0 else 0.0

    report.residuals["divergence"] = _relative(float(np.max(np.abs(div[rows, cols]))), u_scale)
    report.residuals["normal_velocity"] = _relative(
        float(max(np.max(np.abs(u.u_phi[:, 0])), np.max(np.abs(u.u_phi[:, -1])))), u_scale
    )
    report.residuals["navier"] = _relative(float(max(np.max(np.abs(res0[rows])), np.max(np.abs(res_theta[rows])))), navier_scale)

    g_frak = BoundaryData(grid, SIGMA[0] * grid.r * (g.at_zero - u.u_r[:, 0]), SIGMA[1] * grid.r * (g.at_theta - u.u_r[:, -1]))
    if np.any(u.stacked()) or np.any(f_total.stacked()):
        report.residuals["momentum"] = physical_residuals(u, p, f_total, g_frak)["momentum"]
    else:
        report.residuals["momentum"] = 0.0

    try:
        report.estimate_ratios.update(estimate_ratios(u, p, f_total, g, alpha, M, polynomial))
    except DecayError as exc:
        logger.warning(f"⚠️ Schätzquotienten nicht auswertbar: {exc.message}")
        report.estimate_ratios.update({"main": math.nan, "regular": math.nan})
    return report


def estimate_ratios(
    u: VectorField,
    p: ScalarField,
    f_total: VectorField,
    g: BoundaryData,
    alpha: float,
    M: int,
    polynomial: Optional[Tuple[AngularPolynomial, AngularPolynomial, AngularPolynomial, int]] = None,
) -> Dict[str, float]:
    """
    main: (‖u‖_{X^{M+2}} + ‖p‖_{Y^{M+1}}) / (‖f‖_{Z^M} + |g|_{𝒳^{M+1}});
    regular: dasselbe für die Felder ohne Polynomanteil.
    """
    if not (np.any(f_total.stacked()) or np.any(g.at_zero) or np.any(g.at_theta)):
        return {"main": 0.0, "regular": 0.0}
    g_norm = scriptX_norm(g, M + 1, alpha) if (np.any(g.at_zero) or np.any(g.at_theta)) else 0.0
    regular_num = X_norm(u, M + 2, alpha) + Y_norm(p, M + 1, alpha)
    regular_den = Z_norm(f_total, M, alpha) + g_norm
    ratios = {"regular": regular_num / regular_den if regular_den > 0 else math.inf}
    if polynomial is None:
        ratios["main"] = ratios["regular"]
        return ratios
    P_f, P_u, P_p, n = polynomial
    grid = u.grid
    z = ZETA(grid.r_col)
    poly_u = P_u.evaluate(grid) * z[None]
    u1 = u - VectorField(grid, poly_u[0], poly_u[1])
    p1 = p - ScalarField(grid, z * P_p.evaluate(grid))
    forcing = P_f.evaluate(grid) * z[None]
    f1 = f_total - VectorField(grid, forcing[0], forcing[1])
    numerator = X_norm(TipDecomposition(P_u, u1, ZETA, n), M + 2, alpha) + Y_norm(TipDecomposition(P_p, p1, ZETA, n - 1), M + 1, alpha)
    denominator = Z_norm(TipDecomposition(P_f, f1, ZETA, n - 2), M, alpha) + g_norm
    ratios["main"] = numerator / denominator if denominator > 0 else math.inf
    return ratios
