# =============================================================================
# ⚙️ models/config.py
# -----------------------------------------------------------------------------
# Konfiguration: Gitter, Keil (θ, α, ε, Schwellen), Variationsparameter,
# Löseroptionen. Dateien im Format key=value mit include=-Direktive.
# =============================================================================

from __future__ import annotations

import logging
import math
import os
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Set

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from utils.errors import AdmissibilityError, ConfigError

logger = logging.getLogger(__name__)


# ─────────────────────────────────────────────
# 📏 Gitter
# ─────────────────────────────────────────────
class GridSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    s_min: float = Field(default=-12.0, description="log r am inneren Rand")
    s_max: float = Field(default=12.0, description="log r am äußeren Rand")
    n_radial: int = Field(default=256, ge=16)
    n_angular: int = Field(default=64, ge=8)
    n_modes: int = Field(default=0, ge=0, description="0 = 2·n_radial + 1")

    @model_validator(mode="after")
    def _check_bounds(self) -> "GridSpec":
        if not self.s_min < self.s_max:
            raise ValueError(f"s_min < s_max verletzt: {self.s_min} ≥ {self.s_max}")
        if self.n_modes and self.n_modes % 2 == 0:
            raise ValueError(f"n_modes muss ungerade sein, erhalten: {self.n_modes}")
        return self

    @property
    def ds(self) -> float:
        return (self.s_max - self.s_min) / (self.n_radial - 1)

    @property
    def mode_count(self) -> int:
        return self.n_modes or 2 * self.n_radial + 1


# ─────────────────────────────────────────────
# 📐 Keil
# ─────────────────────────────────────────────
class WedgeConfig(BaseModel):
    """
    Öffnungswinkel θ, Gewichtsexponent α, Resonanzabstand ε und die
    numerischen Schwellen. Einziger Torwächter aller Zulässigkeitsbedingungen.
    """

    model_config = ConfigDict(frozen=True)

    theta: float = Field(default=0.8, gt=0.0, lt=math.pi)
    alpha: float = Field(default=-0.05)
    epsilon: float = Field(default=0.1, gt=0.0, lt=1.0)
    alpha_theta_cap: float = Field(default=0.25, gt=0.0)
    sin_tolerance: float = Field(default=1e-6, gt=0.0)
    decay_floor: float = Field(default=1e-8, gt=0.0)
    truncation_floor: float = Field(default=1e-6, gt=0.0)
    imag_tolerance: float = Field(default=1e-8, gt=0.0)
    improved_hardy_c0: Optional[float] = Field(default=None, gt=0.0)
    grid: GridSpec = Field(default_factory=GridSpec)

    @model_validator(mode="after")
    def _check_admissible(self) -> "WedgeConfig":
        if self.theta >= (1.0 - self.epsilon) * math.pi:
            raise ValueError(f"θ < (1−ε)π verletzt: θ={self.theta}, ε={self.epsilon}")
        low, high = self.alpha_interval
        if not low <= self.alpha <= high:
            raise ValueError(f"α={self.alpha} liegt nicht in I_ε=[{low:.4f}, {high:.4f}]")
        if float(self.alpha).is_integer():
            raise ValueError(f"α darf nicht ganzzahlig sein: {self.alpha}")
        if abs(self.alpha * self.theta) >= self.alpha_theta_cap:
            raise ValueError(
                f"|αθ|={abs(self.alpha * self.theta):.4f} ≥ Obergrenze {self.alpha_theta_cap}"
            )
        return self

    @classmethod
    def build(cls, **values: Any) -> "WedgeConfig":
        """Wie der Konstruktor, aber mit fachlicher Fehlerklasse statt ValidationError."""
        try:
            return cls(**values)
        except ValidationError as exc:
            raise AdmissibilityError(
                f"❌ Unzulässige Keil-Konfiguration: {exc.errors()[0]['msg']}",
                {k: v for k, v in values.items() if k != "grid"},
            ) from exc

    @property
    def alpha_interval(self) -> tuple[float, float]:
        half = (1.0 - self.epsilon) * math.pi / self.theta - 1.0
        return -half, half

    def in_interval(self, value: float) -> bool:
        """Prüft value ∈ I_ε \\ ℤ."""
        low, high = self.alpha_interval
        return low <= value <= high and not float(value).is_integer()

    @property
    def scale(self) -> float:
        """|α|θ³, die Skalierung der 𝔛/𝔜-Normen."""
        return abs(self.alpha) * self.theta**3

    def with_alpha(self, alpha: float) -> "WedgeConfig":
        return WedgeConfig.build(**{**self.model_dump(exclude={"grid"}), "alpha": alpha, "grid": self.grid})


# ─────────────────────────────────────────────
# 🧪 Variationsparameter
# ─────────────────────────────────────────────
class VariationalConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    c3: float = Field(default=0.1, gt=0.0)
    test_modes: int = Field(default=5, ge=1)
    test_centers: tuple[float, float] = Field(default=(-1.0, 1.0))
    test_width: float = Field(default=1.2, gt=0.0)
    condition_limit: float = Field(default=1e12, gt=1.0)
    curl_tolerance: float = Field(default=1e-2, gt=0.0)


class SolverOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    tolerance: float = Field(default=1e-8, gt=0.0)
    max_iter: int = Field(default=200, ge=1)
    damping: float = Field(default=1.0, gt=0.0, le=1.0)
    method: Literal["krylov", "picard"] = "picard"
    M: int = Field(default=0, ge=0)
    line_re_lambda: Optional[float] = None
    seed: int = 0


class RunSettings(BaseModel):
    """Alles, was aus einer Konfigurationsdatei kommt."""

    model_config = ConfigDict(frozen=True)

    wedge: WedgeConfig = Field(default_factory=WedgeConfig)
    variational: VariationalConfig = Field(default_factory=VariationalConfig)
    solver: SolverOptions = Field(default_factory=SolverOptions)


# ─────────────────────────────────────────────
# 📁 Datei laden (key=value + include)
# ─────────────────────────────────────────────
_GRID_KEYS = set(GridSpec.model_fields)
_WEDGE_KEYS = set(WedgeConfig.model_fields) - {"grid"}
_VARIATIONAL_KEYS = set(VariationalConfig.model_fields)
_SOLVER_KEYS = set(SolverOptions.model_fields)


def _read_flat(path: Path, seen: Set[Path]) -> Dict[str, str]:
    path = path.resolve()
    if path in seen:
        raise ConfigError(f"❌ Zyklische include-Kette bei {path}", {"path": str(path)})
    if not path.is_file():
        raise ConfigError(f"❌ Konfigurationsdatei fehlt: {path}", {"path": str(path)})
    seen = seen | {path}

    raw = {k: v for k, v in dotenv_values(path).items() if v is not None}
    merged: Dict[str, str] = {}
    include = raw.pop("include", None)
    if include:
        merged.update(_read_flat(path.parent / include, seen))
    merged.update(raw)
    return merged


def _split_sections(flat: Dict[str, str]) -> Dict[str, Dict[str, Any]]:
    sections: Dict[str, Dict[str, Any]] = {"grid": {}, "wedge": {}, "variational": {}, "solver": {}}
    for key, value in flat.items():
        value = value.strip()
        if value == "":
            continue
        if key in _GRID_KEYS:
            sections["grid"][key] = value
        elif key in _WEDGE_KEYS:
            sections["wedge"][key] = value
        elif key in _VARIATIONAL_KEYS:
            if key == "test_centers":
                sections["variational"][key] = tuple(float(x) for x in value.split(","))
            else:
                sections["variational"][key] = value
        elif key in _SOLVER_KEYS:
            sections["solver"][key] = value
        else:
            raise ConfigError(f"❌ Unbekannter Schlüssel: {key}", {"key": key})
    return sections


def settings_from_mapping(flat: Dict[str, str]) -> RunSettings:
    sections = _split_sections(flat)
    try:
        grid = GridSpec(**sections["grid"])
        variational = VariationalConfig(**sections["variational"])
        solver = SolverOptions(**sections["solver"])
    except ValidationError as exc:
        raise ConfigError(f"❌ Ungültige Konfiguration: {exc.errors()[0]['msg']}", {"fields": str(exc)}) from exc
    wedge = WedgeConfig.build(**sections["wedge"], grid=grid)
    return RunSettings(wedge=wedge, variational=variational, solver=solver)


def load_config(path: str | os.PathLike[str]) -> RunSettings:
    """Liest eine key=value-Datei (inklusive include-Kette) und validiert sie."""
    flat = _read_flat(Path(path), set())
    settings = settings_from_mapping(flat)
    logger.info(
        f"✅ Konfiguration geladen: θ={settings.wedge.theta}, α={settings.wedge.alpha}, "
        f"Gitter {settings.wedge.grid.n_radial}×{settings.wedge.grid.n_angular}"
    )
    return settings


def dump_config(settings: RunSettings) -> Dict[str, Any]:
    """Flacher Schnappschuss für Manifest und Berichte."""
    snapshot: Dict[str, Any] = {}
    snapshot.update(settings.wedge.grid.model_dump())
    snapshot.update(settings.wedge.model_dump(exclude={"grid"}))
    snapshot.update(settings.variational.model_dump())
    snapshot.update(settings.solver.model_dump())
    return snapshot
