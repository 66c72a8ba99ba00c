# =============================================================================
# 📊 models/report.py
# -----------------------------------------------------------------------------
# SolveReport (Residuen, Schätzquotienten, Iterationsverlauf) und RunManifest
# (Konfigurations-Schnappschuss, Eingabe-Hashes, Ausgaben) als JSON.
# =============================================================================

from __future__ import annotations

import hashlib
import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

Status = Literal["converged", "max_iter", "diverged", "verified", "failed", "ok"]


class SolveReport(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    command: str = Field(default="solve")
    status: Status = "ok"
    iterations: int = 0
    history: List[float] = Field(default_factory=list)
    residuals: Dict[str, float] = Field(default_factory=dict)
    estimate_ratios: Dict[str, float] = Field(default_factory=dict)
    constants: Dict[str, float] = Field(default_factory=dict)
    grid: Dict[str, Any] = Field(default_factory=dict)
    truncation: Dict[str, Any] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
    wall_time: float = 0.0

    @field_validator("residuals")
    @classmethod
    def _nonnegative(cls, value: Dict[str, float]) -> Dict[str, float]:
        for key, item in value.items():
            if not (item >= 0.0 or math.isnan(item)):
                raise ValueError(f"Residuum {key} negativ: {item}")
        return value

    def history_monotone(self) -> bool:
        return all(b <= a * (1.0 + 1e-12) for a, b in zip(self.history, self.history[1:]))

    def max_residual(self, keys: Optional[List[str]] = None) -> float:
        items = [v for k, v in self.residuals.items() if keys is None or k in keys]
        return max(items) if items else 0.0

    def merge(self, other: "SolveReport", prefix: str) -> None:
        """Übernimmt Residuen/Quotienten/Konstanten eines Teilberichts mit Präfix."""
        self.residuals.update({f"{prefix}.{k}": v for k, v in other.residuals.items()})
        self.estimate_ratios.update({f"{prefix}.{k}": v for k, v in other.estimate_ratios.items()})
        self.constants.update({f"{prefix}.{k}": v for k, v in other.constants.items()})
        self.notes.extend(f"{prefix}: {n}" for n in other.notes)

    def to_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2), encoding="utf-8")
        return path

    @classmethod
    def from_json(cls, path: str | Path) -> "SolveReport":
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))


# ─────────────────────────────────────────────
# 🧾 Manifest
# ─────────────────────────────────────────────
def file_sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


class InputFile(BaseModel):
    path: str
    sha256: str


class RunManifest(BaseModel):
    command: str
    argv: List[str] = Field(default_factory=list)
    config: Dict[str, Any] = Field(default_factory=dict)
    inputs: List[InputFile] = Field(default_factory=list)
    outputs: List[str] = Field(default_factory=list)
    seed: int = 0
    started_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    finished_at: Optional[str] = None

    def add_input(self, path: str | Path) -> None:
        self.inputs.append(InputFile(path=str(path), sha256=file_sha256(path)))

    def add_output(self, path: str | Path) -> None:
        self.outputs.append(str(path))

    def finish(self, out_dir: str | Path) -> Path:
        self.finished_at = datetime.now(timezone.utc).isoformat()
        target = Path(out_dir) / "manifest.json"
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(self.model_dump(), indent=2, default=str), encoding="utf-8")
        return target
