import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from models.report import RunManifest, SolveReport
from utils.errors import AdmissibilityError


def test_history_monotone():
    assert SolveReport(history=[1.0, 0.1, 0.01]).history_monotone()
    assert not SolveReport(history=[1.0, 0.1, 0.5]).history_monotone()


def test_max_residual_respects_keys():
    report = SolveReport(residuals={"a": 1e-3, "b": 1e-6, "c": 5e-2})
    assert report.max_residual() == 5e-2
    assert report.max_residual(["a", "b"]) == 1e-3
    assert report.max_residual(["fehlt"]) == 0.0


def test_negative_residual_rejected():
    with pytest.raises(ValidationError):
        SolveReport(residuals={"momentum": -1.0})


def test_merge_prefixes_everything():
    outer = SolveReport(residuals={"x": 1.0})
    inner = SolveReport(residuals={"x": 2.0}, constants={"p0": 0.5}, notes=["hinweis"])
    outer.merge(inner, "freeslip")
    assert outer.residuals == {"x": 1.0, "freeslip.x": 2.0}
    assert outer.constants["freeslip.p0"] == 0.5
    assert outer.notes == ["freeslip: hinweis"]


def test_report_json(tmp_path: Path):
    report = SolveReport(command="solve", status="converged", iterations=3, history=[1.0, 0.1, 0.0])
    path = report.to_json(tmp_path / "report.json")
    back = SolveReport.from_json(path)
    assert back.status == "converged"
    assert back.history == [1.0, 0.1, 0.0]


def test_manifest_hashes_inputs(tmp_path: Path):
    data = tmp_path / "f.csv"
    data.write_text("s,phi,u_r,u_phi\n", encoding="utf-8")
    manifest = RunManifest(command="solve", seed=7)
    manifest.add_input(data)
    manifest.add_output(tmp_path / "u.csv")
    target = manifest.finish(tmp_path)
    payload = json.loads(target.read_text(encoding="utf-8"))
    assert payload["seed"] == 7
    assert len(payload["inputs"][0]["sha256"]) == 64
    assert payload["finished_at"] is not None


def test_error_json_is_plain():
    err = AdmissibilityError("❌ zu breit", {"theta": 3.0, "lam": complex(1.0, 2.0), "shape": (3, 4)})
    payload = err.to_dict()
    assert payload["error"] == "AdmissibilityError"
    assert payload["details"]["lam"] == [1.0, 2.0]
    json.dumps(payload)
