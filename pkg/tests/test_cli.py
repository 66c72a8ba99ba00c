import json
from pathlib import Path

from main import run
from models.fields import Grid, VectorField
from models.report import SolveReport
from utils.field_io import write_field


def _zero_source(tmp_path: Path, grid) -> Path:
    return write_field(tmp_path / "f_in.csv", VectorField.zeros(grid))


def test_solve_then_verify(tmp_path: Path, grid):
    out = tmp_path / "run"
    code = run(["solve", "--f", str(_zero_source(tmp_path, grid)), "--out", str(out)])
    assert code == 0
    for name in ("u.csv", "p.csv", "f.csv", "g.csv", "report.json", "manifest.json"):
        assert (out / name).exists(), f"{name} fehlt"
    report = SolveReport.from_json(out / "report.json")
    assert report.status == "converged"
    assert report.constants["theta"] == 0.8

    assert run(["verify", "--solution", str(out)]) == 0
    assert SolveReport.from_json(out / "verify_report.json").status == "verified"


def test_manifest_records_input(tmp_path: Path, grid):
    out = tmp_path / "run"
    run(["solve", "--f", str(_zero_source(tmp_path, grid)), "--out", str(out), "--seed", "11"])
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["command"] == "solve"
    assert manifest["seed"] == 11
    assert manifest["inputs"][0]["path"].endswith("f_in.csv")


def test_missing_option_is_usage_error(capsys):
    assert run(["solve"]) == 1
    lines = [line for line in capsys.readouterr().err.splitlines() if line.startswith("{")]
    payload = json.loads(lines[-1])
    assert payload["error"] == "ConfigError"


def test_bad_config_is_usage_error(tmp_path: Path, grid, capsys):
    config = tmp_path / "bad.env"
    config.write_text("colour=blue\n", encoding="utf-8")
    code = run(["solve", "--f", str(_zero_source(tmp_path, grid)), "--config", str(config), "--out", str(tmp_path / "o")])
    assert code == 1
    assert "ConfigError" in capsys.readouterr().err


def test_angle_mismatch_is_usage_error(tmp_path: Path, small_spec, capsys):
    other = Grid.from_spec(small_spec, 0.6)
    code = run(["solve", "--f", str(_zero_source(tmp_path, other)), "--out", str(tmp_path / "o")])
    assert code == 1
    assert "GridMismatchError" in capsys.readouterr().err
