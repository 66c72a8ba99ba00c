import math
from pathlib import Path

import pytest

from models.config import GridSpec, WedgeConfig, dump_config, load_config
from utils.errors import AdmissibilityError, ConfigError


def test_default_wedge_is_admissible():
    cfg = WedgeConfig()
    low, high = cfg.alpha_interval
    assert math.isclose(high, 0.9 * math.pi / 0.8 - 1.0)
    assert low == -high
    assert cfg.in_interval(cfg.alpha)
    assert not cfg.in_interval(1.0), "ganzzahlige Linien sind ausgeschlossen"


def test_wide_wedge_rejected():
    with pytest.raises(AdmissibilityError):
        WedgeConfig.build(theta=3.0, alpha=-0.01)


def test_alpha_theta_cap_rejected():
    with pytest.raises(AdmissibilityError):
        WedgeConfig.build(theta=0.8, alpha=-0.5)


def test_hardy_constant_has_no_default():
    assert WedgeConfig().improved_hardy_c0 is None
    assert WedgeConfig(improved_hardy_c0=3.0).improved_hardy_c0 == 3.0


def test_with_alpha_keeps_grid():
    cfg = WedgeConfig(grid=GridSpec(n_radial=64, n_angular=16))
    other = cfg.with_alpha(0.1)
    assert other.alpha == 0.1
    assert other.grid == cfg.grid


def test_load_config_follows_include(tmp_path: Path):
    (tmp_path / "base.env").write_text("theta=0.5\nn_radial=64\n", encoding="utf-8")
    (tmp_path / "run.env").write_text("include=base.env\nalpha=0.2\nmax_iter=12\n", encoding="utf-8")
    settings = load_config(tmp_path / "run.env")
    assert settings.wedge.theta == 0.5
    assert settings.wedge.alpha == 0.2
    assert settings.wedge.grid.n_radial == 64
    assert settings.solver.max_iter == 12
    snapshot = dump_config(settings)
    assert snapshot["theta"] == 0.5 and snapshot["max_iter"] == 12


def test_cyclic_include_rejected(tmp_path: Path):
    (tmp_path / "a.env").write_text("include=b.env\n", encoding="utf-8")
    (tmp_path / "b.env").write_text("include=a.env\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "a.env")


def test_unknown_key_rejected(tmp_path: Path):
    (tmp_path / "bad.env").write_text("colour=blue\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.env")


def test_even_mode_count_rejected(tmp_path: Path):
    (tmp_path / "modes.env").write_text("n_modes=64\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "modes.env")


def test_missing_file_rejected(tmp_path: Path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "fehlt.env")
