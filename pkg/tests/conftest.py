import os
import sys

import numpy as np
import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from models.config import GridSpec, WedgeConfig
from models.fields import Grid


# ⚙️ Kleine Gitter, damit die Suite in Sekunden läuft
SMALL_SPEC = GridSpec(s_min=-8.0, s_max=8.0, n_radial=128, n_angular=33)


@pytest.fixture
def small_spec() -> GridSpec:
    return SMALL_SPEC


@pytest.fixture
def wedge() -> WedgeConfig:
    return WedgeConfig(theta=0.8, alpha=-0.05, grid=SMALL_SPEC)


@pytest.fixture
def grid(wedge: WedgeConfig) -> Grid:
    return Grid.from_spec(wedge.grid, wedge.theta)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)
