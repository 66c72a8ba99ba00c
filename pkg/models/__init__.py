# =============================================================================
# 📦 models/__init__.py
# =============================================================================

from .config import GridSpec, RunSettings, SolverOptions, VariationalConfig, WedgeConfig, load_config
from .fields import AngularPolynomial, BoundaryData, Grid, MellinField, MellinLine, ScalarField, VectorField
from .report import RunManifest, SolveReport

__all__ = [
    "GridSpec",
    "WedgeConfig",
    "VariationalConfig",
    "SolverOptions",
    "RunSettings",
    "load_config",
    "Grid",
    "ScalarField",
    "VectorField",
    "BoundaryData",
    "MellinLine",
    "MellinField",
    "AngularPolynomial",
    "SolveReport",
    "RunManifest",
]
