# =============================================================================
# ❌ utils/errors.py
# Fehlerhierarchie des Wedge-Stokes-Lösers
# =============================================================================

from __future__ import annotations

from typing import Any, Dict, Optional


class WedgeError(ValueError):
    """Basisklasse aller fachlichen Fehler. `details` landet im Fehler-JSON der CLI."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = dict(details or {})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }


def _jsonable(value: Any) -> Any:
    if value is None or isinstance(value, (str, bool, int, float)):
        return value
    if isinstance(value, complex):
        return [value.real, value.imag]
    try:
        return float(value)
    except (TypeError, ValueError):
        return str(value)


class AdmissibilityError(WedgeError):
    """θ, α, ε oder Linienlage verletzen die Zulässigkeitsbedingungen."""


class ResonanceError(WedgeError):
    """Auswertung zu nah an einem Pol des Mode-Lösers."""


class DecayError(WedgeError):
    """Feld fällt an den Gitterenden nicht genug ab."""


class TruncationError(WedgeError):
    """Mellin-Abschneidung oder Fourier-Abschneidung zu grob."""


class GridMismatchError(WedgeError):
    pass


class FieldArityError(WedgeError):
    pass


class ConvergenceError(WedgeError):
    pass


class CoercivityError(WedgeError):
    """Kollokationsmatrix fast singulär, |αθ| vermutlich zu groß."""


class ConsistencyError(WedgeError):
    """A-posteriori-Prüfung fehlgeschlagen (Divergenz, Rotation, Imaginärteil)."""


class ConfigError(WedgeError):
    pass
