"""Domain errors.

Every error carries the module that raised it and a short code; the CLI and
the MCP server report ``error.qualified_code`` (``"gkh_formula.NotDeveloped"``).
"""

from typing import Any


class ExpSumError(ValueError):
    """Base class for all expsum-lab errors."""

    module: str = "expsum_lab"
    code: str = "Error"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    @property
    def qualified_code(self) -> str:
        return f"{self.module}.{self.code}"

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "error": self.message,
            "code": self.qualified_code,
            "details": {k: _plain(v) for k, v in self.details.items()},
        }


def _plain(value: Any) -> Any:
    if hasattr(value, "to_dict"):
        return value.to_dict()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


# freq_lattice ---------------------------------------------------------------


class RelationUndetectable(ExpSumError):
    module = "freq_lattice"
    code = "RelationUndetectable"


# exp_algebra ----------------------------------------------------------------


class LatticeMismatch(ExpSumError):
    module = "exp_algebra"
    code = "LatticeMismatch"


class NotAVertex(ExpSumError):
    module = "exp_algebra"
    code = "NotAVertex"


class ConeViolation(ExpSumError):
    module = "exp_algebra"
    code = "ConeViolation"


# newton_geometry ------------------------------------------------------------


class DegenerateInput(ExpSumError):
    module = "newton_geometry"
    code = "DegenerateInput"


class DimensionUnsupported(ExpSumError):
    module = "newton_geometry"
    code = "DimensionUnsupported"


# gkh_formula ----------------------------------------------------------------


class DegenerateSegment(ExpSumError):
    module = "gkh_formula"
    code = "DegenerateSegment"


class NotDeveloped(ExpSumError):
    module = "gkh_formula"
    code = "NotDeveloped"


class MissingCoefficients(ExpSumError):
    module = "gkh_formula"
    code = "MissingCoefficients"


# zero_finder ----------------------------------------------------------------


class NoConvergence(ExpSumError):
    module = "zero_finder"
    code = "NoConvergence"


class BoundaryZero(ExpSumError):
    module = "zero_finder"
    code = "BoundaryZero"


# torus_lab ------------------------------------------------------------------


class OrbitDegenerate(ExpSumError):
    module = "torus_lab"
    code = "OrbitDegenerate"


class TracingStalled(ExpSumError):
    module = "torus_lab"
    code = "TracingStalled"


class IsolationUndecided(ExpSumError):
    module = "torus_lab"
    code = "IsolationUndecided"


# cli_runner -----------------------------------------------------------------


class FrequencySyntaxError(ExpSumError):
    module = "cli_runner"
    code = "SyntaxError"

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}", position=position, text=text)
        self.position = position


class FrequencyDomainError(ExpSumError):
    module = "cli_runner"
    code = "DomainError"


class ConfigError(ExpSumError):
    module = "cli_runner"
    code = "ConfigError"
