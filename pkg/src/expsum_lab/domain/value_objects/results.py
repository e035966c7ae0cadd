"""Result value objects for predictions, zero searches and mean values."""

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

Exponent = tuple[int, ...]


def complex_pair(value: complex) -> list[float]:
    return [float(value.real), float(value.imag)]


@dataclass(frozen=True)
class VertexContribution:
    """Contribution k_α·C_α of one vertex of Δ."""

    vertex: Exponent
    frequency: tuple[float, ...]
    d: complex
    C: complex
    k: int
    summands: tuple[Exponent, ...] = ()

    @property
    def term(self) -> complex:
        return self.k * self.C

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "vertex": list(self.vertex),
            "frequency": list(self.frequency),
            "d": complex_pair(self.d),
            "C": complex_pair(self.C),
            "k": self.k,
            "term": complex_pair(self.term),
            "summands": [list(s) for s in self.summands],
        }


@dataclass(frozen=True)
class Prediction:
    """(−2π)^{−n} Σ k_α C_α over the vertices of Δ."""

    total: complex
    contributions: tuple[VertexContribution, ...]
    n: int
    k_source: str = "calibrated"

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "total": complex_pair(self.total),
            "n": self.n,
            "k_source": self.k_source,
            "contributions": [c.to_dict() for c in self.contributions],
        }


@dataclass(frozen=True)
class StripBox:
    """Search region: |Re z| ≤ R times an imaginary window."""

    R: float
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.R <= 0:
            raise ValueError("Strip radius must be positive")
        if len(self.lower) != len(self.upper) or any(
            lo >= hi for lo, hi in zip(self.lower, self.upper, strict=True)
        ):
            raise ValueError("Imaginary window must be a nonempty box")

    @property
    def n(self) -> int:
        return len(self.lower)

    @property
    def im_volume(self) -> float:
        return float(np.prod(np.subtract(self.upper, self.lower)))

    def key(self) -> tuple[Any, ...]:
        return (self.R, self.lower, self.upper)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"R": self.R, "im_lower": list(self.lower), "im_upper": list(self.upper)}


@dataclass(frozen=True)
class StripEstimate:
    """Validated strip radius with the evidence behind it."""

    R: float
    doublings: int
    samples_checked: int
    min_abs_on_shell: float
    bound: Optional[float] = None

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "R": self.R,
            "doublings": self.doublings,
            "samples_checked": self.samples_checked,
            "min_abs_on_shell": self.min_abs_on_shell,
            "dominance_bound": self.bound,
        }


@dataclass(frozen=True)
class ZeroRecord:
    """A located zero of a system.

    Attributes:
        z: the zero, n complex coordinates
        multiplicity: winding-number multiplicity (n = 1), 1 otherwise
        residual: max_j |F_j(z)|
        jacobian_condition: condition number of the Jacobian at z
        multiplicity_unverified: True for n ≥ 2
    """

    z: tuple[complex, ...]
    multiplicity: int
    residual: float
    jacobian_condition: float
    multiplicity_unverified: bool = False

    @property
    def imag(self) -> np.ndarray:
        return np.array([c.imag for c in self.z])

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "z": [complex_pair(c) for c in self.z],
            "multiplicity": self.multiplicity,
            "residual": self.residual,
            "jacobian_condition": self.jacobian_condition,
            "multiplicity_unverified": self.multiplicity_unverified,
        }


@dataclass(frozen=True)
class ZeroSearch:
    """Zeros found in a strip box plus completeness diagnostics."""

    box: StripBox
    zeros: tuple[ZeroRecord, ...]
    expected_count: Optional[float] = None
    warnings: tuple[str, ...] = ()
    starts: int = 0
    from_cache: bool = False

    @property
    def count(self) -> int:
        return sum(z.multiplicity for z in self.zeros)

    @property
    def incomplete_cover(self) -> bool:
        return "IncompleteCover" in self.warnings

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "box": self.box.to_dict(),
            "count": self.count,
            "expected_count": self.expected_count,
            "starts": self.starts,
            "warnings": list(self.warnings),
            "zeros": [z.to_dict() for z in self.zeros],
        }


@dataclass(frozen=True)
class LambdaEstimate:
    """S_Ω(λ), Vol(λΩ) and their ratio at one scale."""

    lam: float
    total: complex
    volume: float
    count: int = 0

    @property
    def estimate(self) -> complex:
        return self.total / self.volume

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "lambda": self.lam,
            "sum_re": self.total.real,
            "sum_im": self.total.imag,
            "vol": self.volume,
            "est_re": self.estimate.real,
            "est_im": self.estimate.imag,
            "count": self.count,
        }


@dataclass(frozen=True)
class MeanValueReport:
    """Empirical mean value over a λ schedule."""

    per_lambda: tuple[LambdaEstimate, ...]
    extrapolated: complex
    diagnostic: float
    warnings: tuple[str, ...] = ()
    seed: Optional[int] = None
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def non_convergent(self) -> bool:
        return "NonConvergent" in self.warnings

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "schedule": [e.lam for e in self.per_lambda],
            "per_lambda": [e.to_dict() for e in self.per_lambda],
            "extrapolated": complex_pair(self.extrapolated),
            "diagnostic": self.diagnostic,
            "warnings": list(self.warnings),
            "seed": self.seed,
            **self.details,
        }


@dataclass(frozen=True)
class Comparison:
    """Discrepancy between an empirical mean value and a prediction."""

    estimate: complex
    predicted: complex
    absolute: float
    relative: float
    tolerance: float
    passed: bool
    extend_lambda: bool = False

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "estimate": complex_pair(self.estimate),
            "predicted": complex_pair(self.predicted),
            "absolute": self.absolute,
            "relative": self.relative,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "extend_lambda": self.extend_lambda,
        }
