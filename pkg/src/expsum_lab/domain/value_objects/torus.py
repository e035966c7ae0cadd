"""Torus-side value objects: orbit lifts, semitrigonometric sets and their results."""

from dataclasses import dataclass, field
from typing import Any, Literal, Optional

import numpy as np

from expsum_lab.domain.value_objects.exp_sum import TrigPoly


@dataclass(frozen=True, eq=False)
class OrbitLift:
    """Linear orbit x ↦ φ₀ + Φ(x) mod ℤ^M of ℝⁿ (real) or ℂⁿ ≅ ℝ²ⁿ (complex).

    Real mode: ``phi`` is the N×n matrix with rows A₁…A_N.
    Complex mode: ``phi`` is (n+N)×2n, block diagonal with I/(2R) acting on
    Re z (plus ``offset`` 1/2, so |Re z| < R lands in the unit cube) and the
    lattice pairing acting on Im z.

    Attributes:
        mode: "real" or "complex"
        n: ambient dimension
        N: lattice rank
        phi: the linear part Φ
        base_point: φ₀
        offset: constant part of the map (nonzero in complex mode)
        dense: no integral vector is orthogonal to the orbit (up to K)
        relation: the integral vector found, when not dense
        R: strip radius used in complex mode
    """

    mode: Literal["real", "complex"]
    n: int
    N: int
    phi: np.ndarray
    base_point: tuple[float, ...]
    offset: tuple[float, ...]
    dense: bool
    relation: Optional[tuple[int, ...]] = None
    R: Optional[float] = None

    @property
    def torus_dimension(self) -> int:
        return int(self.phi.shape[0])

    @property
    def orbit_dimension(self) -> int:
        return int(np.linalg.matrix_rank(self.phi))

    @property
    def periodic(self) -> bool:
        return self.mode == "real" and self.N == self.n

    @property
    def directions(self) -> np.ndarray:
        """Orbit directions A¹…Aⁿ as columns."""
        return self.phi

    def angles(self, x: np.ndarray) -> np.ndarray:
        """Unreduced torus angles φ₀ + offset + Φx for points of shape (P, n) or (P, 2n)."""
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        return pts @ self.phi.T + np.add(self.base_point, self.offset)

    def point(self, x: np.ndarray) -> np.ndarray:
        return np.mod(self.angles(x), 1.0)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "mode": self.mode,
            "n": self.n,
            "N": self.N,
            "torus_dimension": self.torus_dimension,
            "orbit_dimension": self.orbit_dimension,
            "phi": self.phi.tolist(),
            "base_point": list(self.base_point),
            "dense": self.dense,
            "relation": list(self.relation) if self.relation else None,
            "periodic": self.periodic,
            "R": self.R,
        }


@dataclass(frozen=True)
class SemiTrigClause:
    """Intersection of {E = 0} for every equation and {P > 0} for every inequality."""

    equations: tuple[TrigPoly, ...] = ()
    inequalities: tuple[TrigPoly, ...] = ()

    def __post_init__(self) -> None:
        if not self.equations and not self.inequalities:
            raise ValueError("A clause needs at least one condition")
        dims = {p.n for p in self.equations + self.inequalities}
        if len(dims) != 1:
            raise ValueError("All polynomials of a clause must share the dimension")

    @property
    def n(self) -> int:
        return (self.equations + self.inequalities)[0].n

    def satisfies_inequalities(self, x: np.ndarray, tol: float = 0.0) -> np.ndarray:
        pts = np.atleast_2d(x)
        ok = np.ones(pts.shape[0], dtype=bool)
        for ineq in self.inequalities:
            ok &= np.asarray(ineq.evaluate(pts)) > tol
        return ok

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "equations": [e.to_dict() for e in self.equations],
            "inequalities": [p.to_dict() for p in self.inequalities],
        }


@dataclass(frozen=True)
class SemiTrigSet:
    """Finite union of clauses."""

    clauses: tuple[SemiTrigClause, ...]

    def __post_init__(self) -> None:
        if not self.clauses:
            raise ValueError("A semitrigonometric set needs at least one clause")
        if len({c.n for c in self.clauses}) != 1:
            raise ValueError("All clauses must share the dimension")

    @classmethod
    def zero_set(cls, *equations: TrigPoly) -> "SemiTrigSet":
        return cls((SemiTrigClause(equations=tuple(equations)),))

    @property
    def n(self) -> int:
        return self.clauses[0].n

    def polynomials(self) -> list[TrigPoly]:
        return [p for c in self.clauses for p in c.equations + c.inequalities]

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"clauses": [c.to_dict() for c in self.clauses]}


@dataclass(frozen=True)
class IsolatedPoint:
    x: tuple[float, ...]
    value: float = 1.0
    clause: int = 0

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"x": list(self.x), "value": self.value, "clause": self.clause}


@dataclass(frozen=True)
class IsolatedPointSearch:
    """Isolated points of V in a window; undecided points are excluded from sums."""

    points: tuple[IsolatedPoint, ...]
    undecided: tuple[IsolatedPoint, ...] = ()

    @property
    def total(self) -> float:
        return float(sum(p.value for p in self.points))

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "count": len(self.points),
            "total": self.total,
            "points": [p.to_dict() for p in self.points],
            "undecided": [p.to_dict() for p in self.undecided],
        }


@dataclass(frozen=True)
class WeylAverage:
    """Orbit average of f over λΩ against the torus integral."""

    lam: float
    average: float
    exact: float

    @property
    def abs_err(self) -> float:
        return abs(self.average - self.exact)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"lambda": self.lam, "avg": self.average, "exact": self.exact, "abs_err": self.abs_err}


@dataclass(frozen=True)
class CurveSample:
    phi: tuple[float, ...]
    arclength: float
    integrand: float
    component: int = 0


@dataclass(frozen=True)
class TransversalVolume:
    """∫ T̃·|det[t, A¹…Aⁿ]| ds over the traced level curve.

    Attributes:
        value: the weighted transversal volume
        length: total traced arclength
        components: number of closed components
        excluded_length: arclength where the tangent runs along the orbit
        samples: traced points with integrand values
    """

    value: float
    length: float
    components: int
    excluded_length: float = 0.0
    samples: tuple[CurveSample, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "value": self.value,
            "length": self.length,
            "components": self.components,
            "excluded_length": self.excluded_length,
            "samples": len(self.samples),
        }
