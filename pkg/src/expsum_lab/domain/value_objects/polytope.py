"""Newton polytope value objects."""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Optional

import numpy as np

Exponent = tuple[int, ...]


@dataclass(frozen=True)
class Polytope:
    """Convex hull of a finite spectrum.

    Attributes:
        vertices: vertex coordinates in ℝⁿ
        tags: lattice coordinates of each vertex, parallel to ``vertices``
        dim: affine dimension
    """

    vertices: tuple[tuple[float, ...], ...]
    tags: tuple[Exponent, ...]
    dim: int

    def __post_init__(self) -> None:
        if not self.vertices:
            raise ValueError("A polytope needs at least one vertex")
        if len(self.vertices) != len(self.tags):
            raise ValueError("Every vertex needs a lattice tag")

    @property
    def n(self) -> int:
        return len(self.vertices[0])

    @property
    def is_point(self) -> bool:
        return self.dim == 0

    @cached_property
    def points(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float).reshape(len(self.vertices), self.n)

    @cached_property
    def diameter(self) -> float:
        pts = self.points
        if len(pts) < 2:
            return 0.0
        diffs = pts[:, None, :] - pts[None, :, :]
        return float(np.max(np.linalg.norm(diffs, axis=-1)))

    def vertex_of(self, tag: Exponent) -> np.ndarray:
        return self.points[self.tags.index(tag)]

    def face(self, functional: np.ndarray, rel_tol: float = 1e-9) -> tuple[Exponent, ...]:
        """Tags of the vertices where ``functional`` attains its maximum."""
        xi = np.asarray(functional, dtype=float)
        values = self.points @ xi
        top = float(np.max(values))
        slack = rel_tol * max(1.0, self.diameter) * max(1.0, float(np.linalg.norm(xi)))
        return tuple(t for t, v in zip(self.tags, values, strict=True) if v >= top - slack)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "dim": self.dim,
            "vertices": [list(v) for v in self.vertices],
            "tags": [list(t) for t in self.tags],
        }


@dataclass(frozen=True)
class MinkowskiDecomposition:
    """Δ = Δ₁ + … + Δ_n with the unique summand vertices behind each vertex of Δ."""

    total: Polytope
    provenance: dict[Exponent, tuple[Exponent, ...]] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "total": self.total.to_dict(),
            "provenance": [
                {"vertex": list(v), "summands": [list(s) for s in parts]}
                for v, parts in sorted(self.provenance.items())
            ],
        }


@dataclass(frozen=True)
class CoordinatedCollection:
    """One face per polytope, all maximizing a single nonzero functional."""

    faces: tuple[tuple[Exponent, ...], ...]
    witness: tuple[float, ...]

    @property
    def has_vertex(self) -> bool:
        return any(len(face) == 1 for face in self.faces)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "faces": [[list(t) for t in face] for face in self.faces],
            "witness": list(self.witness),
        }


@dataclass(frozen=True)
class DevelopedCheck:
    """Outcome of the developed-collection test."""

    developed: bool
    witness: Optional[CoordinatedCollection] = None
    functionals_checked: int = 0

    def __bool__(self) -> bool:
        return self.developed

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "developed": self.developed,
            "witness": self.witness.to_dict() if self.witness else None,
            "functionals_checked": self.functionals_checked,
        }
