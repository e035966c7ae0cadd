"""Newton geometry service.

Newton polytopes of exponential sums, Minkowski sums with vertex provenance,
the developed-collection test and mixed volumes (n ≤ 3).
"""

import itertools
import logging
import math
from collections.abc import Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from expsum_lab.domain.errors import DegenerateInput, DimensionUnsupported
from expsum_lab.domain.value_objects.exp_sum import ExpSum
from expsum_lab.domain.value_objects.polytope import (
    CoordinatedCollection,
    DevelopedCheck,
    Exponent,
    MinkowskiDecomposition,
    Polytope,
)

logger = logging.getLogger(__name__)

REL_TOL = 1e-9
MAX_MIXED_VOLUME_DIM = 3


def _affine_frame(points: np.ndarray) -> tuple[int, np.ndarray]:
    """Affine dimension of a point cloud and an orthonormal basis of its span."""
    centered = points - points[0]
    if len(points) < 2:
        return 0, np.zeros((0, points.shape[1]))
    diam = float(np.max(np.linalg.norm(centered, axis=1)))
    if diam == 0.0:
        return 0, np.zeros((0, points.shape[1]))
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    dim = int(np.sum(s > REL_TOL * max(1.0, diam) * math.sqrt(len(points))))
    return dim, vt[:dim]


def _extreme_indices(points: np.ndarray) -> tuple[int, list[int]]:
    dim, frame = _affine_frame(points)
    if dim == 0:
        return 0, [0]
    local = (points - points[0]) @ frame.T
    if dim == 1:
        coord = local[:, 0]
        return 1, sorted({int(np.argmin(coord)), int(np.argmax(coord))})
    try:
        hull = ConvexHull(local)
    except QhullError as e:  # pragma: no cover - dim was checked
        raise DegenerateInput(f"Convex hull failed: {e}") from e
    return dim, sorted(int(i) for i in hull.vertices)


def polytope_from_points(points: np.ndarray, tags: Sequence[Exponent]) -> Polytope:
    """Convex hull of tagged points."""
    pts = np.asarray(points, dtype=float)
    dim, idx = _extreme_indices(pts)
    order = sorted(idx, key=lambda i: tags[i])
    return Polytope(
        vertices=tuple(tuple(float(x) for x in pts[i]) for i in order),
        tags=tuple(tuple(tags[i]) for i in order),
        dim=dim,
    )


def polytope_volume(poly: Polytope) -> float:
    """n-dimensional volume; zero for lower-dimensional polytopes."""
    if poly.dim < poly.n:
        return 0.0
    if poly.n == 1:
        return float(np.ptp(poly.points[:, 0]))
    return float(ConvexHull(poly.points).volume)


def _normalized(xi: np.ndarray) -> np.ndarray:
    nonzero = np.abs(xi[np.abs(xi) > REL_TOL * np.max(np.abs(xi))])
    scaled = xi / float(np.min(nonzero))
    rounded = np.round(scaled)
    if np.allclose(scaled, rounded, atol=1e-9):
        scaled = rounded
    return scaled + 0.0


class GeometryService:
    """Polytope computations on Newton polytopes."""

    def newton_polytope(self, F: ExpSum) -> Polytope:
        """Convex hull of the spectrum of F, vertices tagged by lattice coordinates."""
        if F.is_zero:
            raise DegenerateInput("The zero exponential sum has no Newton polytope")
        return polytope_from_points(F.spectrum, F.support)

    def minkowski_sum(self, polys: Sequence[Polytope]) -> MinkowskiDecomposition:
        """Minkowski sum with the unique decomposition of each vertex."""
        if not polys:
            raise ValueError("minkowski_sum needs at least one polytope")
        n = polys[0].n
        if any(p.n != n for p in polys):
            raise ValueError("All polytopes must live in the same ℝⁿ")

        by_tag: dict[Exponent, list[tuple[Exponent, ...]]] = {}
        point_of: dict[Exponent, np.ndarray] = {}
        for combo in itertools.product(*(range(len(p.tags)) for p in polys)):
            parts = tuple(p.tags[i] for p, i in zip(polys, combo, strict=True))
            tag = tuple(int(sum(c)) for c in zip(*parts, strict=True))
            by_tag.setdefault(tag, []).append(parts)
            if tag not in point_of:
                point_of[tag] = sum(
                    (p.points[i] for p, i in zip(polys, combo, strict=True)), np.zeros(n)
                )

        tags = sorted(point_of)
        total = polytope_from_points(np.array([point_of[t] for t in tags]), tags)
        provenance: dict[Exponent, tuple[Exponent, ...]] = {}
        for tag in total.tags:
            candidates = by_tag[tag]
            if len(candidates) > 1:
                logger.warning("Vertex %s has %d decompositions", tag, len(candidates))
            provenance[tag] = min(candidates)
        return MinkowskiDecomposition(total=total, provenance=provenance)

    # ------------------------------------------------------------------
    # developed collections
    # ------------------------------------------------------------------

    def _candidate_functionals(self, polys: Sequence[Polytope]) -> list[np.ndarray]:
        """Functionals for which every polytope can have a positive-dimensional face.

        Such a functional is orthogonal to an edge of each polytope; candidates
        are generated from vertex differences.
        """
        n = polys[0].n
        diffs: list[np.ndarray] = []
        for p in polys:
            for a, b in itertools.combinations(range(len(p.tags)), 2):
                d = p.points[b] - p.points[a]
                if np.linalg.norm(d) > 0:
                    diffs.append(d / np.linalg.norm(d))
        out: list[np.ndarray] = []
        if n == 1:
            out = [np.array([1.0]), np.array([-1.0])]
        elif n == 2:
            for d in diffs:
                perp = np.array([-d[1], d[0]])
                out += [perp, -perp]
        else:
            for d, e in itertools.combinations(diffs, 2):
                cross = np.cross(d, e)
                if np.linalg.norm(cross) > REL_TOL:
                    out += [cross, -cross]
            for d in diffs:
                out += self._plane_samples(d, diffs)
        unique: dict[tuple[float, ...], np.ndarray] = {}
        for xi in out:
            xi = _normalized(xi)
            unique.setdefault(tuple(np.round(xi, 9)), xi)
        # Deterministic order: largest coordinate sum first.
        return sorted(unique.values(), key=lambda v: (-float(np.sum(v)), tuple(-v)))

    @staticmethod
    def _plane_samples(d: np.ndarray, diffs: Sequence[np.ndarray]) -> list[np.ndarray]:
        """Directions in d^⊥: crossings with other edge planes and their bisectors."""
        u = np.cross(d, [1.0, 0.0, 0.0])
        if np.linalg.norm(u) < 0.5:
            u = np.cross(d, [0.0, 1.0, 0.0])
        u /= np.linalg.norm(u)
        v = np.cross(d, u)
        angles: set[float] = set()
        for e in diffs:
            # ξ = cos t·u + sin t·v with ξ·e = 0
            a, b = float(u @ e), float(v @ e)
            if abs(a) < REL_TOL and abs(b) < REL_TOL:
                continue
            t = math.atan2(-a, b)
            angles.update({round(t % (2 * math.pi), 12), round((t + math.pi) % (2 * math.pi), 12)})
        ordered = sorted(angles) or [0.0]
        samples = []
        for i, t in enumerate(ordered):
            nxt = ordered[(i + 1) % len(ordered)] + (2 * math.pi if i + 1 == len(ordered) else 0.0)
            for s in (t, (t + nxt) / 2):
                samples.append(math.cos(s) * u + math.sin(s) * v)
        return samples

    def is_developed(self, polys: Sequence[Polytope]) -> DevelopedCheck:
        """Whether every coordinated collection of faces contains a vertex.

        Raises:
            DegenerateInput: some polytope is a single point.
            DimensionUnsupported: n > 3.
        """
        n = polys[0].n if polys else 0
        if len(polys) != n or any(p.n != n for p in polys):
            raise ValueError(f"is_developed needs n polytopes in ℝⁿ, got {len(polys)} in ℝ^{n}")
        for j, p in enumerate(polys):
            if p.is_point:
                raise DegenerateInput(f"Polytope {j} is a single point", index=j)
        if n > MAX_MIXED_VOLUME_DIM:
            raise DimensionUnsupported(f"Developed-collection test supports n ≤ 3, got {n}")

        candidates = self._candidate_functionals(polys)
        for xi in candidates:
            faces = tuple(p.face(xi) for p in polys)
            if all(len(face) > 1 for face in faces):
                witness = CoordinatedCollection(faces=faces, witness=tuple(float(x) for x in xi))
                logger.info("Not developed: functional %s selects no vertex", list(xi))
                return DevelopedCheck(False, witness, len(candidates))
        return DevelopedCheck(True, None, len(candidates))

    def coordinated_collection(self, polys: Sequence[Polytope], functional: Sequence[float]) -> CoordinatedCollection:
        """Faces selected by a given functional."""
        xi = np.asarray(functional, dtype=float)
        if not np.any(xi):
            raise ValueError("The functional must be nonzero")
        return CoordinatedCollection(
            faces=tuple(p.face(xi) for p in polys), witness=tuple(float(x) for x in xi)
        )

    # ------------------------------------------------------------------
    # mixed volume
    # ------------------------------------------------------------------

    def _subsum(self, polys: Sequence[Polytope]) -> Polytope:
        n = polys[0].n
        pts = [
            sum((p.points[i] for p, i in zip(polys, combo, strict=True)), np.zeros(n))
            for combo in itertools.product(*(range(len(p.tags)) for p in polys))
        ]
        zero = (0,) * len(polys[0].tags[0])
        return polytope_from_points(np.array(pts), [zero] * len(pts))

    def mixed_volume(self, polys: Sequence[Polytope]) -> float:
        """MV(P₁,…,P_n), normalized so MV(P,…,P) = Vol(P).

        Raises:
            DimensionUnsupported: n > 3.
        """
        n = len(polys)
        if n == 0 or any(p.n != n for p in polys):
            raise ValueError("mixed_volume needs n polytopes in ℝⁿ")
        if n > MAX_MIXED_VOLUME_DIM:
            raise DimensionUnsupported(f"Mixed volume supports n ≤ 3, got {n}", n=n)
        total = 0.0
        for size in range(1, n + 1):
            sign = (-1) ** (n - size)
            for subset in itertools.combinations(polys, size):
                total += sign * polytope_volume(self._subsum(subset))
        return total / math.factorial(n)

    def normalized_mixed_volume(self, polys: Sequence[Polytope]) -> float:
        """n!·MV, the expected zero density of a generic system."""
        return math.factorial(len(polys)) * self.mixed_volume(polys)
