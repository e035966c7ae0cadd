"""Mean-value formula service.

Evaluates (−2π)^{−n} Σ_α k_α C_α over the vertices α of Δ = Δ₁ + … + Δ_n,
where C_α is the constant term of H/F̃ expanded at α.
"""

import logging
import math
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Union

from expsum_lab.application.services.algebra import AlgebraService
from expsum_lab.application.services.geometry import GeometryService
from expsum_lab.config import settings
from expsum_lab.domain.errors import (
    DegenerateSegment,
    LatticeMismatch,
    MissingCoefficients,
    NotDeveloped,
)
from expsum_lab.domain.value_objects.exp_sum import ExpSum, ExpSystem, same_lattice
from expsum_lab.domain.value_objects.polytope import Exponent, Polytope
from expsum_lab.domain.value_objects.results import Prediction, VertexContribution

logger = logging.getLogger(__name__)

KMap = Mapping[Union[str, Exponent], int]


def vertex_key(vertex: Exponent) -> str:
    """Key used for Δ-vertices in k-coefficient files: ``"m1,...,mN"``."""
    return ",".join(str(int(x)) for x in vertex)


def _parse_k_map(k: KMap) -> dict[Exponent, int]:
    out: dict[Exponent, int] = {}
    for key, value in k.items():
        if isinstance(key, str):
            vertex = tuple(int(p) for p in key.replace(" ", "").strip("()[]").split(",") if p)
        else:
            vertex = tuple(int(x) for x in key)
        if int(value) != value:
            raise ValueError(f"Combinatorial coefficient for {key} must be an integer")
        out[vertex] = int(value)
    return out


class FormulaService:
    """Predicted mean values of G over the zeros of a system."""

    def __init__(
        self,
        algebra: Optional[AlgebraService] = None,
        geometry: Optional[GeometryService] = None,
        threads: Optional[int] = None,
    ):
        self.algebra = algebra or AlgebraService()
        self.geometry = geometry or GeometryService()
        self.threads = threads or settings.threads

    def combinatorial_coefficients_1d(self, segment: Polytope) -> dict[Exponent, int]:
        """k = +1 at the lower end of a Newton segment, −1 at the upper end.

        Raises:
            DegenerateSegment: the polytope is not a nondegenerate segment in ℝ.
        """
        if segment.n != 1 or segment.dim != 1 or len(segment.tags) != 2:
            raise DegenerateSegment(
                f"Expected a nondegenerate segment in ℝ, got a {segment.dim}-dimensional polytope "
                f"with {len(segment.tags)} vertices in ℝ^{segment.n}"
            )
        lower, upper = sorted(segment.tags, key=lambda t: segment.vertex_of(t)[0])
        return {lower: 1, upper: -1}

    def _coefficients(
        self, system: ExpSystem, total: Polytope, k: Optional[KMap]
    ) -> tuple[dict[Exponent, int], str]:
        if system.n == 1 and k is None:
            return self.combinatorial_coefficients_1d(total), "calibrated"
        if k is None:
            raise MissingCoefficients(
                f"n = {system.n} needs combinatorial coefficients for every vertex of Δ",
                vertices=[vertex_key(v) for v in total.tags],
            )
        parsed = _parse_k_map(k)
        missing = [vertex_key(v) for v in total.tags if v not in parsed]
        if missing:
            raise MissingCoefficients(
                f"No combinatorial coefficient for vertices {missing}", vertices=missing
            )
        return {v: parsed[v] for v in total.tags}, "user"

    def predict_mean(
        self, system: ExpSystem, G: ExpSum, k: Optional[KMap] = None
    ) -> Prediction:
        """Predicted mean value of G over the zeros of ``system``.

        Raises:
            NotDeveloped: the Newton polytopes are not a developed collection.
            MissingCoefficients: n ≥ 2 and ``k`` does not cover every vertex.
            DegenerateSegment: n = 1 and F has a single exponent.
        """
        if not same_lattice(system.lattice, G.lattice):
            raise LatticeMismatch("G must live on the lattice of the system")
        polys = [self.geometry.newton_polytope(F) for F in system.components]
        if system.n > 1:
            check = self.geometry.is_developed(polys)
            if not check.developed:
                raise NotDeveloped(
                    "Newton polytopes do not form a developed collection",
                    witness=check.witness,
                )
        decomposition = self.geometry.minkowski_sum(polys)
        coefficients, source = self._coefficients(system, decomposition.total, k)

        F = self.algebra.product(system)
        HG = self.algebra.multiply(G, self.algebra.jacobian_det(system))

        def contribution(vertex: Exponent) -> VertexContribution:
            summands = decomposition.provenance[vertex]
            expected = math.prod(
                comp.coefficient(s) for comp, s in zip(system.components, summands, strict=True)
            )
            F_tilde, d = self.algebra.normalize_at_vertex(F, vertex)
            if abs(d - expected) > 1e-9 * max(1.0, abs(expected)):
                logger.warning("Vertex %s: d=%s differs from summand product %s", vertex, d, expected)
            H = HG.shift(tuple(-x for x in vertex)).scale(1.0 / d)
            C = self.algebra.vertex_constant_term(F_tilde, H)
            return VertexContribution(
                vertex=vertex,
                frequency=tuple(float(x) for x in F.lattice.frequency_of(vertex)),
                d=d,
                C=C,
                k=coefficients[vertex],
                summands=summands,
            )

        vertices = sorted(decomposition.total.tags)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            contributions = tuple(pool.map(contribution, vertices))

        acc = 0j
        for c in contributions:
            acc += c.term
        total = acc / (-2.0 * math.pi) ** system.n
        logger.info("Predicted mean value %s from %d vertices", total, len(contributions))
        return Prediction(total=total, contributions=contributions, n=system.n, k_source=source)
