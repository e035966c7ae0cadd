"""Exponential-sum algebra service.

Products, Jacobian determinants, normalization at a Newton-polytope vertex and
the constant term of H/F̃ expanded as a geometric series at that vertex.
"""

import itertools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.optimize import linprog

from expsum_lab.application.services.lattice import LatticeService
from expsum_lab.config import settings
from expsum_lab.domain.errors import ConeViolation, LatticeMismatch, NotAVertex
from expsum_lab.domain.value_objects.exp_sum import (
    Exponent,
    ExpSum,
    ExpSystem,
    TrigPoly,
    TrigTerm,
    same_lattice,
)
from expsum_lab.domain.value_objects.frequency import Frequency, FrequencyLattice

logger = logging.getLogger(__name__)

CONE_TOL = 1e-9


@dataclass(frozen=True)
class ConeFunctional:
    """ξ with ξ·s ≥ δ > 0 on a finite support, ‖ξ‖∞ ≤ 1."""

    xi: np.ndarray
    delta: float

    def lattice_weights(self, lattice: FrequencyLattice) -> np.ndarray:
        """ξ pulled back to ℤ^N: w_i = ξ·A_i."""
        return lattice.basis_matrix @ self.xi


def pointed_cone_functional(points: np.ndarray) -> Optional[ConeFunctional]:
    """Maximize δ subject to ξ·p ≥ δ for every row p, ‖ξ‖∞ ≤ 1.

    Returns None when the optimum δ is not positive, i.e. the points do not
    lie in an open half-space.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        return None
    n = pts.shape[1]
    diam = max(1.0, float(np.max(np.linalg.norm(pts, axis=1))))
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    a_ub = np.hstack([-pts, np.ones((pts.shape[0], 1))])
    b_ub = np.zeros(pts.shape[0])
    bounds = [(-1.0, 1.0)] * n + [(None, diam * n)]
    result = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not result.success:
        return None
    xi, delta = result.x[:n], float(result.x[-1])
    if delta <= CONE_TOL * diam:
        return None
    # The LP optimum is feasible up to solver tolerance; recompute δ exactly.
    return ConeFunctional(xi=xi, delta=float(np.min(pts @ xi)))


def _permutation_sign(perm: Sequence[int]) -> int:
    inversions = sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


class AlgebraService:
    """Operations on exponential sums that need more than one value object."""

    def __init__(
        self,
        lattice_service: Optional[LatticeService] = None,
        cutoff: Optional[float] = None,
    ):
        self.lattice_service = lattice_service or LatticeService()
        self.cutoff = cutoff if cutoff is not None else settings.coefficient_cutoff

    def multiply(self, F: ExpSum, G: ExpSum) -> ExpSum:
        return F.multiply(G, self.cutoff)

    def evaluate(self, F: ExpSum, z: Sequence[complex] | np.ndarray) -> complex | np.ndarray:
        return F.evaluate(z)

    def product(self, system: ExpSystem) -> ExpSum:
        return system.product(self.cutoff)

    def jacobian_det(self, system: ExpSystem) -> ExpSum:
        """det(∂F_j/∂z_k) expanded as an exponential sum (permutation sum)."""
        n = system.n
        derivs = [[comp.derivative(k) for k in range(n)] for comp in system.components]
        total = ExpSum(system.lattice)
        for perm in itertools.permutations(range(n)):
            term = ExpSum.constant(system.lattice, float(_permutation_sign(perm)))
            for j in range(n):
                term = term.multiply(derivs[j][perm[j]], self.cutoff)
                if term.is_zero:
                    break
            if not term.is_zero:
                total = total + term
        return total

    # ------------------------------------------------------------------
    # vertex expansion
    # ------------------------------------------------------------------

    def _resolve_exponent(self, F: ExpSum, vertex: Union[Exponent, Sequence[int], Frequency]) -> Exponent:
        if isinstance(vertex, Frequency):
            m = self.lattice_service.coords_of(vertex, F.lattice)
            if m is None:
                raise NotAVertex(f"{vertex} is not on the lattice of F")
            return m
        return tuple(int(x) for x in vertex)

    def normalize_at_vertex(
        self, F: ExpSum, vertex: Union[Exponent, Sequence[int], Frequency]
    ) -> tuple[ExpSum, complex]:
        """F̃ = F / (d_α exp 2παz) with constant term 1.

        Raises:
            NotAVertex: α is not a vertex of the Newton polytope of F.
        """
        m = self._resolve_exponent(F, vertex)
        d = F.coefficient(m)
        if d == 0:
            raise NotAVertex(f"Exponent {list(m)} is not in the support of F", exponent=list(m))
        alpha = F.lattice.frequency_of(m)
        others = np.array([row - alpha for row, k in zip(F.spectrum, F.support, strict=True) if k != m])
        if others.size and pointed_cone_functional(others) is None:
            raise NotAVertex(
                f"Frequency {list(alpha)} is not a vertex of the Newton polytope", exponent=list(m)
            )
        normalized = F.shift(tuple(-x for x in m)).scale(1.0 / d)
        return normalized, d

    def truncation_order(self, F_tilde: ExpSum, H: ExpSum) -> tuple[int, ConeFunctional]:
        """Sufficient number of series terms k ≤ max_τ ξ(−τ)/δ."""
        if abs(F_tilde.constant_term - 1) > 1e-9:
            raise ValueError("F̃ must have constant term 1")
        rest = F_tilde - ExpSum.constant(F_tilde.lattice)
        functional = pointed_cone_functional(rest.spectrum)
        if functional is None:
            raise ConeViolation("Support of 1 − F̃ lies in no pointed cone")
        if H.is_zero:
            return 0, functional
        levels = H.spectrum @ functional.xi
        order = max(0, math.floor(float(np.max(-levels)) / functional.delta + 1e-9))
        return order, functional

    def vertex_constant_term(self, F_tilde: ExpSum, H: ExpSum, extra_terms: int = 0) -> complex:
        """Coefficient of exp(0) in H·Σ_k (1 − F̃)^k.

        Monomials whose ξ-level is already positive cannot return to the
        origin and are dropped after each multiplication.

        Raises:
            ConeViolation: no strictly positive functional on supp(1 − F̃).
        """
        if not same_lattice(F_tilde.lattice, H.lattice):
            raise LatticeMismatch("F̃ and H live on different lattices")
        if abs(F_tilde.constant_term - 1) > 1e-9:
            raise ValueError("F̃ must have constant term 1")
        one = ExpSum.constant(F_tilde.lattice)
        step = one - F_tilde
        if step.is_zero:
            return H.constant_term
        order, functional = self.truncation_order(F_tilde, H)
        order += extra_terms
        weights = functional.lattice_weights(F_tilde.lattice)
        slack = CONE_TOL * max(1.0, float(np.max(np.abs(weights))))

        def restrict(P: ExpSum) -> ExpSum:
            return ExpSum(
                P.lattice,
                {m: c for m, c in P.terms.items() if float(np.dot(weights, m)) <= slack},
            )

        power = restrict(H)
        total = power.constant_term
        for _ in range(order):
            power = restrict(power.multiply(step, cutoff=0.0))
            if power.is_zero:
                break
            total += power.constant_term
        logger.debug("Constant term after %d series terms: %s", order, total)
        return complex(total)

    # ------------------------------------------------------------------
    # trigonometric polynomials
    # ------------------------------------------------------------------

    def trig_to_exp_sum(self, T: TrigPoly, lattice: FrequencyLattice) -> ExpSum:
        """ExpSum F with F(ix) = T(x): c cos + d sin ↦ (c − id)/2·e_α + (c + id)/2·e_{−α}."""
        terms: dict[Exponent, complex] = {}
        for term in T.terms:
            m = self.lattice_service.coords_of(term.alpha, lattice)
            if m is None:
                raise LatticeMismatch(f"Frequency {term.alpha} is not in the lattice")
            neg = tuple(-x for x in m)
            terms[m] = terms.get(m, 0) + complex(term.c, -term.d) / 2
            terms[neg] = terms.get(neg, 0) + complex(term.c, term.d) / 2
        return ExpSum(lattice, terms)

    def exp_sum_to_trig(self, F: ExpSum, tol: float = 1e-12) -> TrigPoly:
        """Inverse of ``trig_to_exp_sum`` for conjugate-symmetric F."""
        scale = max(1.0, F.max_abs_coefficient())
        terms: list[TrigTerm] = []
        for m in F.support:
            neg = tuple(-x for x in m)
            if abs(F.coefficient(neg) - F.coefficient(m).conjugate()) > tol * scale:
                raise ValueError(f"Exponent {list(m)} breaks conjugate symmetry")
            first = next((x for x in m if x != 0), 0)
            if first < 0:
                continue
            coeff = F.coefficient(m)
            alpha = F.lattice.exact_frequency_of(m)
            if first == 0:
                terms.append(TrigTerm(alpha=alpha, c=coeff.real))
            else:
                terms.append(TrigTerm(alpha=alpha, c=2 * coeff.real, d=-2 * coeff.imag))
        return TrigPoly(tuple(terms))
