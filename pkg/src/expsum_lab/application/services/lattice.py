"""Frequency lattice service.

Builds a ℤ-basis A₁…A_N of the group generated by a finite set of frequencies
and answers membership and commensurability queries against it.
"""

import logging
import math
from collections.abc import Sequence
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np
import sympy
from sympy.matrices.normalforms import hermite_normal_form

from expsum_lab.config import settings
from expsum_lab.domain.errors import RelationUndetectable
from expsum_lab.domain.value_objects.frequency import (
    Commensurability,
    Frequency,
    FrequencyLattice,
    LatticeFrame,
    radical_coordinates,
)

logger = logging.getLogger(__name__)

# Loose tolerance handed to PSLQ; candidates are re-checked at ε_freq.
_PSLQ_SLACK = 1e3
_PSLQ_DPS = 30


def _q(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _fraction(value: sympy.Expr) -> Fraction:
    value = sympy.nsimplify(value)
    return Fraction(int(value.p), int(value.q))


def _rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    if not vectors:
        return 0
    return int(sympy.Matrix([[_q(x) for x in v] for v in vectors]).rank())


def _solve_rational(
    columns: Sequence[Sequence[Fraction]], target: Sequence[Fraction]
) -> Optional[list[Fraction]]:
    """Solve Σ xᵢ·columnᵢ = target over ℚ; None when inconsistent."""
    if not columns:
        return [] if all(t == 0 for t in target) else None
    matrix = sympy.Matrix(
        [[_q(col[r]) for col in columns] for r in range(len(target))]
    )
    rhs = sympy.Matrix([_q(t) for t in target])
    try:
        solution, params = matrix.gauss_jordan_solve(rhs)
    except ValueError:
        return None
    if params.shape[0]:
        solution = solution.subs({p: 0 for p in params})
    return [_fraction(x) for x in solution]


def _integral(values: Sequence[Fraction]) -> Optional[tuple[int, ...]]:
    if all(v.denominator == 1 for v in values):
        return tuple(int(v) for v in values)
    return None


def _canonical(
    columns: list[list[Fraction]], coords: list[tuple[int, ...]]
) -> tuple[list[list[Fraction]], list[tuple[int, ...]]]:
    """Fix the sign and order of an equivalent basis.

    Every generator is oriented so the first input using it has a positive
    coordinate; generators are then ordered by the inputs' absolute
    coordinates, larger first, input by input.
    """
    cols = [list(c) for c in columns]
    rows = [list(m) for m in coords]
    for j in range(len(cols)):
        lead = next((m[j] for m in rows if m[j]), 0)
        if lead < 0:
            cols[j] = [-x for x in cols[j]]
            for m in rows:
                m[j] = -m[j]
    order = sorted(range(len(cols)), key=lambda j: (tuple(-abs(m[j]) for m in rows), j))
    return [cols[j] for j in order], [tuple(m[j] for j in order) for m in rows]


def _projection_weights(n: int) -> list[mpmath.mpf]:
    return [1 / mpmath.sqrt(j + mpmath.pi) for j in range(n)]


def _project(vector: np.ndarray, weights: list[mpmath.mpf]) -> mpmath.mpf:
    return mpmath.fsum(mpmath.mpf(float(v)) * w for v, w in zip(vector, weights, strict=True))


def _pslq(xs: list[mpmath.mpf], tol: float, bound: int) -> Optional[list[int]]:
    try:
        found = mpmath.pslq(xs, tol=mpmath.mpf(tol), maxcoeff=bound, maxsteps=10**4)
    except ValueError:
        # a zero projection: the relation search has nothing to work on
        return None
    return [int(c) for c in found] if found is not None else None


class LatticeService:
    """Frequency lattice construction and membership queries."""

    def __init__(self, relation_bound: Optional[int] = None, tolerance: Optional[float] = None):
        self.relation_bound = relation_bound or settings.relation_bound
        self.tolerance = tolerance or settings.frequency_tolerance

    # ------------------------------------------------------------------
    # find_basis
    # ------------------------------------------------------------------

    def find_basis(
        self,
        freqs: Sequence[Frequency],
        relation_bound: Optional[int] = None,
        tolerance: Optional[float] = None,
    ) -> FrequencyLattice:
        """Find a ℤ-basis of the group generated by ``freqs``.

        Exact inputs are decomposed over ℚ·sqrt(d) and reduced with a Hermite
        normal form; any decimal input switches to bounded integer-relation
        search.

        Raises:
            RelationUndetectable: an approximate relation is neither confirmed
                nor ruled out at the tolerance.
        """
        if not freqs:
            raise ValueError("find_basis needs at least one frequency")
        bound = relation_bound or self.relation_bound
        eps = tolerance or self.tolerance
        if bound < 1 or eps <= 0:
            raise ValueError("relation bound must be ≥ 1 and tolerance > 0")
        n = freqs[0].n
        if any(f.n != n for f in freqs):
            raise ValueError("All frequencies must have the same dimension")

        if all(f.is_exact for f in freqs):
            frame, vectors = self._exact_frame(freqs, n)
        else:
            frame, vectors = self._approximate_frame(freqs, n, bound, eps)

        basis_cols, coords = self._reduce(vectors, freqs)
        basis = tuple(self._frequency_from_frame(frame, col) for col in basis_cols)
        lattice = FrequencyLattice(
            n=n,
            basis=basis,
            entries=tuple(zip(freqs, coords, strict=True)),
            frame=frame,
            generators=tuple(tuple(c) for c in basis_cols),
            relation_bound=bound,
            tolerance=eps,
        )
        logger.info(
            "Lattice of %d frequencies: rank N=%d (%s, K=%d)",
            len(freqs),
            lattice.N,
            frame.mode,
            bound,
        )
        return lattice

    def _exact_frame(
        self, freqs: Sequence[Frequency], n: int
    ) -> tuple[LatticeFrame, list[list[Fraction]]]:
        radicands: set[int] = {1}
        for f in freqs:
            for entry in f.entries:
                assert entry.exact is not None
                radicands.update(radical_coordinates(entry.exact))
        frame = LatticeFrame(mode="exact", n=n, radicands=tuple(sorted(radicands)))
        vectors = []
        for f in freqs:
            vec = frame.exact_vector(f)
            assert vec is not None
            vectors.append(vec)
        return frame, vectors

    def _approximate_frame(
        self, freqs: Sequence[Frequency], n: int, bound: int, eps: float
    ) -> tuple[LatticeFrame, list[list[Fraction]]]:
        weights = _projection_weights(n)
        references: list[np.ndarray] = []
        rel_coords: list[list[Fraction]] = []
        for f in freqs:
            v = f.vector
            scale = max(1.0, float(np.max(np.abs(v))))
            if float(np.max(np.abs(v))) <= eps * scale:
                rel_coords.append([])
                continue
            found = self._relative_coords(v, references, weights, bound, eps)
            if found is None:
                references.append(v)
                rel_coords.append([Fraction(0)] * (len(references) - 1) + [Fraction(1)])
                logger.info("Frequency %s is independent of %d references", f, len(references) - 1)
            else:
                rel_coords.append(found)
        dim = len(references)
        vectors = [c + [Fraction(0)] * (dim - len(c)) for c in rel_coords]
        frame = LatticeFrame(
            mode="approximate",
            n=n,
            reference=tuple(tuple(float(x) for x in r) for r in references),
        )
        return frame, vectors

    def _relative_coords(
        self,
        v: np.ndarray,
        references: Sequence[np.ndarray],
        weights: list[mpmath.mpf],
        bound: int,
        eps: float,
        strict: bool = True,
    ) -> Optional[list[Fraction]]:
        """Rational coordinates of ``v`` over ``references`` via PSLQ."""
        if not references:
            return None
        scale = max(1.0, float(np.max(np.abs(v))), *(float(np.max(np.abs(r))) for r in references))
        with mpmath.workdps(_PSLQ_DPS):
            xs = [_project(r, weights) for r in references] + [_project(v, weights)]
            relation = _pslq(xs, eps * _PSLQ_SLACK, bound)
        if relation is None or relation[-1] == 0:
            return None
        c_v = relation[-1]
        coords = [Fraction(-c, c_v) for c in relation[:-1]]
        approx = sum((float(c) * r for c, r in zip(coords, references, strict=True)), np.zeros_like(v))
        residual = float(np.max(np.abs(approx - v)))
        if residual <= eps * scale:
            logger.debug("Relation %s accepted (residual %.3g)", relation, residual)
            return coords
        if residual <= eps * _PSLQ_SLACK * scale and strict:
            raise RelationUndetectable(
                f"Relation {relation} has residual {residual:.3g}, between ε and the search tolerance",
                relation=list(relation),
                residual=residual,
                tolerance=eps,
            )
        return None

    def _reduce(
        self, vectors: list[list[Fraction]], freqs: Sequence[Frequency]
    ) -> tuple[list[list[Fraction]], list[tuple[int, ...]]]:
        """Basis columns in frame coordinates plus integer coords of every input."""
        picked: list[list[Fraction]] = []
        for v in vectors:
            if any(v) and _rank(picked + [v]) > len(picked):
                picked.append(v)

        coords: list[tuple[int, ...]] = []
        for v in vectors:
            solution = _solve_rational(picked, v)
            integral = _integral(solution) if solution is not None else None
            if integral is None:
                break
            coords.append(integral)
        else:
            return _canonical(picked, coords)

        # Inputs are not integral over the picked ones: reduce the full lattice.
        denom = math.lcm(*(x.denominator for v in vectors for x in v)) if vectors else 1
        dim = len(vectors[0])
        # Zero columns keep the matrix at least square; every row then gets a pivot pass.
        matrix = sympy.Matrix(
            [[int(v[r] * denom) for v in vectors] + [0] * dim for r in range(dim)]
        )
        hnf = hermite_normal_form(matrix)
        basis_cols = []
        for j in range(hnf.shape[1]):
            col = [Fraction(int(hnf[r, j]), denom) for r in range(dim)]
            if any(col):
                basis_cols.append(col)
        coords = []
        for v, f in zip(vectors, freqs, strict=True):
            solution = _solve_rational(basis_cols, v)
            integral = _integral(solution) if solution is not None else None
            if integral is None:
                raise ArithmeticError(f"Reduced basis does not represent {f}")
            coords.append(integral)
        logger.info("Hermite reduction replaced %d picked inputs by %d generators", len(picked), len(basis_cols))
        return _canonical(basis_cols, coords)

    def _frequency_from_frame(self, frame: LatticeFrame, column: Sequence[Fraction]) -> Frequency:
        if frame.mode == "exact":
            width = len(frame.radicands)
            values = []
            for c in range(frame.n):
                total = sympy.Integer(0)
                for i, radicand in enumerate(frame.radicands):
                    coeff = column[c * width + i]
                    if coeff:
                        total += _q(coeff) * sympy.sqrt(radicand)
                values.append(sympy.expand(total))
            return Frequency.of(*values)
        real = np.zeros(frame.n)
        for coeff, ref in zip(column, frame.reference, strict=True):
            real += float(coeff) * np.asarray(ref)
        return Frequency.of(*(float(x) for x in real))

    # ------------------------------------------------------------------
    # Membership
    # ------------------------------------------------------------------

    def _frame_vector(self, lattice: FrequencyLattice, alpha: Frequency) -> Optional[list[Fraction]]:
        """Coordinates of α in the lattice frame, None when α leaves it."""
        if alpha.n != lattice.n:
            raise ValueError(f"Frequency has dimension {alpha.n}, lattice has {lattice.n}")
        if lattice.is_exact and alpha.is_exact:
            return lattice.frame.exact_vector(alpha)
        v = alpha.vector
        if float(np.max(np.abs(v))) <= lattice.tolerance * max(1.0, float(np.max(np.abs(v)))):
            return [Fraction(0)] * len(lattice.generators[0]) if lattice.generators else []
        weights = _projection_weights(lattice.n)
        if lattice.is_exact:
            # Approximate query against an exact lattice: work over the basis itself.
            refs = [b.vector for b in lattice.basis]
            rel = self._relative_coords(
                v, refs, weights, lattice.relation_bound, lattice.tolerance, strict=False
            )
            if rel is None:
                return None
            return self._to_frame(lattice, rel)
        refs = [np.asarray(r) for r in lattice.frame.reference]
        return self._relative_coords(
            v, refs, weights, lattice.relation_bound, lattice.tolerance, strict=False
        )

    @staticmethod
    def _to_frame(lattice: FrequencyLattice, basis_coords: Sequence[Fraction]) -> list[Fraction]:
        dim = len(lattice.generators[0])
        out = [Fraction(0)] * dim
        for c, gen in zip(basis_coords, lattice.generators, strict=True):
            for r in range(dim):
                out[r] += c * gen[r]
        return out

    def _rational_coords(self, lattice: FrequencyLattice, alpha: Frequency) -> Optional[list[Fraction]]:
        if alpha.is_zero:
            return [Fraction(0)] * lattice.N
        vec = self._frame_vector(lattice, alpha)
        if vec is None:
            return None
        return _solve_rational(lattice.generators, vec)

    def coords_of(self, alpha: Frequency, lattice: FrequencyLattice) -> Optional[tuple[int, ...]]:
        """Integer vector m with α = Σ mᵢAᵢ, or None."""
        solution = self._rational_coords(lattice, alpha)
        if solution is None:
            return None
        return _integral(solution)

    def is_commensurate(
        self, alpha: Frequency, lattice: FrequencyLattice, relation_bound: Optional[int] = None
    ) -> Commensurability:
        """Whether some kα with 1 ≤ |k| ≤ K lies in the lattice; k is the least such."""
        bound = relation_bound or self.relation_bound
        if bound < 1:
            raise ValueError("relation bound must be ≥ 1")
        solution = self._rational_coords(lattice, alpha)
        if solution is None:
            return Commensurability(commensurate=False, bound=bound)
        k = math.lcm(*(x.denominator for x in solution)) if solution else 1
        if k <= bound:
            return Commensurability(commensurate=True, witness=k, bound=bound)
        return Commensurability(commensurate=False, bound=bound)

    def integer_relation(self, lattice: FrequencyLattice) -> Optional[tuple[int, ...]]:
        """A nonzero k with Σ kᵢAᵢ = 0 and max|kᵢ| ≤ K, or None (density certificate)."""
        if lattice.N < 2:
            return None
        if lattice.is_exact:
            cols = [list(g) for g in lattice.generators]
            if _rank(cols) == len(cols):
                return None
            null = sympy.Matrix([[_q(g[r]) for g in cols] for r in range(len(cols[0]))]).nullspace()
            vec = null[0]
            denom = math.lcm(*(int(sympy.fraction(x)[1]) for x in vec))
            ints = [int(x * denom) for x in vec]
            g = math.gcd(*ints)
            rel = tuple(i // g for i in ints)
            return rel if max(abs(i) for i in rel) <= lattice.relation_bound else None
        weights = _projection_weights(lattice.n)
        with mpmath.workdps(_PSLQ_DPS):
            xs = [_project(b.vector, weights) for b in lattice.basis]
            relation = _pslq(xs, lattice.tolerance * _PSLQ_SLACK, lattice.relation_bound)
        if relation is None:
            return None
        residual = np.asarray(relation, dtype=float) @ lattice.basis_matrix
        if float(np.max(np.abs(residual))) <= lattice.tolerance * max(1.0, float(np.max(np.abs(lattice.basis_matrix)))):
            return tuple(int(c) for c in relation)
        return None
