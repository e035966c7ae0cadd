"""Frequency value objects.

A frequency is a vector of n real numbers. Each coordinate is either exact (a
rational combination of square roots, held as a sympy expression) or
approximate (a decimal literal, held as a float).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Literal, Union

import numpy as np
import sympy

ExactValue = Union[int, Fraction, sympy.Expr]


def radical_coordinates(expr: sympy.Expr) -> dict[int, Fraction]:
    """Split an exact value into rational coefficients of square roots.

    ``1 + 2*sqrt(3)`` becomes ``{1: 1, 3: 2}``; radicands are square-free
    positive integers (sympy normalizes ``sqrt(8)`` to ``2*sqrt(2)``).
    """
    expr = sympy.expand(sympy.sympify(expr))
    if expr == 0:
        return {}
    out: dict[int, Fraction] = {}
    for term, coeff in expr.as_coefficients_dict().items():
        if not coeff.is_Rational:
            raise ValueError(f"Not a rational combination of square roots: {expr}")
        if term == 1:
            radicand = 1
        else:
            square = term**2
            if not (square.is_Integer and square > 0):
                raise ValueError(f"Not a rational combination of square roots: {expr}")
            radicand = int(square)
        value = Fraction(int(coeff.p), int(coeff.q))
        if value:
            out[radicand] = out.get(radicand, Fraction(0)) + value
    return {d: c for d, c in out.items() if c}


def format_exact(expr: sympy.Expr) -> str:
    """Render an exact value in the frequency-expression grammar."""
    parts = radical_coordinates(expr)
    if not parts:
        return "0"
    pieces: list[str] = []
    for radicand in sorted(parts):
        coeff = parts[radicand]
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        if radicand == 1:
            body = str(mag)
        elif mag == 1:
            body = f"sqrt({radicand})"
        elif mag.denominator == 1:
            body = f"{mag.numerator}*sqrt({radicand})"
        else:
            body = f"{mag.numerator}*sqrt({radicand})/{mag.denominator}"
        pieces.append(f"{sign}{body}")
    text = "".join(pieces)
    return text[1:] if text.startswith("+") else text


@dataclass(frozen=True)
class FrequencyEntry:
    """One coordinate of a frequency vector.

    Attributes:
        text: source or canonical text of the value
        approx: floating value
        exact: sympy expression, or None for a decimal literal
    """

    text: str
    approx: float
    exact: sympy.Expr | None = None

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    @property
    def exactness(self) -> Literal["exact", "approximate"]:
        return "exact" if self.is_exact else "approximate"

    @classmethod
    def from_value(cls, value: ExactValue | float) -> "FrequencyEntry":
        """Build an entry; Python floats are tagged approximate."""
        if isinstance(value, float):
            return cls(text=repr(value), approx=value, exact=None)
        if isinstance(value, Fraction):
            expr = sympy.Rational(value.numerator, value.denominator)
        else:
            expr = sympy.nsimplify(value) if not isinstance(value, sympy.Expr) else value
        expr = sympy.expand(expr)
        return cls(text=format_exact(expr), approx=float(expr), exact=expr)

    def __neg__(self) -> "FrequencyEntry":
        if self.exact is not None:
            return FrequencyEntry.from_value(-self.exact)
        return FrequencyEntry(text=repr(-self.approx), approx=-self.approx)

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class Frequency:
    """A frequency vector α ∈ ℝⁿ."""

    entries: tuple[FrequencyEntry, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("A frequency needs at least one coordinate")

    @classmethod
    def of(cls, *values: ExactValue | float | FrequencyEntry) -> "Frequency":
        """Frequency from numbers: ints, Fractions and sympy values are exact."""
        return cls(
            tuple(
                v if isinstance(v, FrequencyEntry) else FrequencyEntry.from_value(v)
                for v in values
            )
        )

    @classmethod
    def zero(cls, n: int) -> "Frequency":
        return cls.of(*([0] * n))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def is_exact(self) -> bool:
        return all(e.is_exact for e in self.entries)

    @property
    def is_zero(self) -> bool:
        if self.is_exact:
            return all(e.exact == 0 for e in self.entries)
        return not np.any(self.vector)

    @cached_property
    def vector(self) -> np.ndarray:
        return np.array([e.approx for e in self.entries], dtype=float)

    @property
    def key(self) -> str:
        return ";".join(e.text for e in self.entries)

    def __neg__(self) -> "Frequency":
        return Frequency(tuple(-e for e in self.entries))

    def __str__(self) -> str:
        if self.n == 1:
            return self.entries[0].text
        return "(" + ", ".join(e.text for e in self.entries) + ")"

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "value": [e.text for e in self.entries],
            "approx": [e.approx for e in self.entries],
            "exactness": [e.exactness for e in self.entries],
        }


@dataclass(frozen=True)
class LatticeFrame:
    """Reference coordinates in which lattice membership is decided.

    Exact mode: each frequency maps to the rational coefficients of
    ``sqrt(d)`` for every radicand ``d`` and every component.
    Approximate mode: each frequency maps to rational coordinates relative to
    a set of reference vectors found by integer-relation search.
    """

    mode: Literal["exact", "approximate"]
    n: int
    radicands: tuple[int, ...] = ()
    reference: tuple[tuple[float, ...], ...] = ()

    @property
    def dim(self) -> int:
        if self.mode == "exact":
            return self.n * len(self.radicands)
        return len(self.reference)

    def exact_vector(self, freq: Frequency) -> list[Fraction] | None:
        """Frame coordinates of an exact frequency, None if it leaves the frame."""
        if self.mode != "exact" or not freq.is_exact or freq.n != self.n:
            return None
        index = {d: i for i, d in enumerate(self.radicands)}
        out = [Fraction(0)] * self.dim
        for c, entry in enumerate(freq.entries):
            assert entry.exact is not None
            for radicand, coeff in radical_coordinates(entry.exact).items():
                if radicand not in index:
                    return None
                out[c * len(self.radicands) + index[radicand]] = coeff
        return out

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "mode": self.mode,
            "n": self.n,
            "radicands": list(self.radicands),
            "reference": [list(r) for r in self.reference],
        }


@dataclass(frozen=True)
class FrequencyLattice:
    """Z-module basis A₁…A_N of the frequency group plus input coordinates.

    Attributes:
        n: ambient dimension
        basis: the generators A₁…A_N
        entries: (input frequency, integer coordinate vector) pairs
        frame: reference frame used for membership decisions
        generators: basis vectors written in frame coordinates
        relation_bound: coefficient bound K used for relation searches
        tolerance: ε_freq used for approximate inputs
    """

    n: int
    basis: tuple[Frequency, ...]
    entries: tuple[tuple[Frequency, tuple[int, ...]], ...]
    frame: LatticeFrame
    generators: tuple[tuple[Fraction, ...], ...] = field(repr=False)
    relation_bound: int = 50
    tolerance: float = 1e-9

    @property
    def N(self) -> int:
        return len(self.basis)

    @property
    def is_exact(self) -> bool:
        return self.frame.mode == "exact"

    @cached_property
    def basis_matrix(self) -> np.ndarray:
        """N×n matrix whose rows are the generators."""
        if not self.basis:
            return np.zeros((0, self.n))
        return np.vstack([b.vector for b in self.basis])

    @cached_property
    def coords(self) -> dict[str, tuple[int, ...]]:
        return {freq.key: m for freq, m in self.entries}

    def frequency_of(self, m: tuple[int, ...] | np.ndarray) -> np.ndarray:
        """Real frequency Σ mᵢAᵢ of a coordinate vector."""
        return np.asarray(m, dtype=float) @ self.basis_matrix

    def exact_frequency_of(self, m: tuple[int, ...]) -> Frequency:
        """Σ mᵢAᵢ as a Frequency (exact when the lattice is exact)."""
        if not self.is_exact:
            return Frequency.of(*(float(v) for v in self.frequency_of(m)))
        values = []
        for c in range(self.n):
            total = sympy.Integer(0)
            for mi, b in zip(m, self.basis, strict=True):
                if mi:
                    exact = b.entries[c].exact
                    assert exact is not None
                    total += mi * exact
            values.append(sympy.expand(total))
        return Frequency.of(*values)

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.N

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "n": self.n,
            "N": self.N,
            "basis": [b.to_dict()["value"] for b in self.basis],
            "coords": [
                {"frequency": f.to_dict()["value"], "m": list(m)} for f, m in self.entries
            ],
            "frame": self.frame.to_dict(),
            "relation_bound": self.relation_bound,
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class Commensurability:
    """Answer to "does some kα, 1 ≤ |k| ≤ K, lie in the lattice"."""

    commensurate: bool
    witness: int | None = None
    bound: int = 0

    def __bool__(self) -> bool:
        return self.commensurate

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "commensurate": self.commensurate,
            "witness": self.witness,
            "bound": self.bound,
        }
