"""Exponential sums with exponents on a frequency lattice."""

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np

from expsum_lab.domain.errors import LatticeMismatch
from expsum_lab.domain.value_objects.frequency import Frequency, FrequencyLattice

TWO_PI = 2.0 * np.pi
DEFAULT_CUTOFF = 1e-12

Exponent = tuple[int, ...]


def same_lattice(a: FrequencyLattice, b: FrequencyLattice) -> bool:
    """Two lattices are interchangeable when their bases coincide."""
    return a is b or (a.n == b.n and a.basis == b.basis)


def _prune(terms: Mapping[Exponent, complex], cutoff: float) -> dict[Exponent, complex]:
    if not terms:
        return {}
    scale = max(abs(c) for c in terms.values())
    if scale == 0:
        return {}
    return {m: complex(c) for m, c in terms.items() if abs(c) > cutoff * scale}


@dataclass(frozen=True)
class ExpSum:
    """F(z) = Σ c_m exp(2π (Σ mᵢAᵢ)·z) over a fixed frequency lattice.

    Attributes:
        lattice: the lattice the exponents live on
        terms: exponent m ∈ ℤ^N mapped to its nonzero coefficient
    """

    lattice: FrequencyLattice
    terms: dict[Exponent, complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cleaned: dict[Exponent, complex] = {}
        for m, c in self.terms.items():
            m = tuple(int(x) for x in m)
            if len(m) != self.lattice.N:
                raise LatticeMismatch(
                    f"Exponent {m} has length {len(m)}, lattice rank is {self.lattice.N}"
                )
            if c != 0:
                cleaned[m] = complex(c)
        object.__setattr__(self, "terms", cleaned)

    # -- constructors ---------------------------------------------------

    @classmethod
    def constant(cls, lattice: FrequencyLattice, value: complex = 1.0) -> "ExpSum":
        return cls(lattice, {lattice.zero(): value})

    @classmethod
    def monomial(cls, lattice: FrequencyLattice, m: Sequence[int], value: complex = 1.0) -> "ExpSum":
        return cls(lattice, {tuple(m): value})

    @classmethod
    def from_spectrum(
        cls, lattice: FrequencyLattice, pairs: Iterable[tuple[Frequency, complex]]
    ) -> "ExpSum":
        """Build from (frequency, coefficient) pairs whose frequencies are lattice inputs."""
        terms: dict[Exponent, complex] = {}
        for freq, coeff in pairs:
            m = lattice.coords.get(freq.key)
            if m is None:
                raise LatticeMismatch(f"Frequency {freq} is not an input of the lattice")
            terms[m] = terms.get(m, 0) + complex(coeff)
        return cls(lattice, terms)

    # -- structure ------------------------------------------------------

    @property
    def n(self) -> int:
        return self.lattice.n

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @cached_property
    def support(self) -> tuple[Exponent, ...]:
        return tuple(sorted(self.terms))

    @cached_property
    def exponent_matrix(self) -> np.ndarray:
        """Support as a T×N integer matrix, rows in ``support`` order."""
        if not self.terms:
            return np.zeros((0, self.lattice.N), dtype=np.int64)
        return np.array(self.support, dtype=np.int64).reshape(len(self.support), self.lattice.N)

    @cached_property
    def coefficients(self) -> np.ndarray:
        return np.array([self.terms[m] for m in self.support], dtype=complex)

    @cached_property
    def spectrum(self) -> np.ndarray:
        """Real frequencies of the support, T×n."""
        return self.exponent_matrix.astype(float) @ self.lattice.basis_matrix

    def coefficient(self, m: Sequence[int]) -> complex:
        return self.terms.get(tuple(m), 0j)

    @property
    def constant_term(self) -> complex:
        return self.coefficient(self.lattice.zero())

    def max_abs_coefficient(self) -> float:
        return float(np.max(np.abs(self.coefficients))) if self.terms else 0.0

    # -- arithmetic -----------------------------------------------------

    def _check(self, other: "ExpSum") -> None:
        if not same_lattice(self.lattice, other.lattice):
            raise LatticeMismatch("Exponential sums live on different lattices")

    def __add__(self, other: "ExpSum") -> "ExpSum":
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return ExpSum(self.lattice, _prune(terms, DEFAULT_CUTOFF))

    def __neg__(self) -> "ExpSum":
        return ExpSum(self.lattice, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "ExpSum") -> "ExpSum":
        return self + (-other)

    def scale(self, factor: complex) -> "ExpSum":
        return ExpSum(self.lattice, {m: factor * c for m, c in self.terms.items()})

    def shift(self, m: Sequence[int]) -> "ExpSum":
        """Multiply by the monomial exp(2π (Σ mᵢAᵢ)·z)."""
        offset = tuple(m)
        return ExpSum(
            self.lattice,
            {tuple(a + b for a, b in zip(k, offset, strict=True)): c for k, c in self.terms.items()},
        )

    def multiply(self, other: "ExpSum", cutoff: float = DEFAULT_CUTOFF) -> "ExpSum":
        """Exponent-wise convolution; coefficients below ``cutoff`` (relative) cancel.

        Raises:
            LatticeMismatch: the factors use different lattices.
        """
        self._check(other)
        terms: dict[Exponent, complex] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(m1, m2, strict=True))
                terms[key] = terms.get(key, 0) + c1 * c2
        if not terms:
            return ExpSum(self.lattice)
        # Cancellation is judged against the largest product term.
        scale = self.max_abs_coefficient() * other.max_abs_coefficient()
        return ExpSum(
            self.lattice, {m: c for m, c in terms.items() if abs(c) > cutoff * scale}
        )

    def __mul__(self, other: "ExpSum") -> "ExpSum":
        return self.multiply(other)

    def derivative(self, k: int) -> "ExpSum":
        """∂/∂z_k: each coefficient gains the factor 2π α_k."""
        alphas = self.spectrum[:, k] if self.terms else np.zeros(0)
        return ExpSum(
            self.lattice,
            {m: TWO_PI * float(a) * self.terms[m] for m, a in zip(self.support, alphas, strict=True)},
        )

    def translate(self, w: Sequence[complex]) -> "ExpSum":
        """z ↦ F(z + w) as an exponential sum on the same lattice."""
        w_arr = np.asarray(w, dtype=complex)
        factors = np.exp(TWO_PI * (self.spectrum @ w_arr)) if self.terms else np.zeros(0)
        return ExpSum(
            self.lattice,
            {m: self.terms[m] * complex(f) for m, f in zip(self.support, factors, strict=True)},
        )

    # -- evaluation -----------------------------------------------------

    def evaluate(self, z: Sequence[complex] | np.ndarray) -> complex | np.ndarray:
        """Σ c_m exp(2π α_m·z) at one point (shape (n,)) or a batch (shape (P, n))."""
        pts = np.asarray(z, dtype=complex)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        if pts.shape[-1] != self.n:
            raise ValueError(f"Expected points in C^{self.n}, got shape {pts.shape}")
        if not self.terms:
            values = np.zeros(pts.shape[0], dtype=complex)
        else:
            phases = TWO_PI * (pts @ self.spectrum.T)
            values = np.exp(phases) @ self.coefficients
        return complex(values[0]) if single else values

    def __call__(self, z: Sequence[complex] | np.ndarray) -> complex | np.ndarray:
        return self.evaluate(z)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "n": self.n,
            "terms": [
                {
                    "m": list(m),
                    "frequency": [float(x) for x in self.lattice.frequency_of(m)],
                    "coefficient": [self.terms[m].real, self.terms[m].imag],
                }
                for m in self.support
            ],
        }

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in self.support:
            c = self.terms[m]
            coeff = f"{c.real:g}" if c.imag == 0 else f"({c.real:g}{c.imag:+g}j)"
            parts.append(coeff if not any(m) else f"{coeff}*e{list(m)}")
        return " + ".join(parts)


@dataclass(frozen=True)
class TrigTerm:
    """c·cos(2π α·x) + d·sin(2π α·x)."""

    alpha: Frequency
    c: float
    d: float = 0.0

    def __post_init__(self) -> None:
        if self.c == 0 and self.d == 0:
            raise ValueError("A trigonometric term needs (c, d) ≠ (0, 0)")

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"alpha": self.alpha.to_dict()["value"], "c": self.c, "d": self.d}


@dataclass(frozen=True)
class TrigPoly:
    """Quasiperiodic trigonometric polynomial Σ c_k cos 2πα_k x + d_k sin 2πα_k x."""

    terms: tuple[TrigTerm, ...]

    @property
    def n(self) -> int:
        return self.terms[0].alpha.n if self.terms else 0

    def evaluate(self, x: Sequence[float] | np.ndarray) -> float | np.ndarray:
        pts = np.asarray(x, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        values = np.zeros(pts.shape[0])
        for term in self.terms:
            phase = TWO_PI * (pts @ term.alpha.vector)
            values += term.c * np.cos(phase) + term.d * np.sin(phase)
        return float(values[0]) if single else values

    def gradient(self, x: Sequence[float] | np.ndarray) -> np.ndarray:
        """∇T; shape (n,) for a point, (P, n) for a batch."""
        pts = np.asarray(x, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        grad = np.zeros_like(pts)
        for term in self.terms:
            alpha = term.alpha.vector
            phase = TWO_PI * (pts @ alpha)
            scale = TWO_PI * (-term.c * np.sin(phase) + term.d * np.cos(phase))
            grad += scale[:, None] * alpha[None, :]
        return grad[0] if single else grad

    def hessian(self, x: Sequence[float] | np.ndarray) -> np.ndarray:
        """Hessian; shape (n, n) for a point, (P, n, n) for a batch."""
        pts = np.asarray(x, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        hess = np.zeros((pts.shape[0], pts.shape[1], pts.shape[1]))
        for term in self.terms:
            alpha = term.alpha.vector
            phase = TWO_PI * (pts @ alpha)
            scale = -(TWO_PI**2) * (term.c * np.cos(phase) + term.d * np.sin(phase))
            hess += scale[:, None, None] * np.outer(alpha, alpha)[None, :, :]
        return hess[0] if single else hess

    @property
    def max_frequency(self) -> float:
        return max((float(np.max(np.abs(t.alpha.vector))) for t in self.terms), default=0.0)

    @property
    def constant_term(self) -> float:
        return sum(t.c for t in self.terms if t.alpha.is_zero)

    def abs_scale(self) -> float:
        return sum(abs(t.c) + abs(t.d) for t in self.terms)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"terms": [t.to_dict() for t in self.terms]}


@dataclass(frozen=True)
class ExpSystem:
    """F₁ = … = F_n = 0 over one shared lattice."""

    components: tuple[ExpSum, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("A system needs at least one component")
        lattice = self.components[0].lattice
        for comp in self.components[1:]:
            if not same_lattice(comp.lattice, lattice):
                raise LatticeMismatch("System components use different lattices")
        if len(self.components) != lattice.n:
            raise ValueError(
                f"System has {len(self.components)} components in {lattice.n} variables"
            )

    @property
    def lattice(self) -> FrequencyLattice:
        return self.components[0].lattice

    @property
    def n(self) -> int:
        return len(self.components)

    def product(self, cutoff: float = DEFAULT_CUTOFF) -> ExpSum:
        result = self.components[0]
        for comp in self.components[1:]:
            result = result.multiply(comp, cutoff)
        return result

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        """Values of all components; shape (n,) for a point, (P, n) for a batch."""
        pts = np.asarray(z, dtype=complex)
        single = pts.ndim == 1
        batch = np.atleast_2d(pts)
        values = np.stack([np.asarray(c.evaluate(batch)) for c in self.components], axis=-1)
        return values[0] if single else values

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        """Jacobian ∂F_j/∂z_k; shape (n, n) or (P, n, n)."""
        pts = np.asarray(z, dtype=complex)
        single = pts.ndim == 1
        batch = np.atleast_2d(pts)
        jac = np.zeros((batch.shape[0], self.n, self.n), dtype=complex)
        for j, comp in enumerate(self.components):
            if comp.is_zero:
                continue
            weights = np.exp(TWO_PI * (batch @ comp.spectrum.T)) * comp.coefficients
            jac[:, j, :] = TWO_PI * (weights @ comp.spectrum)
        return jac[0] if single else jac

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"components": [c.to_dict() for c in self.components]}
