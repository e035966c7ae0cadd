"""Empirical mean values over growing windows.

S_Ω(λ) sums G over the zeros whose imaginary part lies in λΩ (or T over the
isolated points of a real semitrigonometric set); the report divides by
Vol(λΩ) along a geometric λ schedule and extrapolates from the tail.
"""

import itertools
import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Union

import numpy as np

from expsum_lab.application.services.torus import TorusService
from expsum_lab.application.services.zeros import ZeroFinderService, golden_offset, strip_box_for
from expsum_lab.config import settings
from expsum_lab.domain.errors import DimensionUnsupported, OrbitDegenerate
from expsum_lab.domain.value_objects.exp_sum import ExpSum, ExpSystem, TrigPoly, same_lattice
from expsum_lab.domain.value_objects.frequency import FrequencyLattice
from expsum_lab.domain.value_objects.results import (
    Comparison,
    LambdaEstimate,
    MeanValueReport,
    Prediction,
    ZeroRecord,
)
from expsum_lab.domain.value_objects.torus import IsolatedPoint, SemiTrigSet
from expsum_lab.domain.value_objects.window import WindowSpec

logger = logging.getLogger(__name__)

MIN_SCHEDULE_STEPS = 4
TAIL = 3


def tail_statistics(estimates: Sequence[complex]) -> tuple[complex, float]:
    """Mean of the last two estimates and the max pairwise deviation over the last three."""
    if not estimates:
        return 0j, 0.0
    last_two = list(estimates[-2:])
    extrapolated = complex(sum(last_two) / len(last_two))
    tail = list(estimates[-TAIL:])
    diagnostic = max((abs(a - b) for a, b in itertools.combinations(tail, 2)), default=0.0)
    return extrapolated, float(diagnostic)


class MeanValueService:
    """Window sums, schedule estimates and comparison with predictions."""

    def __init__(
        self,
        zero_finder: Optional[ZeroFinderService] = None,
        torus: Optional[TorusService] = None,
        threads: Optional[int] = None,
        convergence_tolerance: Optional[float] = None,
        compare_tolerance: Optional[float] = None,
    ):
        self.zero_finder = zero_finder or ZeroFinderService()
        self.torus = torus or TorusService()
        self.threads = threads or settings.threads
        self.convergence_tolerance = convergence_tolerance or settings.convergence_tolerance
        self.compare_tolerance = compare_tolerance or settings.compare_tolerance

    # ------------------------------------------------------------------
    # complex systems
    # ------------------------------------------------------------------

    def _selected(
        self,
        zeros: Sequence[ZeroRecord],
        window: WindowSpec,
        lam: float,
        collar: float,
    ) -> list[ZeroRecord]:
        if not zeros:
            return []
        imag = np.array([z.imag for z in zeros])
        if imag.shape[1] != window.n:
            raise ValueError(f"Window is {window.n}-dimensional, zeros have {imag.shape[1]} coordinates")
        inside = window.contains(imag, lam)
        if collar > 0:
            inside &= window.boundary_distance(imag, lam) >= collar
        return [z for z, keep in zip(zeros, inside, strict=True) if keep]

    def window_sum(
        self,
        zeros: Sequence[ZeroRecord],
        G: ExpSum,
        window: WindowSpec,
        lam: float,
        collar: float = 0.0,
        min_multiplicity: int = 1,
    ) -> complex:
        """Σ multiplicity·G(z) over the zeros with Im z in the closed window λΩ.

        With ``min_multiplicity`` k > 1 only zeros of multiplicity ≥ k count, once
        each. ``collar`` drops zeros closer than that to ∂(λΩ).

        Raises:
            DimensionUnsupported: k > 1 on zeros without verified multiplicities.
        """
        if min_multiplicity < 1:
            raise ValueError("min_multiplicity must be at least 1")
        chosen = self._selected(zeros, window, lam, collar)
        if min_multiplicity > 1:
            if any(z.multiplicity_unverified for z in chosen):
                raise DimensionUnsupported(
                    "Multiplicity-restricted sums need verified multiplicities (n = 1)"
                )
            chosen = [z for z in chosen if z.multiplicity >= min_multiplicity]
            weights = np.ones(len(chosen))
        else:
            weights = np.array([z.multiplicity for z in chosen], dtype=float)
        if not chosen:
            return 0j
        values = np.asarray(G.evaluate(np.array([z.z for z in chosen])))
        return complex(np.sum(weights * values))

    @staticmethod
    def search_bounds(window: WindowSpec) -> tuple[np.ndarray, np.ndarray]:
        """Bounding box of every λΩ on the schedule, padded off the window edges."""
        lows, highs = zip(*(window.bounds(lam) for lam in window.schedule), strict=True)
        lo = np.min(lows, axis=0)
        hi = np.max(highs, axis=0)
        pad = 0.01 * (1.5 + golden_offset(7))
        return lo - pad, hi + pad

    def estimate_mean(
        self,
        system: ExpSystem,
        G: ExpSum,
        window: WindowSpec,
        min_multiplicity: int = 1,
        collar: float = 0.0,
    ) -> MeanValueReport:
        """S_Ω(λ)/Vol(λΩ) over the schedule of ``window``.

        Zeros are located once over the union of all windows; the report carries
        a ``NonConvergent`` warning when the tail diagnostic exceeds the
        convergence tolerance.

        Raises:
            NotDeveloped: the system is not developed.
            DimensionUnsupported: k > 1 requested for n ≥ 2.
        """
        if window.steps < MIN_SCHEDULE_STEPS:
            raise ValueError(f"Schedule needs J ≥ {MIN_SCHEDULE_STEPS}, got {window.steps}")
        if window.n != system.n:
            raise ValueError(f"Window is {window.n}-dimensional, system has {system.n} variables")
        if not same_lattice(system.lattice, G.lattice):
            raise ValueError("G must live on the lattice of the system")
        if min_multiplicity > 1 and system.n > 1:
            raise DimensionUnsupported("Multiplicity-restricted mean values are available for n = 1 only")

        strip = self.zero_finder.strip_radius(system)
        lo, hi = self.search_bounds(window)
        search = self.zero_finder.locate_zeros(system, strip_box_for(strip.R, lo, hi))

        def at(lam: float) -> LambdaEstimate:
            total = self.window_sum(search.zeros, G, window, lam, collar, min_multiplicity)
            count = sum(z.multiplicity for z in self._selected(search.zeros, window, lam, collar))
            return LambdaEstimate(lam=lam, total=total, volume=window.volume(lam), count=count)

        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            per_lambda = tuple(pool.map(at, window.schedule))

        extrapolated, diagnostic = tail_statistics([e.estimate for e in per_lambda])
        warnings = list(search.warnings)
        if diagnostic > self.convergence_tolerance * max(1.0, abs(extrapolated)):
            warnings.append("NonConvergent")
            logger.warning(
                "NonConvergent: tail deviation %.3g exceeds %.3g", diagnostic, self.convergence_tolerance
            )
        logger.info("Mean value estimate %s over %d scales", extrapolated, len(per_lambda))
        return MeanValueReport(
            per_lambda=per_lambda,
            extrapolated=extrapolated,
            diagnostic=diagnostic,
            warnings=tuple(warnings),
            seed=self.zero_finder.seed,
            details={
                "strip": strip.to_dict(),
                "zero_count": search.count,
                "expected_count": search.expected_count,
                "min_multiplicity": min_multiplicity,
                "collar": collar,
            },
        )

    def compare_prediction(
        self,
        report: Union[MeanValueReport, complex],
        prediction: Union[Prediction, complex],
        tolerance: Optional[float] = None,
    ) -> Comparison:
        """Absolute/relative discrepancy; passes when |Δ| ≤ tol·max(1, |predicted|)."""
        tol = tolerance or self.compare_tolerance
        estimate = report.extrapolated if isinstance(report, MeanValueReport) else complex(report)
        predicted = prediction.total if isinstance(prediction, Prediction) else complex(prediction)
        absolute = abs(estimate - predicted)
        relative = absolute / abs(predicted) if abs(predicted) > 0 else float("inf") if absolute else 0.0
        passed = absolute <= tol * max(1.0, abs(predicted))
        if not passed:
            logger.warning("Prediction mismatch %.3g > %.3g; extend the λ schedule", absolute, tol)
        return Comparison(
            estimate=estimate,
            predicted=predicted,
            absolute=float(absolute),
            relative=float(relative),
            tolerance=tol,
            passed=passed,
            extend_lambda=not passed,
        )

    # ------------------------------------------------------------------
    # real semitrigonometric sets
    # ------------------------------------------------------------------

    def real_window_sum(
        self, points: Sequence[IsolatedPoint], window: WindowSpec, lam: float, collar: float = 0.0
    ) -> tuple[float, int]:
        """Σ T over isolated points inside λΩ, and how many there were."""
        if not points:
            return 0.0, 0
        xs = np.array([p.x for p in points])
        inside = window.contains(xs, lam)
        if collar > 0:
            inside &= window.boundary_distance(xs, lam) >= collar
        values = np.array([p.value for p in points])
        return float(np.sum(values[inside])), int(np.count_nonzero(inside))

    def estimate_real_mean(
        self,
        V: SemiTrigSet,
        T: TrigPoly,
        window: WindowSpec,
        lattice: Optional[FrequencyLattice] = None,
    ) -> MeanValueReport:
        """Mean value of T over the isolated points of V along the schedule.

        When the frequencies of V span less than ℝⁿ, V has no isolated points
        and the report is identically zero.
        """
        if window.n != V.n:
            raise ValueError(f"Window is {window.n}-dimensional, V lives in ℝ^{V.n}")
        details: dict[str, object] = {}
        if lattice is not None:
            try:
                lift = self.torus.build_lift(lattice)
                details["torus_dimension"] = lift.N
                details["dense"] = lift.dense
            except OrbitDegenerate as exc:
                logger.info("Orbit degenerate (%s); no isolated points, mean value 0", exc)
                zero = tuple(
                    LambdaEstimate(lam=lam, total=0j, volume=window.volume(lam))
                    for lam in window.schedule
                )
                return MeanValueReport(
                    per_lambda=zero,
                    extrapolated=0j,
                    diagnostic=0.0,
                    warnings=("OrbitDegenerate",),
                    details={"reason": "no isolated points"},
                )

        # one enumeration over the largest window covers the whole schedule
        largest = window.schedule[-1]
        search = self.torus.isolated_points(V, window, largest, T)

        per_lambda = []
        for lam in window.schedule:
            total, count = self.real_window_sum(search.points, window, lam)
            per_lambda.append(LambdaEstimate(lam=lam, total=complex(total), volume=window.volume(lam), count=count))

        extrapolated, diagnostic = tail_statistics([e.estimate for e in per_lambda])
        warnings = []
        if search.undecided:
            warnings.append("IsolationUndecided")
        if diagnostic > self.convergence_tolerance * max(1.0, abs(extrapolated)):
            warnings.append("NonConvergent")
        details["undecided"] = len(search.undecided)
        return MeanValueReport(
            per_lambda=tuple(per_lambda),
            extrapolated=extrapolated,
            diagnostic=diagnostic,
            warnings=tuple(warnings),
            details=details,
        )

    def periodic_mean(self, V: SemiTrigSet, T: TrigPoly, lattice: FrequencyLattice) -> float:
        """Sum of T over the isolated points in one fundamental torus divided by its volume.

        With N = n the orbit map x ↦ Bx is periodic with period lattice B⁻¹ℤⁿ,
        whose fundamental cell has volume 1/|det B|.
        """
        lift = self.torus.build_lift(lattice)
        if not lift.periodic:
            raise DimensionUnsupported(f"Periodic closed form needs N = n, got N={lift.N}, n={lift.n}")
        B = lift.phi
        inv = np.linalg.inv(B)
        corners = np.array(list(itertools.product((0.0, 1.0), repeat=lift.n))) @ inv.T
        lo = corners.min(axis=0) - 1e-3
        hi = corners.max(axis=0) + 1e-3
        cell = WindowSpec.box(lo.tolist(), hi.tolist())
        search = self.torus.isolated_points(V, cell, 1.0, T)
        total = 0.0
        for p in search.points:
            phi = B @ np.asarray(p.x)
            # half-open cell [0, 1)ⁿ in torus coordinates
            if np.all(phi >= -1e-9) and np.all(phi < 1 - 1e-9):
                total += p.value
        return float(abs(np.linalg.det(B)) * total)
