"""Zero finder service.

n = 1: argument-principle counting on rectangles, recursive subdivision to
isolate zeros, Newton polish and small-circle multiplicities.
n ≥ 2: multistart damped Newton from scrambled Halton starts, deduplicated
with a k-d tree and checked against the n!·MV zero density.
"""

import cmath
import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import qmc

from expsum_lab.application.services.geometry import GeometryService
from expsum_lab.config import settings
from expsum_lab.domain.errors import BoundaryZero, NoConvergence, NotDeveloped
from expsum_lab.domain.value_objects.exp_sum import TWO_PI, ExpSum, ExpSystem
from expsum_lab.domain.value_objects.polytope import Polytope
from expsum_lab.domain.value_objects.results import (
    StripBox,
    StripEstimate,
    ZeroRecord,
    ZeroSearch,
)
from expsum_lab.infrastructure.cache.disk_cache import CacheService, cache_key

logger = logging.getLogger(__name__)

GOLDEN = (1 + math.sqrt(5)) / 2
MAX_CONTOUR_SAMPLES = 2**17
MAX_ANGLE_STEP = math.pi / 2
CLUSTER_SIZE = 1e-3
MIN_POLISH_DIAMETER = 1e-7
NEWTON_ITERATIONS = 60


def golden_offset(k: int) -> float:
    """k-th golden-ratio nudge in (−1/2, 1/2)."""
    return (k * GOLDEN) % 1.0 - 0.5


@dataclass(frozen=True)
class Rectangle:
    """[re_lo, re_hi] × i[im_lo, im_hi] in ℂ."""

    re_lo: float
    re_hi: float
    im_lo: float
    im_hi: float

    def __post_init__(self) -> None:
        if not (self.re_lo < self.re_hi and self.im_lo < self.im_hi):
            raise ValueError(f"Empty rectangle {self}")

    @property
    def width(self) -> float:
        return self.re_hi - self.re_lo

    @property
    def height(self) -> float:
        return self.im_hi - self.im_lo

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def center(self) -> complex:
        return complex((self.re_lo + self.re_hi) / 2, (self.im_lo + self.im_hi) / 2)

    def split(self, fraction: float = 0.5) -> tuple["Rectangle", "Rectangle"]:
        """Cut the longer side at ``fraction`` of its length."""
        if self.width >= self.height:
            cut = self.re_lo + fraction * self.width
            return (
                Rectangle(self.re_lo, cut, self.im_lo, self.im_hi),
                Rectangle(cut, self.re_hi, self.im_lo, self.im_hi),
            )
        cut = self.im_lo + fraction * self.height
        return (
            Rectangle(self.re_lo, self.re_hi, self.im_lo, cut),
            Rectangle(self.re_lo, self.re_hi, cut, self.im_hi),
        )

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (
            self.re_lo - pad <= z.real <= self.re_hi + pad
            and self.im_lo - pad <= z.imag <= self.im_hi + pad
        )

    def contour(self, samples: int) -> np.ndarray:
        """Counterclockwise boundary points, endpoint excluded."""
        perimeter = 2 * (self.width + self.height)
        corners = [
            complex(self.re_lo, self.im_lo),
            complex(self.re_hi, self.im_lo),
            complex(self.re_hi, self.im_hi),
            complex(self.re_lo, self.im_hi),
        ]
        pieces = []
        for a, b in zip(corners, corners[1:] + corners[:1], strict=True):
            k = max(8, math.ceil(samples * abs(b - a) / perimeter))
            t = np.arange(k) / k
            pieces.append(a + (b - a) * t)
        return np.concatenate(pieces)


def _abs_scale(F: ExpSum, z: np.ndarray) -> np.ndarray:
    """Σ|c_α| exp(2π α·Re z): the size |F| would have without cancellation."""
    pts = np.atleast_2d(z)
    return np.exp(TWO_PI * (pts.real @ F.spectrum.T)) @ np.abs(F.coefficients)


class ZeroFinderService:
    """Locates zeros of exponential-sum systems in a strip."""

    def __init__(
        self,
        geometry: Optional[GeometryService] = None,
        cache: Optional[CacheService] = None,
        threads: Optional[int] = None,
        residual_tolerance: Optional[float] = None,
        seed: Optional[int] = None,
    ):
        self.geometry = geometry or GeometryService()
        self.cache = cache
        self.threads = threads or settings.threads
        self.residual_tolerance = residual_tolerance or settings.residual_tolerance
        self.boundary_tolerance = settings.boundary_tolerance
        self.separation_factor = settings.separation_factor
        self.multistart_factor = settings.multistart_factor
        self.cover_tolerance = settings.cover_tolerance
        self.strip_initial_radius = settings.strip_initial_radius
        self.strip_max_radius = settings.strip_max_radius
        self.seed = settings.seed if seed is None else seed

    # ------------------------------------------------------------------
    # strip radius
    # ------------------------------------------------------------------

    def _check_developed(self, system: ExpSystem) -> list[Polytope]:
        polys = [self.geometry.newton_polytope(F) for F in system.components]
        check = self.geometry.is_developed(polys)
        if not check.developed:
            raise NotDeveloped(
                "Newton polytopes do not form a developed collection", witness=check.witness
            )
        return polys

    @staticmethod
    def dominance_bound(F: ExpSum) -> float:
        """|Re z| beyond which the extreme term of F dominates all others (n = 1)."""
        alphas = F.spectrum[:, 0]
        mags = np.abs(F.coefficients)
        bound = 0.0
        for idx in (int(np.argmax(alphas)), int(np.argmin(alphas))):
            others = np.arange(len(alphas)) != idx
            if not np.any(others):
                continue
            gap = float(np.min(np.abs(alphas[idx] - alphas[others])))
            ratio = float(np.sum(mags[others]) / mags[idx])
            if ratio > 1:
                bound = max(bound, math.log(ratio) / (TWO_PI * gap))
        return bound

    def _imag_period(self, system: ExpSystem) -> float:
        freqs = np.abs(np.concatenate([F.spectrum.ravel() for F in system.components]))
        freqs = freqs[freqs > 1e-12]
        if freqs.size == 0:
            return 1.0
        return float(min(50.0, max(1.0, 4.0 / float(np.min(freqs)))))

    def strip_radius(self, system: ExpSystem) -> StripEstimate:
        """Validated radius R: no zeros with |Re z| ∈ [R, 2R] on representative windows.

        Raises:
            NotDeveloped: the system is not developed.
            NoConvergence: R exceeds the configured maximum without validating.
        """
        self._check_developed(system)
        period = self._imag_period(system)
        bound = self.dominance_bound(system.components[0]) if system.n == 1 else None
        R = max(self.strip_initial_radius, (bound or 0.0) * 1.05)
        doublings = 0
        samples = 0
        while R <= self.strip_max_radius:
            ok, checked, min_abs = self._validate_shell(system, R, period)
            samples += checked
            if ok:
                logger.info("Strip radius R=%.4g validated after %d doublings", R, doublings)
                return StripEstimate(R, doublings, samples, min_abs, bound)
            R *= 2
            doublings += 1
            logger.info("Strip radius doubled to %.4g", R)
        raise NoConvergence(
            f"Strip radius exceeded {self.strip_max_radius} without validation",
            max_radius=self.strip_max_radius,
        )

    def _validate_shell(self, system: ExpSystem, R: float, period: float) -> tuple[bool, int, float]:
        """No zero with R ≤ |Re z| ≤ 2R over an imaginary window of length ``period``."""
        if system.n == 1:
            F = system.components[0]
            lines = np.concatenate([s * R + 1j * np.linspace(0.0, period, 512) for s in (-1.0, 1.0)])
            min_abs = float(
                np.min(np.abs(np.asarray(F.evaluate(lines[:, None]))) / _abs_scale(F, lines[:, None]))
            )
            total = 0
            for lo, hi in ((R, 2 * R), (-2 * R, -R)):
                try:
                    total += abs(self.count_zeros_rect_1d(F, Rectangle(lo, hi, 0.0, period)))
                except BoundaryZero:
                    return False, 2, min_abs
            return total == 0, 2, min_abs

        n = system.n
        count = 64 * n
        u = qmc.Halton(d=2 * n + 2, scramble=True, seed=self.seed).random(count)
        re = (2 * u[:, :n] - 1) * R
        # one coordinate per start is pushed into the shell R ≤ |Re z_j| ≤ 2R
        axis = np.arange(count) % n
        re[np.arange(count), axis] = R * (1 + u[:, 2 * n]) * np.where(u[:, 2 * n + 1] < 0.5, -1.0, 1.0)
        starts = re + 1j * period * u[:, n : 2 * n]
        with np.errstate(over="ignore", invalid="ignore"):
            values = np.max(np.abs(system.evaluate(starts)), axis=1)
        Z, res = self._newton_batch(system, starts, R * 4)
        outside = np.max(np.abs(Z.real), axis=1) > R
        found = (res <= self.residual_tolerance) & outside
        return (not bool(np.any(found))), count, float(np.nanmin(values))

    # ------------------------------------------------------------------
    # n = 1 counting
    # ------------------------------------------------------------------

    def _initial_samples(self, F: ExpSum, rect: Rectangle) -> int:
        span = float(np.max(np.abs(F.spectrum))) if not F.is_zero else 0.0
        perimeter = 2 * (rect.width + rect.height)
        return max(64, math.ceil(perimeter * 16 * (span + 1)))

    def count_zeros_rect_1d(self, F: ExpSum, rect: Rectangle) -> int:
        """Zeros of F inside ``rect`` counted with multiplicity (winding number).

        Samples double until the winding is stable on two consecutive
        refinements with every angle step below π/2.

        Raises:
            BoundaryZero: F vanishes (to the boundary tolerance) on ∂rect.
        """
        if F.n != 1:
            raise ValueError("count_zeros_rect_1d works on exponential sums in one variable")
        samples = self._initial_samples(F, rect)
        history: list[int] = []
        while samples <= MAX_CONTOUR_SAMPLES:
            pts = rect.contour(samples)
            values = np.asarray(F.evaluate(pts[:, None]))
            normalized = np.abs(values) / _abs_scale(F, pts[:, None])
            worst = int(np.argmin(normalized))
            if normalized[worst] < self.boundary_tolerance:
                raise BoundaryZero(
                    f"F vanishes on the rectangle boundary near {pts[worst]}",
                    point=complex(pts[worst]),
                    rectangle=[rect.re_lo, rect.re_hi, rect.im_lo, rect.im_hi],
                )
            steps = np.angle(np.roll(values, -1) / values)
            winding = int(round(float(np.sum(steps)) / (2 * math.pi)))
            if float(np.max(np.abs(steps))) < MAX_ANGLE_STEP:
                history.append(winding)
                if len(history) >= 3 and history[-1] == history[-2] == history[-3]:
                    return winding
            samples *= 2
        # The phase keeps jumping at one spot: a zero sits on the contour.
        jump = int(np.argmax(np.abs(steps)))
        raise BoundaryZero(
            f"Argument jumps across the boundary near {pts[jump]}",
            point=complex(pts[jump]),
            rectangle=[rect.re_lo, rect.re_hi, rect.im_lo, rect.im_hi],
        )

    def winding_on_circle(self, F: ExpSum, center: complex, radius: float) -> int:
        """Winding number of F around a small circle."""
        samples = 256
        previous: Optional[int] = None
        while samples <= MAX_CONTOUR_SAMPLES:
            t = TWO_PI * np.arange(samples) / samples
            pts = center + radius * np.exp(1j * t)
            values = np.asarray(F.evaluate(pts[:, None]))
            steps = np.angle(np.roll(values, -1) / values)
            winding = int(round(float(np.sum(steps)) / (2 * math.pi)))
            if float(np.max(np.abs(steps))) < MAX_ANGLE_STEP and winding == previous:
                return winding
            previous = winding
            samples *= 2
        raise NoConvergence(f"Winding around {center} did not stabilize")

    def _count_split(self, F: ExpSum, rect: Rectangle) -> list[tuple[Rectangle, int]]:
        """Split a rectangle, nudging the cut by golden-ratio offsets off zeros."""
        for attempt in range(12):
            fraction = 0.5 + 0.4 * golden_offset(attempt) if attempt else 0.5
            halves = rect.split(fraction)
            try:
                return [(h, self.count_zeros_rect_1d(F, h)) for h in halves]
            except BoundaryZero as e:
                logger.info(
                    "BoundaryZero on split of %s (%s); nudging cut to fraction %.6f",
                    rect,
                    e.details.get("point"),
                    0.5 + 0.4 * golden_offset(attempt + 1),
                )
        raise NoConvergence(f"Could not split {rect} away from its zeros")

    def _newton_1d(self, F: ExpSum, dF: ExpSum, start: complex, order: int, limit: float) -> complex:
        """Newton with step order·F/F′ from ``start``; stops once it leaves the ``limit`` disk."""
        z = start
        for _ in range(NEWTON_ITERATIONS):
            value = complex(F.evaluate([z]))
            slope = complex(dF.evaluate([z]))
            if slope == 0 or not cmath.isfinite(value / slope):
                break
            step = order * value / slope
            z -= step
            if abs(z - start) > limit:
                break
            if abs(step) <= 1e-15 * (1 + abs(z)):
                break
        return z

    def _polish_1d(self, F: ExpSum, rect: Rectangle, count: int) -> Optional[ZeroRecord]:
        """Polished zero of ``rect``, or None when Newton does not converge inside it.

        Starts are the center and the smallest |F| on a coarse grid. A zero is
        accepted only inside the rectangle and with residual ≤ τ_res.
        """
        dF = F.derivative(0)
        grid_re = np.linspace(rect.re_lo, rect.re_hi, 9)
        grid_im = np.linspace(rect.im_lo, rect.im_hi, 9)
        grid = (grid_re[:, None] + 1j * grid_im[None, :]).ravel()
        best = complex(grid[int(np.argmin(np.abs(np.asarray(F.evaluate(grid[:, None])))))])
        pad = 1e-9 * rect.diameter
        for start in (rect.center, best):
            z = self._newton_1d(F, dF, start, count, 2 * rect.diameter)
            if not rect.contains(z, pad=pad):
                continue
            residual = abs(complex(F.evaluate([z])))
            if residual > self.residual_tolerance:
                continue
            multiplicity = count
            if count > 1:
                try:
                    multiplicity = max(1, self.winding_on_circle(F, z, rect.diameter))
                except NoConvergence:
                    logger.warning("Multiplicity at %s falls back to the rectangle count %d", z, count)
            slope_abs = abs(complex(dF.evaluate([z])))
            return ZeroRecord(
                z=(z,),
                multiplicity=multiplicity,
                residual=residual,
                jacobian_condition=1.0 / max(slope_abs, 1e-300),
            )
        return None

    def _isolate(self, F: ExpSum, rect: Rectangle) -> list[ZeroRecord]:
        stack = [(rect, self.count_zeros_rect_1d(F, rect))]
        out: list[ZeroRecord] = []
        while stack:
            current, count = stack.pop()
            if count <= 0:
                if count < 0:
                    logger.warning("Negative winding %d on %s", count, current)
                continue
            if count == 1 or current.diameter < CLUSTER_SIZE:
                record = self._polish_1d(F, current, count)
                if record is not None:
                    out.append(record)
                    continue
                if current.diameter < MIN_POLISH_DIAMETER:
                    raise NoConvergence(
                        f"Newton did not reach residual {self.residual_tolerance:g} near {current.center}",
                        rectangle=[current.re_lo, current.re_hi, current.im_lo, current.im_hi],
                        count=count,
                    )
                logger.debug("Newton left %s; subdividing", current)
            children = self._count_split(F, current)
            if sum(c for _, c in children) != count:
                logger.warning("Split of %s changed the count from %d", current, count)
            stack.extend(children)
        return out

    def _safe_cuts(self, F: ExpSum, R: float, lo: float, hi: float, tiles: int) -> list[float]:
        """Tile boundaries on Im z that avoid zeros of F."""
        cuts = [lo + (hi - lo) * k / tiles for k in range(tiles + 1)]
        height = (hi - lo) / tiles
        out = []
        for k, cut in enumerate(cuts):
            for attempt in range(12):
                line = np.linspace(-R, R, 512) + 1j * cut
                normalized = np.abs(np.asarray(F.evaluate(line[:, None]))) / _abs_scale(F, line[:, None])
                if float(np.min(normalized)) > 1e-6:
                    break
                nudge = 1e-4 * height * (abs(golden_offset(attempt + 1)) + 0.1)
                # outer edges move outward, inner cuts move up
                cut = cut - nudge if k == 0 else cut + nudge
                logger.info("Tile edge moved to Im=%.9f (golden-ratio nudge)", cut)
            out.append(cut)
        return out

    def _locate_1d(self, F: ExpSum, box: StripBox) -> list[ZeroRecord]:
        lo, hi = box.lower[0], box.upper[0]
        tiles = max(1, min(self.threads, math.ceil((hi - lo) / 4)))
        cuts = self._safe_cuts(F, box.R, lo, hi, tiles)
        rects = [Rectangle(-box.R, box.R, a, b) for a, b in zip(cuts, cuts[1:], strict=False)]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            parts = list(pool.map(lambda r: self._isolate(F, r), rects))
        return [rec for part in parts for rec in part]

    # ------------------------------------------------------------------
    # n ≥ 2 multistart Newton
    # ------------------------------------------------------------------

    def _newton_batch(
        self, system: ExpSystem, starts: np.ndarray, escape: float
    ) -> tuple[np.ndarray, np.ndarray]:
        """Damped Newton on a batch of starting points; returns points and residuals."""
        Z = np.array(starts, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            res = np.max(np.abs(system.evaluate(Z)), axis=1)
            res = np.where(np.isfinite(res), res, np.inf)
            active = np.isfinite(res)
            for _ in range(NEWTON_ITERATIONS):
                idx = np.nonzero(active & (res > self.residual_tolerance * 1e-2))[0]
                if idx.size == 0:
                    break
                Zi = Z[idx]
                step = np.einsum(
                    "kij,kj->ki", np.linalg.pinv(system.jacobian(Zi)), system.evaluate(Zi)
                )
                t = np.ones(idx.size)
                trial = Zi - step
                trial_res = np.max(np.abs(system.evaluate(trial)), axis=1)
                for _ in range(10):
                    worse = ~(trial_res < res[idx])
                    if not np.any(worse):
                        break
                    t[worse] /= 2
                    trial[worse] = Zi[worse] - t[worse, None] * step[worse]
                    trial_res[worse] = np.max(np.abs(system.evaluate(trial[worse])), axis=1)
                improved = trial_res < res[idx]
                Z[idx[improved]] = trial[improved]
                res[idx[improved]] = trial_res[improved]
                active[idx[~improved]] = False
                escaped = np.max(np.abs(Z[idx].real), axis=1) > escape
                active[idx[escaped]] = False
        return Z, res

    def _dedup(self, Z: np.ndarray, res: np.ndarray, separation: float) -> list[int]:
        order = sorted(range(len(Z)), key=lambda i: (res[i], tuple(np.round(Z[i].imag, 12))))
        coords = np.hstack([Z.real, Z.imag])
        tree = cKDTree(coords)
        removed = np.zeros(len(Z), dtype=bool)
        keep = []
        for i in order:
            if removed[i]:
                continue
            keep.append(i)
            for j in tree.query_ball_point(coords[i], separation):
                removed[j] = True
        return keep

    def _locate_multi(self, system: ExpSystem, box: StripBox, expected: float) -> tuple[list[ZeroRecord], int]:
        n = system.n
        count = int(min(2_000_000, max(256, self.multistart_factor * max(1.0, expected))))
        pad = 0.05 * (np.asarray(box.upper) - np.asarray(box.lower))
        sampler = qmc.Halton(d=2 * n, scramble=True, seed=self.seed)
        u = sampler.random(count)
        re = (2 * u[:, :n] - 1) * box.R
        im = (np.asarray(box.lower) - pad) + u[:, n:] * (np.asarray(box.upper) - np.asarray(box.lower) + 2 * pad)
        starts = re + 1j * im
        chunks = np.array_split(starts, max(1, self.threads))
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            results = list(pool.map(lambda s: self._newton_batch(system, s, 4 * box.R), chunks))
        Z = np.vstack([r[0] for r in results])
        res = np.concatenate([r[1] for r in results])

        slack = 1e-9 * max(1.0, float(np.max(np.abs(box.upper))))
        ok = (res <= self.residual_tolerance) & (np.max(np.abs(Z.real), axis=1) <= box.R * (1 + 1e-9))
        ok &= np.all(Z.imag >= np.asarray(box.lower) - slack, axis=1)
        ok &= np.all(Z.imag <= np.asarray(box.upper) + slack, axis=1)
        Z, res = Z[ok], res[ok]
        if len(Z) == 0:
            return [], count
        diameter = math.sqrt(n * (2 * box.R) ** 2 + float(np.sum(np.subtract(box.upper, box.lower) ** 2)))
        keep = self._dedup(Z, res, self.separation_factor * diameter)
        records = []
        for i in keep:
            jac = system.jacobian(Z[i])
            records.append(
                ZeroRecord(
                    z=tuple(complex(c) for c in Z[i]),
                    multiplicity=1,
                    residual=float(res[i]),
                    jacobian_condition=float(np.linalg.cond(jac)),
                    multiplicity_unverified=True,
                )
            )
        return records, count

    # ------------------------------------------------------------------
    # public entry
    # ------------------------------------------------------------------

    def expected_count(self, system: ExpSystem, box: StripBox) -> float:
        """n!·MV(Δ₁,…,Δ_n) times the imaginary volume of the box."""
        polys = [self.geometry.newton_polytope(F) for F in system.components]
        return self.geometry.normalized_mixed_volume(polys) * box.im_volume

    def _cache_payload(self, system: ExpSystem, box: StripBox) -> dict[str, Any]:
        return {
            "system": system.to_dict(),
            "box": box.to_dict(),
            "tolerances": [self.residual_tolerance, self.separation_factor, self.boundary_tolerance],
            "multistart_factor": self.multistart_factor,
            "seed": self.seed,
        }

    def locate_zeros(self, system: ExpSystem, box: StripBox) -> ZeroSearch:
        """All zeros with |Re z| ≤ R and Im z in the box window.

        n ≥ 2 results carry an ``IncompleteCover`` warning when the count
        deviates from n!·MV·Vol by more than the cover tolerance.
        """
        if box.n != system.n:
            raise ValueError(f"Box is {box.n}-dimensional, system has {system.n} variables")
        key = cache_key("zeros", self._cache_payload(system, box)) if self.cache else None
        expected = self.expected_count(system, box)
        if self.cache is not None and key is not None:
            cached = self.cache.get(key)
            if cached is not None:
                return ZeroSearch(
                    box=box,
                    zeros=tuple(_record_from_dict(d) for d in cached["zeros"]),
                    expected_count=expected,
                    warnings=tuple(cached["warnings"]),
                    starts=int(cached["starts"]),
                    from_cache=True,
                )

        warnings: list[str] = []
        if system.n == 1:
            records = self._locate_1d(system.components[0], box)
            starts = 0
        else:
            records, starts = self._locate_multi(system, box, expected)
            found = len(records)
            if expected > 0 and abs(found - expected) / expected > self.cover_tolerance:
                warnings.append("IncompleteCover")
                logger.warning(
                    "IncompleteCover: %d zeros found, %.1f expected from n!·MV", found, expected
                )
        records.sort(key=lambda r: tuple(c.imag for c in r.z) + tuple(c.real for c in r.z))
        search = ZeroSearch(
            box=box,
            zeros=tuple(records),
            expected_count=expected,
            warnings=tuple(warnings),
            starts=starts,
        )
        if self.cache is not None and key is not None:
            self.cache.set(
                key,
                {
                    "zeros": [r.to_dict() for r in records],
                    "warnings": warnings,
                    "starts": starts,
                },
            )
        logger.info("Located %d zeros (%d with multiplicity)", len(records), search.count)
        return search


def _record_from_dict(data: dict[str, Any]) -> ZeroRecord:
    return ZeroRecord(
        z=tuple(complex(re, im) for re, im in data["z"]),
        multiplicity=int(data["multiplicity"]),
        residual=float(data["residual"]),
        jacobian_condition=float(data["jacobian_condition"]),
        multiplicity_unverified=bool(data["multiplicity_unverified"]),
    )


def strip_box_for(R: float, lower: Sequence[float], upper: Sequence[float]) -> StripBox:
    return StripBox(R=R, lower=tuple(float(x) for x in lower), upper=tuple(float(x) for x in upper))
