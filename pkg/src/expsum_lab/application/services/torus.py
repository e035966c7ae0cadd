"""Torus service.

Lifts quasiperiodic data in x ∈ ℝⁿ to the torus 𝕋^N through the orbit
x ↦ Φ(x) = (A₁·x, …, A_N·x), averages functions along the orbit, enumerates
isolated points of semitrigonometric sets and integrates T̃ over level curves
transversal to the orbit.
"""

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Literal, Optional

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from expsum_lab.application.services.lattice import LatticeService
from expsum_lab.config import settings
from expsum_lab.domain.errors import (
    DimensionUnsupported,
    IsolationUndecided,
    LatticeMismatch,
    OrbitDegenerate,
    TracingStalled,
)
from expsum_lab.domain.value_objects.exp_sum import TrigPoly, TrigTerm
from expsum_lab.domain.value_objects.frequency import Frequency, FrequencyLattice
from expsum_lab.domain.value_objects.torus import (
    CurveSample,
    IsolatedPoint,
    IsolatedPointSearch,
    OrbitLift,
    SemiTrigClause,
    SemiTrigSet,
    TransversalVolume,
    WeylAverage,
)
from expsum_lab.domain.value_objects.window import WindowSpec

logger = logging.getLogger(__name__)

GAUSS_ORDER = 8
QUADRATURE_CHUNK = 200_000
NEWTON_ITERATIONS = 40
BISECTION_ITERATIONS = 64
ISOLATION_SAMPLES = 64
TANGENCY_THRESHOLD = 1 - 1e-8
MAX_CURVE_LENGTH = 1e3
SEED_OFFSET = 1e-3 * (math.sqrt(5) - 1) / 2

Isolation = Literal["isolated", "not_isolated", "undecided"]


def _gauss_panels(lo: float, hi: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss–Legendre nodes and weights on [lo, hi]."""
    x, w = np.polynomial.legendre.leggauss(GAUSS_ORDER)
    edges = np.linspace(lo, hi, panels + 1)
    half = np.diff(edges) / 2
    mid = edges[:-1] + half
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def _wrap(phi: np.ndarray) -> np.ndarray:
    """Reduce mod 1 into [0, 1)."""
    m = np.mod(phi, 1.0)
    return np.where(m >= 1.0, 0.0, m)


def _dedup_indices(points: np.ndarray, radius: float) -> list[int]:
    """First index of every cluster of points closer than ``radius``."""
    if len(points) == 0:
        return []
    tree = cKDTree(points)
    removed = np.zeros(len(points), dtype=bool)
    keep = []
    for i in range(len(points)):
        if removed[i]:
            continue
        keep.append(i)
        removed[tree.query_ball_point(points[i], radius)] = True
    return keep


def _dedup_points(points: np.ndarray, radius: float) -> np.ndarray:
    return points[_dedup_indices(points, radius)]


def _bisect(fn: Callable[[np.ndarray], np.ndarray], a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched bisection on brackets [a, b] with fn(a)·fn(b) < 0."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    if len(a) == 0:
        return a
    fa = fn(a)
    for _ in range(BISECTION_ITERATIONS):
        mid = 0.5 * (a + b)
        fm = fn(mid)
        left = fa * fm <= 0
        b = np.where(left, mid, b)
        a = np.where(left, a, mid)
        fa = np.where(left, fa, fm)
        if float(np.max(b - a)) <= 1e-15 * (1 + float(np.max(np.abs(a)))):
            break
    return 0.5 * (a + b)


def _newton(
    F: Callable[[np.ndarray], np.ndarray],
    J: Callable[[np.ndarray], np.ndarray],
    X: np.ndarray,
) -> np.ndarray:
    """Batched Gauss–Newton with pseudo-inverses; F maps (P, n) → (P, r)."""
    X = np.array(X, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(NEWTON_ITERATIONS):
            step = np.einsum("kij,kj->ki", np.linalg.pinv(J(X)), F(X))
            step = np.where(np.isfinite(step), step, 0.0)
            X -= step
            if float(np.max(np.abs(step), initial=0.0)) < 1e-14 * (1 + float(np.max(np.abs(X), initial=0.0))):
                break
    return X


class TorusService:
    """Orbit lifts and torus-side numerics."""

    def __init__(
        self,
        lattice_service: Optional[LatticeService] = None,
        threads: Optional[int] = None,
        isolation_radius: Optional[float] = None,
        curve_max_step: Optional[float] = None,
    ):
        self.lattice_service = lattice_service or LatticeService()
        self.threads = threads or settings.threads
        self.isolation_radius = isolation_radius or settings.isolation_radius
        self.curve_max_step = curve_max_step or settings.curve_max_step

    # ------------------------------------------------------------------
    # lifts
    # ------------------------------------------------------------------

    def build_lift(
        self,
        lattice: FrequencyLattice,
        mode: Literal["real", "complex"] = "real",
        R: Optional[float] = None,
        base_point: Optional[Sequence[float]] = None,
    ) -> OrbitLift:
        """Orbit map of the lattice.

        Real mode: Φ(x) = (A₁·x, …, A_N·x) on 𝕋^N.
        Complex mode: (Re z + R)/(2R) on the first n circles and Φ(Im z) on the
        remaining N, on 𝕋^{n+N}.

        Raises:
            OrbitDegenerate: the frequencies span less than ℝⁿ.
        """
        B = lattice.basis_matrix
        n, N = lattice.n, lattice.N
        if N == 0 or np.linalg.matrix_rank(B) < n:
            raise OrbitDegenerate(
                f"Orbit map has rank {np.linalg.matrix_rank(B) if N else 0} < n={n}",
                rank=int(np.linalg.matrix_rank(B)) if N else 0,
            )
        if mode == "real":
            phi = B
            offset = np.zeros(N)
        elif mode == "complex":
            if R is None or R <= 0:
                raise ValueError("Complex lifts need a positive strip radius R")
            phi = np.zeros((n + N, 2 * n))
            phi[:n, :n] = np.eye(n) / (2 * R)
            phi[n:, n:] = B
            offset = np.concatenate([np.full(n, 0.5), np.zeros(N)])
        else:
            raise ValueError(f"Unknown lift mode {mode!r}")

        relation = self.lattice_service.integer_relation(lattice)
        dim = phi.shape[0]
        base = tuple(float(x) for x in (base_point if base_point is not None else np.zeros(dim)))
        if len(base) != dim:
            raise ValueError(f"Base point must have {dim} coordinates")
        lift = OrbitLift(
            mode=mode,
            n=n,
            N=N,
            phi=phi,
            base_point=base,
            offset=tuple(float(x) for x in offset),
            dense=relation is None,
            relation=relation,
            R=R,
        )
        logger.info(
            "Orbit lift (%s): torus dimension %d, orbit dimension %d, dense=%s",
            mode,
            lift.torus_dimension,
            lift.orbit_dimension,
            lift.dense,
        )
        return lift

    def lift_trig(self, T: TrigPoly, lattice: FrequencyLattice) -> TrigPoly:
        """T̃ on 𝕋^N with T(x) = T̃(Φ(x)).

        Raises:
            LatticeMismatch: a frequency of T is not in the lattice.
        """
        terms = []
        for term in T.terms:
            m = self.lattice_service.coords_of(term.alpha, lattice)
            if m is None:
                raise LatticeMismatch(f"Frequency {term.alpha} is not in the lattice")
            terms.append(TrigTerm(alpha=Frequency.of(*m), c=term.c, d=term.d))
        return TrigPoly(tuple(terms))

    def lift_set(self, V: SemiTrigSet, lattice: FrequencyLattice) -> SemiTrigSet:
        return SemiTrigSet(
            tuple(
                SemiTrigClause(
                    equations=tuple(self.lift_trig(e, lattice) for e in c.equations),
                    inequalities=tuple(self.lift_trig(p, lattice) for p in c.inequalities),
                )
                for c in V.clauses
            )
        )

    # ------------------------------------------------------------------
    # Weyl averages
    # ------------------------------------------------------------------

    def _tensor_integral(
        self,
        g: Callable[[np.ndarray], np.ndarray],
        lo: np.ndarray,
        hi: np.ndarray,
        panels: Sequence[int],
        mask: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ) -> float:
        axes = [_gauss_panels(a, b, p) for a, b, p in zip(lo, hi, panels, strict=True)]
        if len(axes) > 1:
            rest = np.stack([m.ravel() for m in np.meshgrid(*(a[0] for a in axes[1:]), indexing="ij")], axis=1)
            rest_w = np.prod(np.stack(np.meshgrid(*(a[1] for a in axes[1:]), indexing="ij")), axis=0).ravel()
        else:
            rest = np.zeros((1, 0))
            rest_w = np.ones(1)
        first, first_w = axes[0]
        per_chunk = max(1, QUADRATURE_CHUNK // len(rest_w))

        def part(start: int) -> float:
            x0 = first[start : start + per_chunk]
            w0 = first_w[start : start + per_chunk]
            pts = np.hstack([np.repeat(x0, len(rest_w))[:, None], np.tile(rest, (len(x0), 1))])
            vals = g(pts)
            if mask is not None:
                vals = np.where(mask(pts), vals, 0.0)
            return float(np.sum(np.outer(w0, rest_w).ravel() * vals))

        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return math.fsum(pool.map(part, range(0, len(first), per_chunk)))

    def _polar_integral(
        self, g: Callable[[np.ndarray], np.ndarray], center: np.ndarray, rho: float, fmax: float
    ) -> float:
        r, w = _gauss_panels(0.0, rho, max(1, math.ceil(2 * fmax * rho)))
        M = 64 + 8 * math.ceil(math.pi * fmax * rho)
        theta = 2 * math.pi * np.arange(M) / M
        circle = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        per_chunk = max(1, QUADRATURE_CHUNK // M)

        def part(start: int) -> float:
            rs = r[start : start + per_chunk]
            pts = center + (rs[:, None, None] * circle[None, :, :]).reshape(-1, 2)
            vals = g(pts).reshape(len(rs), M)
            return float(np.sum(w[start : start + per_chunk] * rs * vals.mean(axis=1)) * 2 * math.pi)

        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return math.fsum(pool.map(part, range(0, len(r), per_chunk)))

    def orbit_average(self, f: TrigPoly, lift: OrbitLift, window: WindowSpec, lam: float) -> float:
        """(1/Vol(λΩ)) ∫_{λΩ} f(φ₀ + Φ(x)) dx by composite Gauss–Legendre quadrature."""
        if lift.mode != "real":
            raise ValueError("Orbit averages are taken along real lifts")
        if f.n != lift.torus_dimension:
            raise LatticeMismatch(f"f lives on 𝕋^{f.n}, the lift on 𝕋^{lift.torus_dimension}")
        if window.n != lift.n:
            raise ValueError(f"Window is {window.n}-dimensional, orbit is {lift.n}-dimensional")
        if not lift.dense:
            logger.warning("Orbit is not dense (relation %s); averages need not reach the torus integral", lift.relation)
        if not f.terms:
            return 0.0
        ms = np.array([t.alpha.vector for t in f.terms])
        fmax = max(float(np.max(np.abs(ms @ lift.phi))), 1e-9)

        def g(x: np.ndarray) -> np.ndarray:
            return np.asarray(f.evaluate(lift.angles(x)))

        lo, hi = window.bounds(lam)
        if window.shape == "ball" and window.n == 2:
            integral = self._polar_integral(g, lam * np.asarray(window.center), lam * window.half_extents[0], fmax)
        else:
            mask = None
            if window.shape == "ball" and window.n > 2:
                logger.warning("Ball windows in dimension %d use a masked tensor rule", window.n)

                def mask(x: np.ndarray) -> np.ndarray:
                    return window.contains(x, lam)

            panels = [max(1, math.ceil(2 * fmax * (b - a))) for a, b in zip(lo, hi, strict=True)]
            integral = self._tensor_integral(g, lo, hi, panels, mask)
        return integral / window.volume(lam)

    def weyl_averages(self, f: TrigPoly, lift: OrbitLift, window: WindowSpec) -> tuple[WeylAverage, ...]:
        """Orbit averages over the schedule of ``window`` against the torus integral of f."""
        exact = f.constant_term
        out = tuple(
            WeylAverage(lam=lam, average=self.orbit_average(f, lift, window, lam), exact=exact)
            for lam in window.schedule
        )
        logger.info("Weyl averages: final |avg − exact| = %.3g", out[-1].abs_err)
        return out

    # ------------------------------------------------------------------
    # isolated points
    # ------------------------------------------------------------------

    @staticmethod
    def _roots_1d(h: TrigPoly, lo: float, hi: float) -> list[float]:
        """Sign-change and tangential roots of h on the closed interval [lo, hi].

        The scan grid runs one cell past both ends so roots on lo or hi are
        bracketed like interior ones; they are clipped back onto [lo, hi].
        """
        fmax = max(h.max_frequency, 1e-9)
        cells = max(1, math.ceil((hi - lo) * 20 * fmax))
        step = (hi - lo) / cells if hi > lo else 1.0 / (20 * fmax)
        grid = lo + step * np.arange(-1, cells + 2)
        scale = h.abs_scale()

        def f(x: np.ndarray) -> np.ndarray:
            return np.asarray(h.evaluate(x[:, None]))

        def df(x: np.ndarray) -> np.ndarray:
            return h.gradient(x[:, None])[:, 0]

        v = f(grid)
        found = [grid[np.abs(v) <= 1e-14 * scale]]
        i = np.nonzero(v[:-1] * v[1:] < 0)[0]
        found.append(_bisect(f, grid[i], grid[i + 1]))
        dv = df(grid)
        i = np.nonzero(dv[:-1] * dv[1:] < 0)[0]
        extrema = _bisect(df, grid[i], grid[i + 1])
        found.append(extrema[np.abs(f(extrema)) <= 1e-10 * scale])

        roots = np.sort(np.concatenate(found))
        if len(roots) == 0:
            return []
        keep = np.concatenate([[True], np.diff(roots) > 1e-9 * np.maximum(1.0, np.abs(roots[1:]))])
        roots = roots[keep]
        slack = 1e-9 * step
        roots = roots[(roots >= lo - slack) & (roots <= hi + slack)]
        return [float(x) for x in np.clip(roots, lo, hi)]

    @staticmethod
    def _accept(clause: SemiTrigClause, pts: np.ndarray) -> np.ndarray:
        """Points satisfying every equation (to tolerance) and every inequality."""
        if len(pts) == 0:
            return pts
        ok = np.ones(len(pts), dtype=bool)
        for e in clause.equations:
            ok &= np.abs(np.asarray(e.evaluate(pts))) <= 1e-8 * e.abs_scale()
        for p in clause.inequalities:
            ok &= np.asarray(p.evaluate(pts)) > 1e-12 * p.abs_scale()
        return pts[ok]

    def _clause_points_2d(self, clause: SemiTrigClause, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        fmax = max(max(p.max_frequency for p in clause.equations), 1e-9)
        step = 1.0 / (8 * fmax)
        axes = [np.linspace(a, b, max(2, math.ceil((b - a) / step) + 1)) for a, b in zip(lo, hi, strict=True)]
        seeds = np.stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")], axis=1)
        eqs = clause.equations
        if len(eqs) == 1:
            # isolated points of a single curve equation are its zero extrema
            h = eqs[0]
            X = _newton(h.gradient, h.hessian, seeds)
            resid = np.linalg.norm(h.gradient(X), axis=1)
            scale = 2 * math.pi * fmax * h.abs_scale()
        else:
            def F(X: np.ndarray) -> np.ndarray:
                return np.stack([np.asarray(e.evaluate(X)) for e in eqs], axis=1)

            def J(X: np.ndarray) -> np.ndarray:
                return np.stack([e.gradient(X) for e in eqs], axis=1)

            X = _newton(F, J, seeds)
            resid = np.max(np.abs(F(X)), axis=1)
            scale = max(e.abs_scale() for e in eqs)
        ok = np.isfinite(resid) & (resid <= 1e-9 * scale)
        return _dedup_points(X[ok], 1e-7 * (1 + float(np.max(np.abs(hi - lo)))))

    def _isolation(self, V: SemiTrigSet, x: np.ndarray) -> Isolation:
        """Local sign analysis on a τ_iso-ball around x."""
        r = self.isolation_radius
        if V.n == 1:
            probes = x[0] + r * np.array([-1.0, -0.5, -0.25, 0.25, 0.5, 1.0])[:, None]
        else:
            theta = 2 * math.pi * np.arange(ISOLATION_SAMPLES) / ISOLATION_SAMPLES
            probes = x + r * np.stack([np.cos(theta), np.sin(theta)], axis=1)
        undecided = False
        for clause in V.clauses:
            ok = clause.satisfies_inequalities(probes)
            if not clause.equations:
                if np.any(ok):
                    return "not_isolated"
                continue
            if V.n == 1:
                continue
            if len(clause.equations) >= 2:
                at_x = [abs(float(e.evaluate(x))) <= 1e-8 * e.abs_scale() for e in clause.equations]
                if all(at_x):
                    sv = np.linalg.svd(np.vstack([e.gradient(x) for e in clause.equations]), compute_uv=False)
                    if sv[-1] <= 1e-8 * sv[0]:
                        undecided = True
                continue
            h = clause.equations[0]
            hv = np.asarray(h.evaluate(probes))
            crossing = (hv * np.roll(hv, -1) < 0) & (ok | np.roll(ok, -1))
            if np.any(crossing):
                return "not_isolated"
            if float(np.min(np.abs(hv))) <= 1e-12 * h.abs_scale():
                undecided = True
        return "undecided" if undecided else "isolated"

    def isolated_points(
        self,
        V: SemiTrigSet,
        window: WindowSpec,
        lam: float,
        T: Optional[TrigPoly] = None,
        strict: bool = False,
    ) -> IsolatedPointSearch:
        """Isolated points of V in the closed window λΩ, with T-values (1 when T is None).

        Points whose isolation cannot be decided are returned separately.

        Raises:
            DimensionUnsupported: n > 2.
            IsolationUndecided: ``strict`` and some point failed the local test.
        """
        if V.n > 2:
            raise DimensionUnsupported(f"Isolated-point enumeration supports n ≤ 2, got n={V.n}")
        if window.n != V.n:
            raise ValueError(f"Window is {window.n}-dimensional, V lives in ℝ^{V.n}")
        lo, hi = window.bounds(lam)

        found: list[np.ndarray] = []
        owners: list[np.ndarray] = []
        for idx, clause in enumerate(V.clauses):
            if not clause.equations:
                continue
            if V.n == 1:
                roots = self._roots_1d(clause.equations[0], float(lo[0]), float(hi[0]))
                pts = np.array(roots, dtype=float).reshape(-1, 1)
            else:
                pts = self._clause_points_2d(clause, lo, hi)
            pts = self._accept(clause, pts)
            if len(pts):
                pts = pts[window.contains(pts, lam)]
            found.append(pts)
            owners.append(np.full(len(pts), idx))
        if found:
            candidates = np.concatenate(found).reshape(-1, V.n)
            clause_of = np.concatenate(owners)
        else:
            candidates = np.zeros((0, V.n))
            clause_of = np.zeros(0, dtype=int)
        keep = _dedup_indices(candidates, 1e-7 * (1 + float(np.max(np.abs(np.concatenate([lo, hi]))))))
        candidates, clause_of = candidates[keep], clause_of[keep]
        values = np.asarray(T.evaluate(candidates)) if T is not None and len(candidates) else np.ones(len(candidates))

        points: list[IsolatedPoint] = []
        undecided: list[IsolatedPoint] = []
        for x, value, idx in zip(candidates, values, clause_of, strict=True):
            point = IsolatedPoint(x=tuple(float(c) for c in x), value=float(value), clause=int(idx))
            status = self._isolation(V, x)
            if status == "isolated":
                points.append(point)
            elif status == "undecided":
                undecided.append(point)
        if undecided:
            if strict:
                raise IsolationUndecided(
                    f"Isolation undecided for {len(undecided)} points",
                    points=[list(p.x) for p in undecided],
                )
            logger.warning("IsolationUndecided for %d points; excluded from sums", len(undecided))
        points.sort(key=lambda p: p.x)
        return IsolatedPointSearch(points=tuple(points), undecided=tuple(undecided))

    # ------------------------------------------------------------------
    # transversal volume of level curves
    # ------------------------------------------------------------------

    def _curve_seeds(self, eqs: Sequence[TrigPoly], N: int) -> np.ndarray:
        fmax = max(max(e.max_frequency for e in eqs), 1.0)
        if N == 2:
            h = eqs[0]
            G = max(64, 16 * math.ceil(fmax))
            fine = np.arange(G + 1) / G + SEED_OFFSET
            seeds = []
            for axis in (0, 1):
                for c in np.arange(G) / G + SEED_OFFSET:
                    pts = np.empty((G + 1, 2))
                    pts[:, axis] = fine
                    pts[:, 1 - axis] = c
                    v = np.asarray(h.evaluate(pts))
                    for i in np.nonzero(v[:-1] * v[1:] < 0)[0]:
                        def along(t: float, axis: int = axis, c: float = c) -> float:
                            p = np.empty(2)
                            p[axis] = t
                            p[1 - axis] = c
                            return float(h.evaluate(p))

                        t = brentq(along, fine[i], fine[i + 1], xtol=1e-15)
                        p = np.empty(2)
                        p[axis] = t
                        p[1 - axis] = c
                        seeds.append(p)
            return np.array(seeds).reshape(-1, 2)

        G = max(16, 4 * math.ceil(fmax))
        axis = np.arange(G) / G + SEED_OFFSET
        grid = np.stack([m.ravel() for m in np.meshgrid(axis, axis, axis, indexing="ij")], axis=1)

        def F(X: np.ndarray) -> np.ndarray:
            return np.stack([np.asarray(e.evaluate(X)) for e in eqs], axis=1)

        def J(X: np.ndarray) -> np.ndarray:
            return np.stack([e.gradient(X) for e in eqs], axis=1)

        X = _newton(F, J, grid)
        scale = max(e.abs_scale() for e in eqs)
        ok = np.max(np.abs(F(X)), axis=1) <= 1e-10 * scale
        return _dedup_points(_wrap(X[ok]), self.curve_max_step)

    @staticmethod
    def _tangent(eqs: Sequence[TrigPoly], p: np.ndarray, scale: float) -> np.ndarray:
        grads = np.vstack([e.gradient(p) for e in eqs])
        if len(eqs) == 1:
            t = np.array([-grads[0, 1], grads[0, 0]])
        else:
            t = np.cross(grads[0], grads[1])
        norm = float(np.linalg.norm(t))
        if norm <= 1e-8 * scale:
            raise TracingStalled(f"Singular point of the level set near {np.round(_wrap(p), 6).tolist()}")
        return t / norm

    @staticmethod
    def _correct(eqs: Sequence[TrigPoly], q: np.ndarray, scale: float) -> Optional[np.ndarray]:
        """Project q back onto the level set."""
        for _ in range(10):
            F = np.array([float(e.evaluate(q)) for e in eqs])
            if float(np.max(np.abs(F))) <= 1e-12 * scale:
                return q
            J = np.vstack([e.gradient(q) for e in eqs])
            q = q - np.linalg.pinv(J) @ F
        return None

    def _trace(self, eqs: Sequence[TrigPoly], p0: np.ndarray) -> np.ndarray:
        """Closed level curve through p0, unwrapped; last point ≡ p0 mod ℤ^N."""
        scale = max(e.abs_scale() for e in eqs) * 2 * math.pi * max(max(e.max_frequency for e in eqs), 1.0)
        res_scale = max(e.abs_scale() for e in eqs)
        p = np.asarray(p0, dtype=float)
        t = self._tangent(eqs, p, scale)
        path = [p.copy()]
        length = 0.0
        s = self.curve_max_step
        while True:
            q = self._correct(eqs, p + s * t, res_scale)
            t_q = self._tangent(eqs, q, scale) if q is not None else None
            if t_q is not None and float(t_q @ t) < 0:
                t_q = -t_q
            if q is None or t_q is None or np.linalg.norm(q - p) > 2 * s or float(t_q @ t) < 0.5:
                s /= 2
                if s < 1e-9 * self.curve_max_step:
                    raise TracingStalled(f"Step size collapsed near {np.round(_wrap(p), 6).tolist()}")
                continue
            length += float(np.linalg.norm(q - p))
            path.append(q)
            p, t = q, t_q
            gap = q - p0
            gap -= np.round(gap)
            if length > 4 * self.curve_max_step and float(np.linalg.norm(gap)) <= 1.5 * s:
                path.append(q - gap)
                return np.array(path)
            if length > MAX_CURVE_LENGTH:
                raise TracingStalled(f"Level curve did not close within length {MAX_CURVE_LENGTH}")
            s = min(self.curve_max_step, 1.5 * s)

    @staticmethod
    def _integrand(
        path: np.ndarray, clause: SemiTrigClause, lift: OrbitLift, T: Optional[TrigPoly]
    ) -> tuple[np.ndarray, np.ndarray]:
        """T̃·|det[t, A¹…Aⁿ]| on the path (0 where excluded) and the exclusion mask."""
        grads = [e.gradient(path) for e in clause.equations]
        if len(grads) == 1:
            t = np.stack([-grads[0][:, 1], grads[0][:, 0]], axis=1)
        else:
            t = np.cross(grads[0], grads[1])
        t = t / np.linalg.norm(t, axis=1)[:, None]
        A = lift.directions
        frame = np.concatenate([t[:, :, None], np.broadcast_to(A, (len(t),) + A.shape)], axis=2)
        det = np.abs(np.linalg.det(frame))
        Q, _ = np.linalg.qr(A)
        along = np.linalg.norm(t @ Q, axis=1)
        excluded = along > TANGENCY_THRESHOLD
        weight = np.asarray(T.evaluate(path)) if T is not None else np.ones(len(path))
        inside = clause.satisfies_inequalities(path)
        return np.where(excluded | ~inside, 0.0, weight * det), excluded

    def transversal_volume_curve(
        self, V_tilde: SemiTrigSet, lift: OrbitLift, T_tilde: Optional[TrigPoly] = None
    ) -> TransversalVolume:
        """∫ T̃·p*ω over the level curve V_tilde on 𝕋^N, N = n + 1.

        The curve is {h = 0} on 𝕋² or {h₁ = h₂ = 0} on 𝕋³; inequalities of the
        clause restrict the integrand. Orientation is fixed so T̃ ≡ 1 gives a
        nonnegative count density.

        Raises:
            DimensionUnsupported: N − n ≠ 1 or more than one clause.
            TracingStalled: the level set is singular.
        """
        if lift.mode != "real" or lift.N - lift.n != 1 or lift.N not in (2, 3):
            raise DimensionUnsupported(
                f"Curve tracing needs a real lift with N = n + 1 ≤ 3, got N={lift.N}, n={lift.n}"
            )
        if len(V_tilde.clauses) != 1:
            raise DimensionUnsupported("Curve tracing takes a single clause")
        clause = V_tilde.clauses[0]
        N = lift.N
        if V_tilde.n != N or len(clause.equations) != N - 1:
            raise ValueError(f"Expected {N - 1} equations on 𝕋^{N}")
        if T_tilde is not None and T_tilde.n != N:
            raise LatticeMismatch(f"T̃ lives on 𝕋^{T_tilde.n}, the curve on 𝕋^{N}")
        eqs = clause.equations

        seeds = self._curve_seeds(eqs, N)
        consumed = np.zeros(len(seeds), dtype=bool)
        paths: list[np.ndarray] = []
        for i in range(len(seeds)):
            if consumed[i]:
                continue
            path = self._trace(eqs, seeds[i])
            paths.append(path)
            tree = cKDTree(_wrap(path), boxsize=1.0)
            dist, _ = tree.query(_wrap(seeds))
            consumed |= dist <= 2 * self.curve_max_step
            consumed[i] = True
        logger.info("Traced %d level-curve components from %d seeds", len(paths), len(seeds))

        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            parts = list(pool.map(lambda p: self._integrand(p, clause, lift, T_tilde), paths))

        value = 0.0
        length = 0.0
        excluded_length = 0.0
        samples: list[CurveSample] = []
        for k, (path, (g, excluded)) in enumerate(zip(paths, parts, strict=True)):
            seg = np.linalg.norm(np.diff(path, axis=0), axis=1)
            value += float(np.sum(0.5 * (g[:-1] + g[1:]) * seg))
            length += float(np.sum(seg))
            excluded_length += float(np.sum(seg[excluded[:-1] & excluded[1:]]))
            arc = np.concatenate([[0.0], np.cumsum(seg)])
            samples.extend(
                CurveSample(phi=tuple(float(c) for c in _wrap(p)), arclength=float(a), integrand=float(v), component=k)
                for p, a, v in zip(path, arc, g, strict=True)
            )
        logger.info("Transversal volume %.10g over length %.6g", value, length)
        return TransversalVolume(
            value=value,
            length=length,
            components=len(paths),
            excluded_length=excluded_length,
            samples=tuple(samples),
        )
