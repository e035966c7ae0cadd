"""Pipeline service.

Runs one command of a ``RunConfig`` end to end: lattice → geometry
(developed gate) → prediction → zeros → mean value → comparison, then writes
the artifact directory.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np

from expsum_lab.application.services.algebra import AlgebraService
from expsum_lab.application.services.formula import FormulaService
from expsum_lab.application.services.geometry import GeometryService
from expsum_lab.application.services.lattice import LatticeService
from expsum_lab.application.services.mean_value import MeanValueService
from expsum_lab.application.services.torus import TorusService
from expsum_lab.application.services.zeros import ZeroFinderService, strip_box_for
from expsum_lab.config import settings
from expsum_lab.domain.entities.run import RunArtifact, RunStatus
from expsum_lab.domain.errors import ConfigError, ExpSumError
from expsum_lab.domain.value_objects.exp_sum import ExpSum, ExpSystem, TrigPoly, TrigTerm
from expsum_lab.domain.value_objects.frequency import Frequency, FrequencyLattice
from expsum_lab.domain.value_objects.results import MeanValueReport, Prediction
from expsum_lab.domain.value_objects.run_config import RunConfig, TrigTermSpec
from expsum_lab.domain.value_objects.torus import SemiTrigClause, SemiTrigSet
from expsum_lab.domain.value_objects.window import WindowSpec
from expsum_lab.infrastructure.cache.disk_cache import CacheService
from expsum_lab.infrastructure.parsing.frequency_parser import parse_frequency
from expsum_lab.infrastructure.reports.writer import ReportWriter

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


@dataclass
class Services:
    lattice: LatticeService
    algebra: AlgebraService
    geometry: GeometryService
    formula: FormulaService
    zeros: ZeroFinderService
    torus: TorusService
    mean: MeanValueService
    cache: Optional[CacheService] = None


@dataclass(frozen=True)
class Inputs:
    lattice: FrequencyLattice
    system: ExpSystem
    G: ExpSum


def _trig_poly(specs: list[TrigTermSpec], n: Optional[int] = None) -> TrigPoly:
    terms = []
    for spec in specs:
        alpha = Frequency.of(*spec.m) if spec.m is not None else parse_frequency(spec.freq)  # type: ignore[arg-type]
        if n is not None and alpha.n != n:
            raise ConfigError(f"Trigonometric term {alpha} has dimension {alpha.n}, expected {n}")
        terms.append(TrigTerm(alpha=alpha, c=spec.c, d=spec.d))
    return TrigPoly(tuple(terms))


class PipelineService:
    """Runs configured experiments and records their artifacts."""

    def __init__(self, writer: Optional[ReportWriter] = None):
        self.writer = writer or ReportWriter()

    # ------------------------------------------------------------------
    # setup
    # ------------------------------------------------------------------

    def services(self, cfg: RunConfig, seed: int) -> Services:
        threads = cfg.threads or settings.threads
        lattice = LatticeService(relation_bound=cfg.relation_bound, tolerance=cfg.tol_frequency)
        algebra = AlgebraService(lattice_service=lattice)
        geometry = GeometryService()
        cache = CacheService() if cfg.cache and settings.cache_enabled else None
        zeros = ZeroFinderService(geometry, cache, threads, cfg.tol_residual, seed)
        torus = TorusService(lattice, threads)
        return Services(
            lattice=lattice,
            algebra=algebra,
            geometry=geometry,
            formula=FormulaService(algebra, geometry, threads),
            zeros=zeros,
            torus=torus,
            mean=MeanValueService(zeros, torus, threads, compare_tolerance=cfg.tol_compare),
            cache=cache,
        )

    def build_inputs(self, cfg: RunConfig, lattice_service: LatticeService) -> Inputs:
        """Parse the system and G and register every frequency in one lattice.

        Raises:
            ConfigError: component count or frequency dimensions disagree.
        """
        comps = [[(parse_frequency(t.freq), t.coefficient) for t in comp] for comp in cfg.system]
        g_terms = [(parse_frequency(t.freq), t.coefficient) for t in cfg.G]
        freqs = [f for comp in comps for f, _ in comp] + [f for f, _ in g_terms]
        n = freqs[0].n
        if any(f.n != n for f in freqs):
            raise ConfigError("All frequencies must have the same dimension")
        if len(comps) != n:
            raise ConfigError(f"System has {len(comps)} components for {n} variables")
        lattice = lattice_service.find_basis(freqs)
        system = ExpSystem(tuple(ExpSum.from_spectrum(lattice, comp) for comp in comps))
        G = ExpSum.from_spectrum(lattice, g_terms) if g_terms else ExpSum.constant(lattice)
        return Inputs(lattice=lattice, system=system, G=G)

    @staticmethod
    def k_map(cfg: RunConfig) -> Optional[dict[str, int]]:
        if cfg.k is not None:
            return cfg.k
        if cfg.k_file is None:
            return None
        path = Path(cfg.k_file)
        if not path.exists():
            raise ConfigError(f"k-coefficient file not found: {path}")
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        return data.get("k", data)

    @staticmethod
    def _window(cfg: RunConfig) -> WindowSpec:
        if cfg.window is None:
            raise ConfigError(f"Command '{cfg.command}' needs a 'window'")
        return cfg.window.to_window()

    def artifact_directory(self, cfg: RunConfig, seed: int) -> Path:
        return Path(cfg.out_dir or settings.out_dir) / f"{cfg.command}-{cfg.digest()}-seed{seed}"

    # ------------------------------------------------------------------
    # run
    # ------------------------------------------------------------------

    def run_pipeline(self, cfg: RunConfig) -> RunArtifact:
        """Execute ``cfg.command`` and write its artifact directory.

        Module errors do not propagate: they are recorded on the artifact with
        their qualified code and the status maps to exit code 1. A failed
        comparison maps to exit code 2.
        """
        seed = settings.seed if cfg.seed is None else cfg.seed
        directory = self.artifact_directory(cfg, seed)
        artifact = RunArtifact(config=cfg, directory=directory, seed=seed)
        directory.mkdir(parents=True, exist_ok=True)

        handler = logging.FileHandler(directory / "run.log", mode="w", encoding="utf-8")
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        package_logger = logging.getLogger("expsum_lab")
        package_logger.addHandler(handler)
        services: Optional[Services] = None
        try:
            logger.info("Run %s (seed %d) → %s", cfg.command, seed, directory)
            services = self.services(cfg, seed)
            getattr(self, f"_run_{cfg.command}")(cfg, artifact, services)
            if artifact.status == RunStatus.PENDING:
                artifact.succeed()
        except ExpSumError as exc:
            logger.error("%s: %s", exc.qualified_code, exc.message)
            artifact.abort(exc.to_dict())
        except ValueError as exc:
            logger.error("cli_runner.InvalidInput: %s", exc)
            artifact.abort({"error": str(exc), "code": "cli_runner.InvalidInput", "details": {}})
        finally:
            try:
                self.writer.emit_report(artifact)
            finally:
                if services is not None and services.cache is not None:
                    services.cache.close()
                package_logger.removeHandler(handler)
                handler.close()
        return artifact

    # ------------------------------------------------------------------
    # commands
    # ------------------------------------------------------------------

    def _geometry_report(self, inputs: Inputs, services: Services) -> dict[str, Any]:
        geometry = services.geometry
        polys = [geometry.newton_polytope(F) for F in inputs.system.components]
        report: dict[str, Any] = {"polytopes": [p.to_dict() for p in polys]}
        if inputs.system.n > 1:
            check = geometry.is_developed(polys)
            report["developed"] = check.to_dict()
        else:
            report["developed"] = {"developed": not polys[0].is_point}
        report["minkowski_sum"] = geometry.minkowski_sum(polys).to_dict()
        report["mixed_volume"] = geometry.mixed_volume(polys)
        report["normalized_mixed_volume"] = geometry.normalized_mixed_volume(polys)
        return report

    def _run_lattice(self, cfg: RunConfig, artifact: RunArtifact, services: Services) -> Inputs:
        inputs = self.build_inputs(cfg, services.lattice)
        artifact.add_report("lattice", self._lattice_report(inputs.lattice, services))
        return inputs

    def _run_geometry(self, cfg: RunConfig, artifact: RunArtifact, services: Services) -> Inputs:
        inputs = self._run_lattice(cfg, artifact, services)
        artifact.add_report("geometry", self._geometry_report(inputs, services))
        return inputs

    def _predict(self, cfg: RunConfig, artifact: RunArtifact, services: Services, inputs: Inputs) -> Prediction:
        prediction = services.formula.predict_mean(inputs.system, inputs.G, self.k_map(cfg))
        artifact.add_report(
            "prediction",
            {"system": inputs.system.to_dict(), "G": inputs.G.to_dict(), **prediction.to_dict()},
        )
        return prediction

    def _run_predict(self, cfg: RunConfig, artifact: RunArtifact, services: Services) -> Inputs:
        inputs = self._run_geometry(cfg, artifact, services)
        self._predict(cfg, artifact, services, inputs)
        return inputs

    def _run_zeros(self, cfg: RunConfig, artifact: RunArtifact, services: Services) -> Inputs:
        inputs = self._run_geometry(cfg, artifact, services)
        window = self._window(cfg)
        strip = services.zeros.strip_radius(inputs.system)
        lo, hi = services.mean.search_bounds(window)
        search = services.zeros.locate_zeros(inputs.system, strip_box_for(strip.R, lo, hi))
        artifact.add_report("zeros", {"strip": strip.to_dict(), "seed": artifact.seed, **search.to_dict()})
        n = inputs.system.n
        header = [f"{part}_{j + 1}" for j in range(n) for part in ("re", "im")] + ["mult", "residual"]
        rows = [
            [v for c in record.z for v in (c.real, c.imag)] + [record.multiplicity, record.residual]
            for record in search.zeros
        ]
        artifact.add_table("zeros", header, rows)
        return inputs

    @staticmethod
    def _convergence_table(artifact: RunArtifact, report: MeanValueReport) -> None:
        artifact.add_table(
            "convergence",
            ["lambda", "est_re", "est_im"],
            [[e.lam, e.estimate.real, e.estimate.imag] for e in report.per_lambda],
        )

    def _mean_report(
        self, cfg: RunConfig, artifact: RunArtifact, services: Services, inputs: Inputs
    ) -> tuple[dict[str, Any], MeanValueReport]:
        window = self._window(cfg)
        report = services.mean.estimate_mean(
            inputs.system, inputs.G, window, min_multiplicity=cfg.min_multiplicity, collar=cfg.collar
        )
        payload = {
            "system": inputs.system.to_dict(),
            "G": inputs.G.to_dict(),
            "lattice": inputs.lattice.to_dict(),
            "window": window.to_dict(),
            **report.to_dict(),
            "predicted": None,
            "discrepancy": None,
        }
        self._convergence_table(artifact, report)
        return payload, report

    def _run_real_mean(self, cfg: RunConfig, artifact: RunArtifact, services: Services) -> None:
        assert cfg.real_set is not None
        window = self._window(cfg)
        V = SemiTrigSet(
            tuple(
                SemiTrigClause(
                    equations=tuple(_trig_poly(eq, window.n) for eq in clause.equations),
                    inequalities=tuple(_trig_poly(p, window.n) for p in clause.inequalities),
                )
                for clause in cfg.real_set.clauses
            )
        )
        T = _trig_poly(cfg.real_set.T, window.n) if cfg.real_set.T else None
        freqs = [t.alpha for poly in V.polynomials() + ([T] if T else []) for t in poly.terms]
        lattice = services.lattice.find_basis(freqs)
        artifact.add_report("lattice", self._lattice_report(lattice, services))
        weight = T or TrigPoly((TrigTerm(alpha=Frequency.zero(window.n), c=1.0),))
        report = services.mean.estimate_real_mean(V, weight, window, lattice)
        artifact.add_report("mean_value", {"set": V.to_dict(), "window": window.to_dict(), **report.to_dict()})
        self._convergence_table(artifact, report)

    def _lattice_report(self, lattice: FrequencyLattice, services: Services) -> dict[str, Any]:
        relation = services.lattice.integer_relation(lattice)
        return {**lattice.to_dict(), "integer_relation": list(relation) if relation else None}

    def _run_mean(self, cfg: RunConfig, artifact: RunArtifact, services: Services) -> None:
        if cfg.real_set is not None:
            self._run_real_mean(cfg, artifact, services)
            return
        inputs = self._run_geometry(cfg, artifact, services)
        payload, _ = self._mean_report(cfg, artifact, services, inputs)
        artifact.add_report("mean_value", payload)

    def _run_verify(self, cfg: RunConfig, artifact: RunArtifact, services: Services) -> None:
        inputs = self._run_geometry(cfg, artifact, services)
        prediction = self._predict(cfg, artifact, services, inputs)
        payload, report = self._mean_report(cfg, artifact, services, inputs)
        comparison = services.mean.compare_prediction(report, prediction, cfg.tol_compare)
        payload["predicted"] = prediction.total
        payload["discrepancy"] = comparison.to_dict()
        artifact.add_report("mean_value", payload)
        if comparison.passed:
            artifact.succeed()
        else:
            artifact.fail()

    # -- torus commands ---------------------------------------------------

    def _torus_lattice(self, cfg: RunConfig, services: Services) -> FrequencyLattice:
        assert cfg.torus is not None
        freqs = [parse_frequency(f) for f in cfg.torus.frequencies]
        lattice = services.lattice.find_basis(freqs)
        if lattice.N != len(freqs):
            raise ConfigError(
                f"Torus generators must be independent: {len(freqs)} given, rank {lattice.N}",
                rank=lattice.N,
            )
        return lattice

    def _run_weyl(self, cfg: RunConfig, artifact: RunArtifact, services: Services) -> None:
        assert cfg.torus is not None
        lattice = self._torus_lattice(cfg, services)
        artifact.add_report("lattice", self._lattice_report(lattice, services))
        window = self._window(cfg)
        lift = services.torus.build_lift(lattice, base_point=cfg.torus.base_point)
        f = _trig_poly(cfg.torus.f, lift.torus_dimension) if cfg.torus.f else TrigPoly(
            (TrigTerm(alpha=Frequency.zero(lift.torus_dimension), c=1.0),)
        )
        averages = services.torus.weyl_averages(f, lift, window)
        artifact.add_report(
            "weyl",
            {"lift": lift.to_dict(), "f": f.to_dict(), "window": window.to_dict(), "averages": [a.to_dict() for a in averages]},
        )
        artifact.add_table(
            "weyl",
            ["lambda", "avg", "exact", "abs_err"],
            [[a.lam, a.average, a.exact, a.abs_err] for a in averages],
        )

    def _run_transversal(self, cfg: RunConfig, artifact: RunArtifact, services: Services) -> None:
        assert cfg.torus is not None
        lattice = self._torus_lattice(cfg, services)
        artifact.add_report("lattice", self._lattice_report(lattice, services))
        lift = services.torus.build_lift(lattice, base_point=cfg.torus.base_point)
        N = lift.torus_dimension
        V_tilde = SemiTrigSet(
            (
                SemiTrigClause(
                    equations=tuple(_trig_poly(eq, N) for eq in cfg.torus.equations),
                    inequalities=tuple(_trig_poly(p, N) for p in cfg.torus.inequalities),
                ),
            )
        )
        T_tilde = _trig_poly(cfg.torus.T, N) if cfg.torus.T else None
        volume = services.torus.transversal_volume_curve(V_tilde, lift, T_tilde)
        payload: dict[str, Any] = {"lift": lift.to_dict(), "set": V_tilde.to_dict(), **volume.to_dict()}

        if cfg.torus.check_lambda is not None and lift.n == 1:
            V = self.pull_back_set(V_tilde, lattice)
            T = self.pull_back(T_tilde, lattice) if T_tilde is not None else None
            lam = cfg.torus.check_lambda
            search = services.torus.isolated_points(V, WindowSpec.box([0.0], [1.0]), lam, T)
            direct = search.total / lam
            payload["direct"] = {
                "lambda": lam,
                "count": len(search.points),
                "average": direct,
                "relative_difference": abs(direct - volume.value) / max(abs(volume.value), 1e-12),
            }
        artifact.add_report("transversal", payload)
        header = ["component", "arclength"] + [f"phi_{j + 1}" for j in range(N)] + ["integrand"]
        artifact.add_table(
            "transversal",
            header,
            [[s.component, s.arclength, *s.phi, s.integrand] for s in volume.samples],
        )

    @staticmethod
    def pull_back(T_tilde: TrigPoly, lattice: FrequencyLattice) -> TrigPoly:
        """T(x) = T̃(Φ(x)) with real frequencies Σ mᵢAᵢ."""
        return TrigPoly(
            tuple(
                TrigTerm(
                    alpha=lattice.exact_frequency_of(tuple(int(v) for v in np.rint(t.alpha.vector))),
                    c=t.c,
                    d=t.d,
                )
                for t in T_tilde.terms
            )
        )

    def pull_back_set(self, V_tilde: SemiTrigSet, lattice: FrequencyLattice) -> SemiTrigSet:
        return SemiTrigSet(
            tuple(
                SemiTrigClause(
                    equations=tuple(self.pull_back(e, lattice) for e in c.equations),
                    inequalities=tuple(self.pull_back(p, lattice) for p in c.inequalities),
                )
                for c in V_tilde.clauses
            )
        )
