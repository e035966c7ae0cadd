"""Command-line interface: ``expsum-lab <command> --config run.json``."""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from expsum_lab import __version__
from expsum_lab.application.services.pipeline import PipelineService
from expsum_lab.config import settings
from expsum_lab.domain.errors import ConfigError
from expsum_lab.domain.value_objects.run_config import COMMANDS, RunConfig
from expsum_lab.infrastructure.knowledge.catalog import ExperimentCatalog
from expsum_lab.infrastructure.reports.writer import plain

logger = logging.getLogger(__name__)

COMMAND_HELP = {
    "lattice": "Frequency lattice basis and integer relations",
    "geometry": "Newton polytopes, developed check, mixed volume",
    "predict": "Predicted mean value from vertex contributions",
    "zeros": "Zeros in the strip over the window schedule",
    "mean": "Empirical mean value along the λ schedule",
    "weyl": "Orbit averages against torus integrals",
    "transversal": "Transversal weighted volume of a torus curve",
    "verify": "Prediction, empirical mean and their comparison",
}


def _json_print(payload: Any) -> None:
    print(json.dumps(plain(payload), indent=2, ensure_ascii=False))


def _load_config_data(args: argparse.Namespace, catalog: ExperimentCatalog) -> dict[str, Any]:
    if args.preset:
        data = catalog.get(args.preset)
    elif args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"Config file not found: {path}")
        try:
            with path.open("r", encoding="utf-8") as handle:
                data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Config is not valid JSON: {exc}", line=exc.lineno) from exc
        if not isinstance(data, dict):
            raise ConfigError("Config must be a JSON object")
    else:
        raise ConfigError("Pass --config FILE or --preset NAME")
    data["command"] = args.command
    return data


def build_config(args: argparse.Namespace, catalog: Optional[ExperimentCatalog] = None) -> RunConfig:
    """RunConfig from the config file or preset, with CLI flags applied.

    Raises:
        ConfigError: missing file, unknown preset or schema violation.
    """
    data = _load_config_data(args, catalog or ExperimentCatalog())
    return RunConfig.load(data).with_overrides(
        seed=args.seed,
        threads=args.threads,
        tol_residual=args.tol_residual,
        tol_compare=args.tol_compare,
        out_dir=args.out_dir,
        k_file=args.k_file,
    )


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--config", type=str, default=None, help="Path to a JSON run config")
    source.add_argument("--preset", type=str, default=None, help="Name of a catalog experiment")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None, help="Worker threads (env EXPSUM_THREADS)")
    parser.add_argument("--tol-residual", type=float, default=None)
    parser.add_argument("--tol-compare", type=float, default=None)
    parser.add_argument("--out-dir", type=str, default=None)
    parser.add_argument("--k-file", type=str, default=None, help="JSON file with combinatorial coefficients")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expsum-lab",
        description="Mean values over zeros of exponential sums with real frequencies.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        _add_run_options(sub.add_parser(command, help=COMMAND_HELP[command]))
    sub.add_parser("catalog", help="List built-in experiments")
    return parser


def handle(args: argparse.Namespace, pipeline: Optional[PipelineService] = None) -> int:
    """Run one parsed command and print its summary. Returns the exit code."""
    catalog = ExperimentCatalog()
    if args.command == "catalog":
        _json_print(catalog.describe())
        return 0
    try:
        cfg = build_config(args, catalog)
    except ConfigError as exc:
        _json_print({"status": "error", "exit_code": 1, "error": exc.to_dict()})
        return 1
    artifact = (pipeline or PipelineService()).run_pipeline(cfg)
    summary = artifact.to_dict()
    summary.pop("reports")
    _json_print(summary)
    return artifact.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=settings.log_level, stream=sys.stderr)
    args = build_parser().parse_args(argv)
    return handle(args)


if __name__ == "__main__":
    raise SystemExit(main())
