"""JSON and CSV artifact writer.

Every emitted file carries ``schema_version``: JSON files as a top-level field,
CSV files as a ``# schema_version=N`` first line.
"""

import csv
import json
import logging
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any, Literal

import numpy as np

from expsum_lab.domain.entities.run import RunArtifact

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

ReportFormat = Literal["json", "csv"]


def plain(value: Any) -> Any:
    """JSON-ready copy: complex → [re, im], numpy → Python, non-finite → None.

    Floats keep 17 significant digits.
    """
    if hasattr(value, "to_dict"):
        return plain(value.to_dict())
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [plain(float(value.real)), plain(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        x = float(value)
        return float(f"{x:.17g}") if math.isfinite(x) else None
    if isinstance(value, Path):
        return str(value)
    return value


def dumps(payload: Any) -> str:
    return json.dumps(plain(payload), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _cell(value: Any) -> str:
    value = plain(value)
    if value is None:
        return ""
    return str(value)


class ReportWriter:
    """Writes a run artifact directory."""

    def write_json(self, path: Path, payload: dict[str, Any]) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps({"schema_version": SCHEMA_VERSION, **payload}), encoding="utf-8")
        return path

    def write_csv(self, path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as handle:
            handle.write(f"# schema_version={SCHEMA_VERSION}\n")
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
        return path

    def emit_report(
        self, artifact: RunArtifact, formats: Sequence[ReportFormat] = ("json", "csv")
    ) -> list[Path]:
        """Write config, report sections and tables into the artifact directory.

        Raises:
            OSError: the directory or a file cannot be written.
        """
        directory = artifact.directory
        directory.mkdir(parents=True, exist_ok=True)
        written: list[Path] = []
        if "json" in formats:
            written.append(self.write_json(directory / "config.json", artifact.config.model_dump(mode="json")))
            for name, payload in artifact.reports.items():
                body = payload if isinstance(payload, dict) else {"value": payload}
                written.append(self.write_json(directory / f"{name}.json", body))
            summary = {k: v for k, v in artifact.to_dict().items() if k not in ("reports", "files")}
            written.append(self.write_json(directory / "run.json", summary))
        if "csv" in formats:
            for name, (header, rows) in artifact.tables.items():
                written.append(self.write_csv(directory / f"{name}.csv", header, rows))
        artifact.files.extend(written)
        logger.info("Wrote %d files to %s", len(written), directory)
        return written
