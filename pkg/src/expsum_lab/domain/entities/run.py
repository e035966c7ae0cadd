"""Run artifact entity."""

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Optional

from expsum_lab.domain.value_objects.run_config import RunConfig


class RunStatus(str, Enum):
    """Outcome of a pipeline run; the value maps to the process exit code."""

    PENDING = "pending"
    PASSED = "passed"
    FAILED = "failed"  # comparison outside tolerance
    ERROR = "error"


EXIT_CODES = {
    RunStatus.PENDING: 1,
    RunStatus.PASSED: 0,
    RunStatus.FAILED: 2,
    RunStatus.ERROR: 1,
}


@dataclass
class RunArtifact:
    """Everything a run produced, keyed by report name.

    Attributes:
        config: the resolved configuration
        directory: artifact directory ``{command}-{digest}-seed{seed}``
        reports: JSON-ready report sections (``lattice``, ``prediction``, ...)
        tables: CSV tables as (header, rows) pairs
        files: paths written by the report writer
    """

    config: RunConfig
    directory: Path
    seed: int
    status: RunStatus = RunStatus.PENDING
    reports: dict[str, Any] = field(default_factory=dict)
    tables: dict[str, tuple[list[str], list[list[Any]]]] = field(default_factory=dict)
    files: list[Path] = field(default_factory=list)
    error: Optional[dict[str, Any]] = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def add_report(self, name: str, payload: Any) -> None:
        self.reports[name] = payload

    def add_table(self, name: str, header: list[str], rows: list[list[Any]]) -> None:
        self.tables[name] = (header, rows)

    def succeed(self) -> None:
        self.status = RunStatus.PASSED

    def fail(self) -> None:
        """Mark a comparison failure."""
        self.status = RunStatus.FAILED

    def abort(self, error: dict[str, Any]) -> None:
        self.status = RunStatus.ERROR
        self.error = error

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "command": self.config.command,
            "directory": str(self.directory),
            "seed": self.seed,
            "status": self.status.value,
            "exit_code": self.exit_code,
            "error": self.error,
            "reports": self.reports,
            "files": [str(p) for p in self.files],
        }
