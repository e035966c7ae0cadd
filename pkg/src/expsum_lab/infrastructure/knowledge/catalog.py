"""Catalogue of built-in experiments."""

import json
import logging
from pathlib import Path
from typing import Any, Optional

from expsum_lab.domain.errors import ConfigError

logger = logging.getLogger(__name__)


class ExperimentCatalog:
    """Named experiment configs loaded from ``data/catalog.json``."""

    def __init__(self, data_path: Optional[Path] = None):
        if data_path is None:
            data_path = Path(__file__).parent.parent.parent / "data" / "catalog.json"
        self._experiments: dict[str, dict[str, Any]] = {}
        self._load_data(data_path)

    def _load_data(self, data_path: Path) -> None:
        if not data_path.exists():
            raise FileNotFoundError(f"Experiment catalog not found: {data_path}")
        with open(data_path, "r", encoding="utf-8") as f:
            data = json.load(f)
        self._experiments = data.get("experiments", {})
        logger.debug("Loaded %d catalog experiments", len(self._experiments))

    def names(self) -> list[str]:
        return sorted(self._experiments)

    def get(self, name: str) -> dict[str, Any]:
        """Config dictionary of an experiment (a fresh copy).

        Raises:
            ConfigError: unknown experiment name.
        """
        if name not in self._experiments:
            raise ConfigError(f"Unknown preset {name!r}", available=self.names())
        return json.loads(json.dumps(self._experiments[name]["config"]))

    def describe(self) -> list[dict[str, str]]:
        return [
            {
                "name": name,
                "command": self._experiments[name]["config"].get("command", "verify"),
                "description": self._experiments[name].get("description", ""),
            }
            for name in self.names()
        ]
