"""Tests for the experiment catalog."""

import pytest

from expsum_lab.domain.errors import ConfigError
from expsum_lab.domain.value_objects.run_config import RunConfig
from expsum_lab.infrastructure.knowledge.catalog import ExperimentCatalog


class TestExperimentCatalog:
    """Tests for ExperimentCatalog."""

    @pytest.fixture
    def catalog(self):
        """Create catalog."""
        return ExperimentCatalog()

    def test_names(self, catalog):
        """Test the built-in experiments are listed."""
        names = catalog.names()

        assert "calibration" in names
        assert "identical_triangles" in names
        assert "real_integers" in names
        assert names == sorted(names)

    def test_every_preset_validates(self, catalog):
        """Test every preset is a valid run config."""
        for name in catalog.names():
            cfg = RunConfig.load(catalog.get(name))
            assert cfg.command in ("verify", "mean", "predict", "weyl", "transversal")

    def test_get_returns_copy(self, catalog):
        """Test callers cannot mutate the catalog."""
        catalog.get("calibration")["command"] = "zeros"

        assert catalog.get("calibration")["command"] == "verify"

    def test_unknown(self, catalog):
        """Test unknown presets list the available names."""
        with pytest.raises(ConfigError) as exc:
            catalog.get("nope")

        assert "calibration" in exc.value.details["available"]

    def test_describe(self, catalog):
        """Test descriptions carry name, command and text."""
        entry = next(e for e in catalog.describe() if e["name"] == "weyl_torus")

        assert entry["command"] == "weyl"
        assert entry["description"]

    def test_missing_file(self, tmp_path):
        """Test a missing data file."""
        with pytest.raises(FileNotFoundError):
            ExperimentCatalog(tmp_path / "missing.json")
