"""Tests for the report writer."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from expsum_lab.domain.entities.run import RunArtifact
from expsum_lab.domain.value_objects.run_config import RunConfig
from expsum_lab.infrastructure.reports.writer import SCHEMA_VERSION, ReportWriter, plain


class TestPlain:
    """Tests for JSON conversion."""

    def test_complex(self):
        """Test complex numbers become [re, im]."""
        assert plain(1 - 2j) == [1.0, -2.0]

    def test_numpy(self):
        """Test numpy scalars and arrays become Python values."""
        assert plain(np.array([1.5, 2.0])) == [1.5, 2.0]
        assert plain(np.int64(3)) == 3
        assert plain(np.bool_(True)) is True

    def test_non_finite(self):
        """Test NaN and infinity become null."""
        assert plain(math.inf) is None
        assert plain(float("nan")) is None

    def test_nested(self):
        """Test nested containers and tuple keys."""
        assert plain({(1, 2): (1j,)}) == {"(1, 2)": [[0.0, 1.0]]}

    def test_full_precision(self):
        """Test floats keep 17 significant digits."""
        assert plain(math.pi) == math.pi


class TestReportWriter:
    """Tests for ReportWriter."""

    @pytest.fixture
    def writer(self):
        """Create report writer."""
        return ReportWriter()

    @pytest.fixture
    def artifact(self, tmp_path):
        """Artifact with one report and one table."""
        cfg = RunConfig.load({"command": "predict", "system": [[{"freq": "0"}, {"freq": "1"}]]})
        artifact = RunArtifact(config=cfg, directory=tmp_path / "predict-abc-seed1", seed=1)
        artifact.add_report("prediction", {"total": 1 + 0j})
        artifact.add_table("convergence", ["lambda", "est_re", "est_im"], [[10.0, -1.0, 0.0]])
        artifact.succeed()
        return artifact

    def test_json_files(self, writer, artifact):
        """Test config, report and run summary are written with the schema version."""
        writer.emit_report(artifact)

        prediction = json.loads((artifact.directory / "prediction.json").read_text())
        run = json.loads((artifact.directory / "run.json").read_text())
        config = json.loads((artifact.directory / "config.json").read_text())

        assert prediction == {"schema_version": SCHEMA_VERSION, "total": [1.0, 0.0]}
        assert run["status"] == "passed"
        assert run["exit_code"] == 0
        assert set(run) == {"schema_version", "command", "directory", "seed", "status", "exit_code", "error"}
        assert config["command"] == "predict"

    def test_csv_header(self, writer, artifact):
        """Test CSV tables start with the schema line and the header."""
        writer.emit_report(artifact)

        lines = (artifact.directory / "convergence.csv").read_text().splitlines()

        assert lines[0] == f"# schema_version={SCHEMA_VERSION}"
        assert lines[1] == "lambda,est_re,est_im"
        assert lines[2] == "10.0,-1.0,0.0"

    def test_files_recorded(self, writer, artifact):
        """Test written paths are recorded on the artifact."""
        written = writer.emit_report(artifact)

        assert set(artifact.files) == set(written)
        assert {Path(p).name for p in written} == {"config.json", "prediction.json", "run.json", "convergence.csv"}

    def test_json_only(self, writer, artifact):
        """Test CSV output can be skipped."""
        writer.emit_report(artifact, formats=("json",))

        assert not (artifact.directory / "convergence.csv").exists()
