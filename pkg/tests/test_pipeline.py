"""Tests for the pipeline service."""

import json

import pytest

from expsum_lab.application.services.pipeline import PipelineService
from expsum_lab.domain.value_objects.run_config import RunConfig
from expsum_lab.infrastructure.knowledge.catalog import ExperimentCatalog

ONE_PLUS_E = [[{"coef": 1, "freq": "0"}, {"coef": 1, "freq": "1"}]]
pytestmark = pytest.mark.integration

DECOUPLED = [
    [{"coef": 1, "freq": [0, 0]}, {"coef": 1, "freq": [1, 0]}],
    [{"coef": 1, "freq": [0, 0]}, {"coef": 1, "freq": [0, 1]}],
]


def read_json(artifact, name):
    return json.loads((artifact.directory / f"{name}.json").read_text(encoding="utf-8"))


def read_csv(artifact, name):
    return (artifact.directory / f"{name}.csv").read_text(encoding="utf-8").splitlines()


class TestPipelineService:
    """Tests for PipelineService.run_pipeline."""

    @pytest.fixture
    def service(self):
        """Create pipeline service."""
        return PipelineService()

    @pytest.fixture
    def make_config(self, run_dir):
        """Build configs writing into the temporary run directory."""

        def make(**data):
            return RunConfig.load({"out_dir": str(run_dir), "cache": False, "threads": 2, **data})

        return make

    @pytest.fixture
    def preset(self, run_dir):
        """Load a catalog preset writing into the temporary run directory."""
        catalog = ExperimentCatalog()

        def load(name, **overrides):
            return RunConfig.load(catalog.get(name)).with_overrides(
                out_dir=str(run_dir), cache=False, threads=2, **overrides
            )

        return load

    def test_artifact_directory(self, service, make_config, run_dir):
        """Test the directory name carries command, digest and seed."""
        cfg = make_config(command="lattice", system=ONE_PLUS_E, seed=3)

        artifact = service.run_pipeline(cfg)

        assert artifact.directory == run_dir / f"lattice-{cfg.digest()}-seed3"
        assert (artifact.directory / "run.log").exists()
        assert read_json(artifact, "run")["seed"] == 3

    def test_lattice(self, service, make_config):
        """Test the lattice report for {0, 1, √2}."""
        cfg = make_config(command="lattice", system=[[{"freq": "0"}, {"freq": "1"}, {"freq": "sqrt(2)"}]])

        artifact = service.run_pipeline(cfg)
        lattice = read_json(artifact, "lattice")

        assert artifact.exit_code == 0
        assert lattice["N"] == 2
        assert lattice["integer_relation"] is None

    def test_geometry(self, service, make_config):
        """Test the geometry report of the decoupled system."""
        artifact = service.run_pipeline(make_config(command="geometry", system=DECOUPLED))
        geometry = read_json(artifact, "geometry")

        assert geometry["developed"]["developed"] is True
        assert geometry["normalized_mixed_volume"] == pytest.approx(1)

    def test_predict(self, service, make_config):
        """Test F = 1+e, G = e predicts −1."""
        cfg = make_config(command="predict", system=ONE_PLUS_E, G=[{"freq": "1"}])

        artifact = service.run_pipeline(cfg)

        assert artifact.exit_code == 0
        assert read_json(artifact, "prediction")["total"] == pytest.approx([-1.0, 0.0])

    def test_predict_not_developed(self, service, preset):
        """Test identical triangles abort with the formula error code."""
        artifact = service.run_pipeline(preset("identical_triangles"))
        run = read_json(artifact, "run")

        assert artifact.exit_code == 1
        assert run["status"] == "error"
        assert run["error"]["code"] == "gkh_formula.NotDeveloped"

    def test_predict_missing_coefficients(self, service, make_config):
        """Test n = 2 without k aborts."""
        artifact = service.run_pipeline(make_config(command="predict", system=DECOUPLED))

        assert artifact.exit_code == 1
        assert artifact.error["code"] == "gkh_formula.MissingCoefficients"

    def test_predict_with_k_file(self, service, make_config, tmp_path):
        """Test combinatorial coefficients read from a file."""
        k_file = tmp_path / "k.json"
        k_file.write_text(json.dumps({"k": {"0,0": 1, "1,0": -1, "0,1": -1, "1,1": 1}}), encoding="utf-8")

        artifact = service.run_pipeline(make_config(command="predict", system=DECOUPLED, k_file=str(k_file)))

        assert artifact.exit_code == 0
        assert read_json(artifact, "prediction")["total"] == pytest.approx([1.0, 0.0])
        assert read_json(artifact, "prediction")["k_source"] == "user"

    def test_syntax_error(self, service, make_config):
        """Test a bad frequency expression aborts with its code."""
        artifact = service.run_pipeline(make_config(command="lattice", system=[[{"freq": "1+$"}]]))

        assert artifact.exit_code == 1
        assert artifact.error["code"] == "cli_runner.SyntaxError"

    def test_zeros(self, service, make_config):
        """Test zeros.csv columns and rows."""
        window = {"lo": [0], "hi": [1], "lambda0": 2, "ratio": 2, "steps": 0}

        artifact = service.run_pipeline(make_config(command="zeros", system=ONE_PLUS_E, window=window))
        lines = read_csv(artifact, "zeros")

        assert artifact.exit_code == 0
        assert lines[0].startswith("# schema_version=")
        assert lines[1] == "re_1,im_1,mult,residual"
        assert len(lines) == 4
        assert read_json(artifact, "zeros")["count"] == 2

    def test_verify_passes(self, service, make_config):
        """Test the verify flow on F = 1+e, G = e."""
        window = {"lo": [0], "hi": [1], "lambda0": 4, "ratio": 2, "steps": 4}
        cfg = make_config(command="verify", system=ONE_PLUS_E, G=[{"freq": "1"}], window=window)

        artifact = service.run_pipeline(cfg)
        mean = read_json(artifact, "mean_value")

        assert artifact.exit_code == 0
        assert len(mean["per_lambda"]) == 5
        assert mean["discrepancy"]["pass"] is True
        assert mean["predicted"] == pytest.approx([-1.0, 0.0])
        assert read_csv(artifact, "convergence")[1] == "lambda,est_re,est_im"

    def test_verify_fails_on_short_schedule(self, service, make_config):
        """Test a mismatch exits with 2."""
        window = {"lo": [0], "hi": [1], "lambda0": 4.2, "ratio": 1.5, "steps": 4}
        cfg = make_config(command="verify", system=ONE_PLUS_E, window=window)

        artifact = service.run_pipeline(cfg)

        assert artifact.exit_code == 2
        assert read_json(artifact, "mean_value")["discrepancy"]["extend_lambda"] is True

    def test_weyl(self, service, preset):
        """Test the Weyl table on the dense orbit in 𝕋³."""
        window = {"lo": [0], "hi": [1], "lambda0": 20, "ratio": 2, "steps": 2}
        cfg = RunConfig.load({**preset("weyl_torus").model_dump(), "window": window})

        artifact = service.run_pipeline(cfg)
        lines = read_csv(artifact, "weyl")

        assert artifact.exit_code == 0
        assert lines[1] == "lambda,avg,exact,abs_err"
        assert len(lines) == 5
        assert read_json(artifact, "weyl")["lift"]["dense"] is True

    @pytest.mark.slow
    def test_transversal_preset(self, service, preset):
        """Test {φ₁ = 1/4} against direct counting."""
        artifact = service.run_pipeline(preset("curve_vertical"))
        report = read_json(artifact, "transversal")

        assert artifact.exit_code == 0
        assert report["value"] == pytest.approx(1, abs=1e-6)
        assert report["direct"]["average"] == pytest.approx(1, abs=1e-2)

    def test_real_integers(self, service, preset):
        """Test the real mean value over the integers."""
        artifact = service.run_pipeline(preset("real_integers"))
        mean = read_json(artifact, "mean_value")

        assert artifact.exit_code == 0
        assert mean["extrapolated"][0] == pytest.approx(1, abs=0.06)

    @pytest.mark.slow
    def test_unit_lattice_preset(self, service, preset):
        """Test the unit_lattice preset verifies."""
        artifact = service.run_pipeline(preset("unit_lattice"))

        assert artifact.exit_code == 0
        assert read_json(artifact, "mean_value")["extrapolated"] == pytest.approx([-1.0, 0.0])

    @pytest.mark.parametrize(
        "command,window",
        [
            ("verify", {"lo": [0], "hi": [1], "lambda0": 4, "ratio": 2, "steps": 4}),
            ("zeros", {"lo": [0], "hi": [1], "lambda0": 6, "ratio": 2, "steps": 0}),
        ],
    )
    def test_rerun_is_byte_identical(self, service, make_config, command, window):
        """Test a rerun with the same config and seed rewrites identical JSON and CSV files."""
        system = [[{"coef": 1, "freq": "0"}, {"coef": 1, "freq": "1"}, {"coef": 1, "freq": "2"}]]
        cfg = make_config(command=command, system=system, G=[{"freq": "1"}], window=window, seed=11)

        first = service.run_pipeline(cfg)
        snapshot = {p.name: p.read_bytes() for p in first.directory.iterdir() if p.suffix in (".json", ".csv")}
        second = service.run_pipeline(cfg)

        assert second.directory == first.directory
        assert {"config.json", "run.json", "lattice.json"} <= set(snapshot)
        assert {
            p.name: p.read_bytes() for p in second.directory.iterdir() if p.suffix in (".json", ".csv")
        } == snapshot

    @pytest.mark.slow
    def test_cube_roots_preset(self, service, preset):
        """Test 1+e+e², G = e verifies at −1 with every zero polished."""
        artifact = service.run_pipeline(preset("cube_roots"))
        mean = read_json(artifact, "mean_value")

        assert artifact.exit_code == 0
        assert mean["per_lambda"][-1]["lambda"] == pytest.approx(200)
        assert mean["per_lambda"][-1]["est_re"] == pytest.approx(-1, abs=1e-6)
        assert mean["discrepancy"]["pass"] is True

    @pytest.mark.slow
    def test_irrational_density_preset(self, service, preset):
        """Test the zero density of 1+e+e^{√2} is √2 within 1% at λ = 500."""
        artifact = service.run_pipeline(preset("irrational_density"))
        mean = read_json(artifact, "mean_value")

        assert artifact.exit_code == 0
        assert mean["predicted"][0] == pytest.approx(2**0.5)
        assert mean["per_lambda"][-1]["lambda"] == pytest.approx(500)
        assert mean["per_lambda"][-1]["est_re"] == pytest.approx(2**0.5, rel=0.01)

    @pytest.mark.slow
    def test_incommensurate_g_preset(self, service, preset):
        """Test G = e^{√3} over the zeros of 1+e averages to 0 at λ = 500."""
        artifact = service.run_pipeline(preset("incommensurate_g"))
        mean = read_json(artifact, "mean_value")
        last = mean["per_lambda"][-1]

        assert artifact.exit_code == 0
        assert mean["predicted"] == pytest.approx([0.0, 0.0], abs=1e-12)
        assert last["lambda"] == pytest.approx(500)
        assert abs(complex(last["est_re"], last["est_im"])) <= 0.05

    @pytest.mark.slow
    @pytest.mark.parametrize("name,tolerance", [("decoupled_2d", 0.02), ("coupled_2d", 0.05)])
    def test_planar_density_presets(self, service, preset, name, tolerance):
        """Test two-variable zero densities reach 2!·MV = 1 at λ = 50."""
        artifact = service.run_pipeline(preset(name))
        last = read_json(artifact, "mean_value")["per_lambda"][-1]

        assert artifact.exit_code == 0
        assert read_json(artifact, "geometry")["normalized_mixed_volume"] == pytest.approx(1)
        assert last["lambda"] == pytest.approx(50)
        assert last["est_re"] == pytest.approx(1, abs=tolerance)
