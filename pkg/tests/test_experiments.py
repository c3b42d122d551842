# Tests for the experiment classes on small grids
# Only table structure and flags are checked here; verdicts need the production grid sizes

import numpy as np
import pytest

from scripts.compare_discrete import CompareDiscrete
from scripts.counterexample import Counterexample
from scripts.frame_bounds import FrameBoundsCheck, band_limited_field
from scripts.sweep_heaviside import SweepHeaviside
from utils.config import ExperimentConfig


@pytest.fixture
def small_config(temp_directory):
    return ExperimentConfig(n=32, nodes_per_octave=8, shear_nodes=17, output_dir=str(temp_directory / "output"))


@pytest.fixture
def run_experiment():
    created = []

    def build(cls, config):
        experiment = cls("test/experiment.log", config)
        created.append(experiment)
        return experiment

    yield build
    for experiment in created:
        experiment.dispose()


class TestFrameBounds:
    """Test suite for the frame-bound experiment."""

    def test_band_limited_field(self):
        f = band_limited_field(np.random.default_rng(1), 16, 2.0)
        spectrum = np.fft.fft2(f.values)
        assert np.allclose(spectrum[0, :], 0.0, atol=1e-9)

    def test_tables(self, run_experiment, small_config, temp_directory):
        experiment = run_experiment(FrameBoundsCheck, small_config.with_overrides(n=16))
        result = experiment.main()
        assert list(experiment.bounds["samples"]) == [32, 64]
        assert len(experiment.isometry) == 10
        assert experiment.summary["a_est"] > 0
        assert isinstance(result["verdict"], bool)
        assert (temp_directory / "output" / "isometry.csv").exists()


class TestCounterexample:
    """Test suite for the counterexample quotients."""

    def test_quotient_table(self, run_experiment, small_config, temp_directory):
        experiment = run_experiment(Counterexample, small_config.with_overrides(indices=(1, 3)))
        experiment.main()
        frame = experiment.sweep.to_frame()
        assert list(frame["index"]) == [1, 3]
        assert frame["disjoint"].all()
        assert list(frame["resolved"]) == [True, False]
        assert np.all(frame["q_g"] > 0)
        assert frame["g_l1"][1] < frame["g_l1"][0]
        assert (temp_directory / "output" / "counterexample.csv").exists()


class TestSweepHeaviside:
    """Test suite for the smoothed Heaviside sweep."""

    def test_single_point(self, run_experiment, small_config):
        config = small_config.with_overrides(eps=(0.25,), normals=((1.0, 0.0),))
        experiment = run_experiment(SweepHeaviside, config)
        experiment.extract()
        experiment.transform()
        frame = experiment.frame()
        assert len(frame) == 1
        assert frame["resolved"][0]
        assert frame["measured"][0] >= 0.0
        assert frame["reference"][0] > 0.0


class TestCompareDiscrete:
    """Test suite for the discrete comparison grids and resolution flags."""

    def test_configured_grids(self, run_experiment, small_config):
        experiment = run_experiment(CompareDiscrete, small_config.with_overrides(step_grid=8, energy_grid=16))
        experiment.extract()
        assert (experiment.step_n, experiment.energy_n) == (8, 16)
        row = experiment.measure_step(0.0625)
        assert row["grid_n"] == 8
        assert not row["resolved"]

    def test_under_resolved_core(self, run_experiment, small_config):
        experiment = run_experiment(CompareDiscrete, small_config.with_overrides(energy_grid=16))
        experiment.extract()
        row = experiment.measure_energy(2.0 ** -7)
        assert row["grid_n"] == 16
        assert row["core_cells"] == pytest.approx(4.0 * 2.0 ** -7 * experiment.omega_min * 16)
        assert row["core_cells"] < 4.0
        assert not row["resolved"]
        assert np.isnan(row["dsgl"])
        assert row["gradient_method"] == "spectral"


class TestLogHandlers:
    """Test suite for the per-instance log handler."""

    def test_dispose_detaches_handler(self, small_config, temp_directory):
        experiment = Counterexample("test/handlers.log", small_config)
        handler = experiment.file_handler
        loggers = experiment.instance_loggers()
        assert all(handler in logger.handlers and not logger.propagate for logger in loggers)
        experiment.dispose()
        experiment.dispose()
        assert all(handler not in logger.handlers for logger in loggers)
        assert (temp_directory / "logs" / "test" / "handlers.log").exists()
