# Pytest configuration and fixtures
# Provides small shearlet systems, coarse quadrature, utility instances and an isolated working directory for all tests

import pytest
import numpy as np
import logging
import tempfile
import shutil
from pathlib import Path
from utils.energies import AnisotropyNorm, DirectionalWeight, Energies
from utils.file import File
from utils.grid_field import GridField
from utils.minimizer import Minimizer
from utils.phase_constructs import PhaseConstructs, Polygon
from utils.shearlet_core import QuadratureSpec, ShearletCore, ShearletSystem
from utils.transforms import Transforms


@pytest.fixture
def test_logger():
    """
    Create a test logger for testing.

    Returns
    -------
    logging.Logger
        Configured test logger.
    """
    logger = logging.getLogger("test_logger")
    logger.setLevel(logging.INFO)

    # Remove existing handlers to avoid duplicates
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    # Add console handler for test output
    handler = logging.StreamHandler()
    formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    handler.setFormatter(formatter)
    logger.addHandler(handler)

    return logger


@pytest.fixture
def temp_directory():
    """
    Create a temporary directory for test files.

    Yields
    ------
    Path
        Path to temporary directory.
    """
    temp_dir = Path(tempfile.mkdtemp())
    yield temp_dir

    # Cleanup after test
    shutil.rmtree(temp_dir, ignore_errors=True)


@pytest.fixture(autouse=True)
def setup_test_environment(monkeypatch, temp_directory):
    """
    Run every test inside its own directory so logs/ and output/ never touch the repository.

    Parameters
    ----------
    monkeypatch : pytest.MonkeyPatch
        Pytest monkeypatch fixture.
    temp_directory : Path
        Temporary directory fixture.
    """
    monkeypatch.chdir(temp_directory)
    for key in ("SHEARLET_WORKERS", "SHEARLET_SEED", "SHEARLET_GRID"):
        monkeypatch.delenv(key, raising=False)
    monkeypatch.setenv("SHEARLET_OUTPUT_DIR", str(temp_directory / "output"))


@pytest.fixture(scope="session")
def system():
    """
    Default system (Meyer generator, Γ = Δ = 2, Γ* = Δ* = 1).
    """
    return ShearletSystem.default()


@pytest.fixture
def quad():
    """
    Coarse quadrature keeping the unit tests fast.
    """
    return QuadratureSpec(nodes_per_octave=8, shear_nodes=17)


@pytest.fixture
def weight():
    return DirectionalWeight.ramp(2.0, 1.0)


@pytest.fixture
def euclidean():
    return AnisotropyNorm.euclidean()


@pytest.fixture
def core(test_logger):
    return ShearletCore()


@pytest.fixture
def transforms(core):
    return Transforms(core=core)


@pytest.fixture
def energies(transforms):
    return Energies(transforms=transforms)


@pytest.fixture
def constructs():
    return PhaseConstructs()


@pytest.fixture
def minimizer(transforms):
    return Minimizer(transforms=transforms)


@pytest.fixture
def file_instance(temp_directory):
    """
    Create a File utility instance writing below the temporary directory.

    Returns
    -------
    File
        File utility instance.
    """
    return File(output_dir=temp_directory / "output")


@pytest.fixture
def square():
    """
    The square [0.3, 0.7]².
    """
    return Polygon.square(0.3, 0.7)


@pytest.fixture
def random_field():
    """
    Smooth random 16×16 field on the unit torus.
    """
    rng = np.random.default_rng(7)
    n = 16
    k = np.fft.fftfreq(n, d=1.0 / n)
    damping = np.exp(-(k[:, None] ** 2 + k[None, :] ** 2) / 8.0)
    spectrum = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) * damping
    spectrum[n // 2, :] = 0.0
    spectrum[:, n // 2] = 0.0
    return GridField(n, np.fft.ifft2(spectrum).real * n)


@pytest.fixture
def small_config_file(temp_directory):
    """
    YAML configuration for CLI runs on a 16×16 grid with coarse quadrature.
    """
    path = temp_directory / "small.yaml"
    path.write_text(
        "grid:\n"
        "  n: 16\n"
        "quadrature:\n"
        "  nodes_per_octave: 8\n"
        "  shear_nodes: 17\n"
        "run:\n"
        "  log_file: test/run.log\n",
        encoding="utf-8",
    )
    return path
