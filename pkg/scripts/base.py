# Base parent class for all experiments
# Contains common functionality and utility access for all experiment classes
# Initializes logging, utility objects, builders for the configured system, and the abstract extract/transform/load/main contract

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, TypeVar
import logging
import abc
import os

from dotenv import load_dotenv
import numpy as np

from utils.config import ExperimentConfig
from utils.energies import AnisotropyNorm, DirectionalWeight, Energies
from utils.errors import ConfigurationError
from utils.file import File
from utils.minimizer import Minimizer
from utils.phase_constructs import PhaseConstructs, TransitionProfile
from utils.shearlet_core import FrameBounds, QuadratureSpec, ShearletCore, ShearletSystem
from utils.transforms import Transforms

T = TypeVar("T")
R = TypeVar("R")

BASE_MODULES = [
    'scripts.base', 'scripts.frame_bounds', 'scripts.sweep_heaviside', 'scripts.sweep_polygon',
    'scripts.compare_discrete', 'scripts.counterexample', 'scripts.field_tools',
    'utils.shearlet_core', 'utils.transforms', 'utils.energies', 'utils.phase_constructs',
    'utils.minimizer', 'utils.file', 'tools.tool',
]


class Base(abc.ABC):
    _instance_count = 0

    def __init__(self, file_path: str, config: Optional[ExperimentConfig] = None):
        """
        Initialize the base class.

        Parameters
        ----------
        file_path : str
            The path to the log file including the file name.
        config : ExperimentConfig, optional
            Experiment configuration; defaults plus environment overrides when omitted.
        """
        # Logging
        Base._instance_count += 1
        self.instance_id = Base._instance_count
        self.file_handler = None
        self.configure_logging(file_path=file_path)

        logger_name = f"scripts.base.instance_{self.instance_id}"
        self.base_logger = logging.getLogger(logger_name)
        self.logger = self.base_logger
        self.logger.info("Initialized scripts.base class")

        # Environment variables
        load_dotenv()
        self.config = config if config is not None else ExperimentConfig().apply_environment()
        self.rng = np.random.default_rng(self.config.seed)

        # Utility objects
        try:
            workers = self.config.workers
            self.core = ShearletCore(instance_id=self.instance_id, workers=workers)
            self.transforms = Transforms(instance_id=self.instance_id, workers=workers, core=self.core)
            self.energies = Energies(instance_id=self.instance_id, transforms=self.transforms)
            self.constructs = PhaseConstructs(instance_id=self.instance_id, workers=workers)
            self.minimizer = Minimizer(instance_id=self.instance_id, workers=workers, transforms=self.transforms)
            self.file = File(instance_id=self.instance_id, output_dir=self.config.output_dir)

        except Exception as e:
            self.logger.error(f"Failed to initialize utility objects: {e}")
            raise

        self._frame: Optional[FrameBounds] = None

    # MARK: Builders
    def build_system(self) -> ShearletSystem:
        c = self.config
        return ShearletSystem.default(gamma=c.gamma, delta=c.delta, gamma_star=c.gamma_star,
                                      delta_star=c.delta_star, support_radius=c.support_radius)

    def build_quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(nodes_per_octave=self.config.nodes_per_octave, shear_nodes=self.config.shear_nodes)

    def build_target_norm(self) -> AnisotropyNorm:
        target = self.config.weight_target
        if target == "euclidean":
            return AnisotropyNorm.euclidean()
        if target == "l1":
            return AnisotropyNorm.l1()
        return AnisotropyNorm.ellipse(1.0, 2.0)

    def build_weight(self) -> DirectionalWeight:
        """
        Weight from the `weight` section: ramp, constant, piecewise or fitted to the target norm.
        """
        c = self.config
        if c.weight_kind == "ramp":
            return DirectionalWeight.ramp(c.delta, c.delta_star, c.weight_value)
        if c.weight_kind == "constant":
            return DirectionalWeight.constant(c.weight_value, c.delta, c.delta_star)
        if c.weight_kind == "piecewise":
            negative = c.weight_values_neg or None
            return DirectionalWeight.piecewise(c.weight_breakpoints, c.weight_values_pos, negative,
                                               c.delta, c.delta_star)
        if c.weight_kind == "fitted":
            return self.energies.weight_from_norm(self.build_target_norm(), c.delta, c.delta_star)
        raise ConfigurationError(f"Unknown weight kind '{c.weight_kind}'")

    def build_norm(self, weight: DirectionalWeight) -> AnisotropyNorm:
        norm = AnisotropyNorm.from_weight(weight)
        negative = norm.negative_directions()
        if negative.size:
            self.logger.info(f"Signed association formula is negative in {len(negative)} sampled directions")
        return norm

    def build_profile(self) -> TransitionProfile:
        if self.config.profile == "logistic":
            return TransitionProfile.truncated_logistic(self.config.optimal_width / 4.0)
        return TransitionProfile.sine()

    def check_frame(self, sys: ShearletSystem, weight: DirectionalWeight, quad: QuadratureSpec,
                    samples: int = 32) -> FrameBounds:
        """
        Frame-bound scan every energy computation requires; cached per experiment.
        """
        if self._frame is None:
            self._frame = self.core.frame_bounds(sys, weight, annulus=(1.0, float(self.config.n)),
                                                 samples=samples, quad=quad)
        return self._frame

    def map_points(self, fn: Callable[[T], R], items: Sequence[T]) -> List[R]:
        """
        Evaluate fn over sweep points on the worker pool; results keep the input order.
        """
        if self.config.workers == 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            return list(pool.map(fn, items))

    # MARK: Base Methods
    def instance_loggers(self) -> List[logging.Logger]:
        return [logging.getLogger(f"{module_name}.instance_{self.instance_id}") for module_name in BASE_MODULES]

    def configure_logging(self, file_path: str) -> None:
        """
        Route every experiment and utility logger of this instance to logs/<file_path>.

        Parameters
        ----------
        file_path : str
            The path to the log file including the file name.
        """
        full_log_path = os.path.join("logs", file_path)
        os.makedirs(os.path.dirname(full_log_path), exist_ok=True)
        self.file_handler = logging.FileHandler(full_log_path, mode='w')
        self.file_handler.setLevel(logging.INFO)
        self.file_handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
        for logger in self.instance_loggers():
            logger.setLevel(logging.INFO)
            logger.addHandler(self.file_handler)
            logger.propagate = False

    def dispose(self):
        """
        Detach and close the instance's log handler.
        """
        if self.file_handler is None:
            return
        self.base_logger.info(f"Disposing of experiment instance {self.instance_id}")
        for logger in self.instance_loggers():
            logger.removeHandler(self.file_handler)
        self.file_handler.close()
        self.file_handler = None

    # MARK: Abstract Experiment Methods
    @abc.abstractmethod
    def extract(self):
        """
        Build or read the experiment inputs.
        """
        pass

    @abc.abstractmethod
    def transform(self):
        """
        Run the measurements.
        """
        pass

    @abc.abstractmethod
    def load(self):
        """
        Write the result tables.
        """
        pass

    @abc.abstractmethod
    def main(self) -> Dict[str, Any]:
        """
        Orchestrate extract, transform and load; the result holds the verdict and a summary line.
        """
        pass
