# Experiment configuration loaded from YAML sections, environment variables and command-line overrides
# Precedence: flags over environment over file over built-in defaults

from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Dict, Optional, Tuple
import logging
import math
import os

from dotenv import load_dotenv
import yaml

from utils.errors import ConfigurationError
from utils.grid_field import is_power_of_two

logger = logging.getLogger("utils.config")

SECTIONS = {
    "grid": ("n", "extent_box"),
    "shearlet": ("generator", "gamma", "delta", "gamma_star", "delta_star", "support_radius"),
    "quadrature": ("nodes_per_octave", "shear_nodes", "besov_route", "gradient_method"),
    "weight": ("kind", "value", "breakpoints", "values_pos", "values_neg", "target"),
    "experiment": ("eps", "step_power", "step_scale", "steps_c", "box_radius", "width", "optimal_width",
                   "profile", "normals", "tau", "max_steps", "energy_tol", "snapshot_every", "indices",
                   "step_grid", "energy_grid"),
    "run": ("output_dir", "workers", "seed", "log_file"),
}

# section keys whose names clash with other sections are prefixed in the flat dataclass
_RENAMED = {("weight", "kind"): "weight_kind", ("weight", "value"): "weight_value",
            ("weight", "breakpoints"): "weight_breakpoints", ("weight", "values_pos"): "weight_values_pos",
            ("weight", "values_neg"): "weight_values_neg", ("weight", "target"): "weight_target"}

ENVIRONMENT = {
    "SHEARLET_OUTPUT_DIR": ("output_dir", str),
    "SHEARLET_WORKERS": ("workers", int),
    "SHEARLET_SEED": ("seed", int),
    "SHEARLET_GRID": ("n", int),
}


def _attribute(section: str, key: str) -> str:
    return _RENAMED.get((section, key), key)


@dataclass(frozen=True)
class ExperimentConfig:
    # grid
    n: int = 256
    extent_box: float = 2.0
    # shearlet
    generator: str = "meyer"
    gamma: float = 2.0
    delta: float = 2.0
    gamma_star: float = 1.0
    delta_star: float = 1.0
    support_radius: float = 0.25
    # quadrature
    nodes_per_octave: int = 16
    shear_nodes: int = 33
    besov_route: str = "spatial"
    gradient_method: str = "spectral"
    # weight
    weight_kind: str = "ramp"
    weight_value: float = 1.0
    weight_breakpoints: Tuple[float, ...] = ()
    weight_values_pos: Tuple[float, ...] = ()
    weight_values_neg: Tuple[float, ...] = ()
    weight_target: str = "euclidean"
    # experiment
    eps: Tuple[float, ...] = (2.0 ** -4, 2.0 ** -5, 2.0 ** -6, 2.0 ** -7)
    step_power: float = 0.6
    step_scale: float = 1.0
    steps_c: Tuple[float, ...] = (1.0, 0.5, 0.25, 0.125)
    box_radius: float = 0.25
    width: float = 1.0
    optimal_width: float = 16.0
    profile: str = "sine"
    normals: Tuple[Tuple[float, float], ...] = (
        (1.0, 0.0), (0.0, 1.0), (math.sqrt(0.5), math.sqrt(0.5)),
        (math.cos(math.radians(15.0)), math.sin(math.radians(15.0))),
    )
    tau: Optional[float] = None
    max_steps: int = 500
    energy_tol: float = 1e-8
    snapshot_every: int = 0
    indices: Tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    step_grid: int = 16
    energy_grid: int = 32
    # run
    output_dir: str = "output"
    workers: int = 1
    seed: int = 0
    log_file: str = "shearlet/run.log"
    source: Optional[str] = field(default=None, compare=False)

    # MARK: Loading
    @classmethod
    def from_yaml(cls, path: Optional[str] = None) -> "ExperimentConfig":
        """
        Read a sectioned YAML file; missing keys keep their defaults.

        Raises
        ------
        ConfigurationError
            For unreadable files, unknown sections or keys, and nested values.
        """
        if path is None:
            return cls()
        try:
            with open(path, "r", encoding="utf-8") as handle:
                document = yaml.safe_load(handle) or {}
        except (OSError, yaml.YAMLError) as e:
            logger.error(f"Failed to read configuration {path}: {e}")
            raise ConfigurationError(f"Cannot read configuration '{path}': {e}") from e
        if not isinstance(document, dict):
            raise ConfigurationError(f"Configuration '{path}' must be a mapping of sections")
        values: Dict[str, Any] = {}
        for section, entries in document.items():
            if section not in SECTIONS:
                raise ConfigurationError(f"Unknown configuration section '{section}'")
            if not isinstance(entries, dict):
                raise ConfigurationError(f"Section '{section}' must map keys to values")
            for key, value in entries.items():
                if key not in SECTIONS[section]:
                    raise ConfigurationError(f"Unknown key '{section}.{key}'")
                if isinstance(value, dict):
                    raise ConfigurationError(f"Key '{section}.{key}' must not be nested")
                values[_attribute(section, key)] = value
        return cls(source=str(path), **_coerce(values)).validate()

    def apply_environment(self) -> "ExperimentConfig":
        load_dotenv()
        updates = {}
        for variable, (name, kind) in ENVIRONMENT.items():
            raw = os.getenv(variable)
            if raw is None or raw == "":
                continue
            try:
                updates[name] = kind(raw)
            except ValueError as e:
                raise ConfigurationError(f"Environment variable {variable}={raw!r} is invalid") from e
        return self.with_overrides(**updates) if updates else self

    @classmethod
    def load(cls, path: Optional[str] = None, **overrides) -> "ExperimentConfig":
        """
        File, then environment, then explicit overrides (None values are ignored).
        """
        config = cls.from_yaml(path).apply_environment()
        explicit = {key: value for key, value in overrides.items() if value is not None}
        return config.with_overrides(**explicit) if explicit else config.validate()

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        names = {f.name for f in fields(self)}
        unknown = set(overrides) - names
        if unknown:
            raise ConfigurationError(f"Unknown configuration fields: {sorted(unknown)}")
        return replace(self, **_coerce(overrides)).validate()

    # MARK: Validation
    def validate(self) -> "ExperimentConfig":
        problems = []
        if not (is_power_of_two(int(self.n)) and self.n >= 8):
            problems.append(f"grid.n must be a power of two >= 8, got {self.n}")
        if not self.extent_box >= 1.0:
            problems.append(f"grid.extent_box must be at least 1, got {self.extent_box}")
        if self.generator != "meyer":
            problems.append(f"Unknown generator '{self.generator}'")
        if not (self.gamma >= self.gamma_star > 0):
            problems.append("Need Γ >= Γ* > 0")
        if not (self.delta >= self.delta_star > 0):
            problems.append("Need Δ >= Δ* > 0")
        if not self.support_radius > 0:
            problems.append("shearlet.support_radius must be positive")
        if self.nodes_per_octave < 2:
            problems.append("quadrature.nodes_per_octave must be at least 2")
        if self.shear_nodes < 3 or self.shear_nodes % 2 == 0:
            problems.append("quadrature.shear_nodes must be odd and >= 3")
        if self.besov_route not in ("spatial", "spectral"):
            problems.append(f"Unknown Besov route '{self.besov_route}'")
        if self.gradient_method not in ("spectral", "fd"):
            problems.append(f"Unknown gradient method '{self.gradient_method}'")
        if self.weight_kind not in ("ramp", "constant", "piecewise", "fitted"):
            problems.append(f"Unknown weight kind '{self.weight_kind}'")
        if self.weight_kind == "piecewise" and len(self.weight_breakpoints) != len(self.weight_values_pos):
            problems.append("weight.breakpoints and weight.values_pos differ in length")
        if self.weight_target not in ("euclidean", "l1", "ellipse"):
            problems.append(f"Unknown weight target '{self.weight_target}'")
        if not self.eps or any(e <= 0 for e in self.eps):
            problems.append("experiment.eps must be a non-empty list of positive values")
        if not self.step_power > 0.5:
            problems.append(f"experiment.step_power must exceed 1/2, got {self.step_power}")
        if not self.step_scale > 0:
            problems.append("experiment.step_scale must be positive")
        if any(c <= 0 for c in self.steps_c):
            problems.append("experiment.steps_c must be positive")
        if not 0 < self.box_radius < 0.5:
            problems.append("experiment.box_radius must lie in (0, 1/2)")
        if not (self.width > 0 and self.optimal_width > 0):
            problems.append("Transition widths must be positive")
        if self.profile not in ("sine", "logistic"):
            problems.append(f"Unknown profile '{self.profile}'")
        if any(abs(math.hypot(*n) - 1.0) > 1e-6 for n in self.normals):
            problems.append("experiment.normals must be unit vectors")
        if self.tau is not None and not self.tau > 0:
            problems.append("experiment.tau must be positive")
        if self.max_steps < 1 or self.energy_tol <= 0 or self.snapshot_every < 0:
            problems.append("Invalid minimizer stopping parameters")
        if any(i < 1 for i in self.indices):
            problems.append("experiment.indices must be >= 1")
        for key in ("step_grid", "energy_grid"):
            value = int(getattr(self, key))
            if not (is_power_of_two(value) and value >= 8):
                problems.append(f"experiment.{key} must be a power of two >= 8, got {value}")
        if self.workers < 1:
            problems.append(f"run.workers must be >= 1, got {self.workers}")
        if self.seed < 0:
            problems.append(f"run.seed must be non-negative, got {self.seed}")
        if problems:
            logger.error(f"Invalid configuration: {'; '.join(problems)}")
            raise ConfigurationError("; ".join(problems))
        return self

    def to_sections(self) -> Dict[str, Dict[str, Any]]:
        flat = asdict(self)
        return {section: {key: _plain(flat[_attribute(section, key)]) for key in keys}
                for section, keys in SECTIONS.items()}

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_sections(), sort_keys=False)


def _plain(value):
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value


def _coerce(values: Dict[str, Any]) -> Dict[str, Any]:
    # YAML lists become tuples so the dataclass stays hashable and frozen
    out = {}
    for key, value in values.items():
        if key == "normals" and value is not None:
            out[key] = tuple((float(a), float(b)) for a, b in value)
        elif key in ("eps", "steps_c", "weight_breakpoints", "weight_values_pos", "weight_values_neg"):
            out[key] = tuple(float(v) for v in (value if isinstance(value, (list, tuple)) else [value]))
        elif key == "indices":
            out[key] = tuple(int(v) for v in (value if isinstance(value, (list, tuple)) else [value]))
        elif key in ("n", "nodes_per_octave", "shear_nodes", "max_steps", "snapshot_every", "workers", "seed",
                     "step_grid", "energy_grid"):
            out[key] = int(value)
        elif key == "tau":
            out[key] = None if value is None else float(value)
        else:
            out[key] = value
    return out
