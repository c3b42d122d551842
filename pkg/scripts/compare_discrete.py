# Discrete versus continuous shearlet seminorms and energies
# Fits the convergence rate of the discrete seminorm in the step c and compares DSGL with SGL on recovery fields

from typing import Any, Dict, List, Optional
import logging

import numpy as np

from scripts.base import Base
from utils.config import ExperimentConfig
from utils.energies import StepMap
from utils.grid_field import GridField
from utils.phase_constructs import DirectionalWidth, Polygon, TransitionProfile
from utils.sweep import SweepResult, fit_slope
from utils.transforms import count_entries

# steps whose coefficient set exceeds this many entries are flagged unresolved and skipped
MAX_DISCRETE_ENTRIES = 500_000_000
DEFAULT_SQUARE = (0.3, 0.7)
RECOVERY_MARGIN = 0.9
SLOPE_RANGE = (0.7, 1.3)
ENERGY_TOLERANCE = 0.05
# the optimal profile varies on the length 4εΩ; rows whose core covers fewer cells are unresolved
MIN_CORE_CELLS = 4.0
MIN_BAND_CELLS = 4.0


def smooth_bump(n: int, sigma: float = 0.1) -> GridField:
    """
    Gaussian bump centred in the unit torus.
    """
    return GridField.from_function(
        lambda x1, x2: np.exp(-((x1 - 0.5) ** 2 + (x2 - 0.5) ** 2) / (2.0 * sigma ** 2)), n)


class CompareDiscrete(Base):
    def __init__(self, file_path: str, config: Optional[ExperimentConfig] = None,
                 polygon_path: Optional[str] = None):
        """
        Initialize the discrete comparison.

        Parameters
        ----------
        file_path : str
            The path to the log file including the file name.
        config : ExperimentConfig, optional
            Experiment configuration; `steps_c`, `step_power` and `step_scale` drive the comparison.
        polygon_path : str, optional
            Polygon CSV for the recovery fields; the square [0.3, 0.7]² when omitted.
        """
        # Base class
        super().__init__(file_path=file_path, config=config)

        # Logging
        logger_name = f"scripts.compare_discrete.instance_{self.instance_id}"
        self.logger = logging.getLogger(logger_name)
        self.logger.info("Initialized scripts.compare_discrete class")

        self.polygon_path = polygon_path
        self.steps = SweepResult("discrete_step", key="c")
        self.energies_sweep = SweepResult("discrete_energy")
        self.slope = float("nan")
        self.residual = float("nan")

    def extract(self):
        """
        Build the system, the fixed smooth field and the recovery polygon.
        """
        try:
            self.logger.info("Building discrete comparison inputs")
            self.step_n = min(self.config.n, self.config.step_grid)
            self.energy_n = min(self.config.n, self.config.energy_grid)
            self.logger.info(f"Discrete comparison grids: {self.step_n} (steps), {self.energy_n} (energies)")
            self.system = self.build_system()
            self.weight = self.build_weight()
            self.quad = self.build_quadrature()
            self.norm = self.build_norm(self.weight)
            angles = np.linspace(0.0, 2.0 * np.pi, 720, endpoint=False)
            self.omega_min = float(np.min(self.norm(np.stack([np.cos(angles), np.sin(angles)], axis=-1))))
            self.check_frame(self.system, self.weight, self.quad)
            self.step_map = StepMap(self.config.step_power, self.config.step_scale)
            self.bump = smooth_bump(self.step_n)
            if self.polygon_path:
                self.polygon = self.file.read_polygon(self.polygon_path)
            else:
                self.polygon = Polygon.square(*DEFAULT_SQUARE)

        except Exception as e:
            self.logger.error(f"Input construction failed: {e}")
            raise

    def within_budget(self, n: int, c: float) -> bool:
        entries = count_entries(n, c, self.system)
        if entries > MAX_DISCRETE_ENTRIES:
            self.logger.warning(f"Step c={c:g} needs {entries} coefficients on a {n}x{n} grid; row skipped")
            return False
        return True

    def measure_step(self, c: float) -> Dict[str, Any]:
        if not (c * self.step_n >= 1.0 and self.within_budget(self.step_n, c)):
            return {"c": c, "discrete": float("nan"), "resolved": False, "grid_n": self.step_n}
        discrete = self.transforms.besov_discrete_streamed(self.bump, self.system, self.weight, c)
        return {"c": c, "discrete": discrete.value, "resolved": True, "grid_n": self.step_n}

    def core_cells(self, eps: float) -> float:
        return 4.0 * eps * self.omega_min * self.energy_n

    def measure_energy(self, eps: float) -> Dict[str, Any]:
        width = min(self.config.optimal_width, RECOVERY_MARGIN * self.polygon.margin() / eps)
        widths = DirectionalWidth.constant(width)
        field = self.constructs.polygon_phase_field(self.polygon, eps, TransitionProfile.optimal(widths, self.norm),
                                                    widths, self.energy_n)
        method = self.config.gradient_method
        sgl = self.energies.sgl_energy(field, eps, self.system, self.weight, self.norm, self.quad,
                                       route=self.config.besov_route, method=method)
        c = self.step_map(eps)
        core = self.core_cells(eps)
        row = {"eps": eps, "measured": float("nan"), "reference": sgl.total, "converged": sgl.converged,
               "resolved": False, "sgl": sgl.total, "dsgl": float("nan"), "step_c": c, "grid_n": self.energy_n,
               "core_cells": core, "gradient_method": method}
        if core < MIN_CORE_CELLS - 1e-9:
            self.logger.warning(f"ε={eps:g}: profile core spans {core:.2f} cells on the {self.energy_n} grid")
            return row
        if not (eps * width * self.energy_n >= MIN_BAND_CELLS - 1e-9 and self.within_budget(self.energy_n, c)):
            return row
        dsgl = self.energies.dsgl_energy(field, eps, self.system, self.weight, self.norm, self.step_map, self.quad,
                                         method=method)
        self.logger.info(f"ε={eps:g}: SGL={sgl.total:.6g} DSGL={dsgl.total:.6g} at c={c:g}")
        row.update({"measured": abs(dsgl.total - sgl.total), "resolved": True, "dsgl": dsgl.total})
        return row

    def transform(self):
        """
        Gap against c for the fixed field, then |DSGL − SGL| along the ε-sweep.
        """
        try:
            self.logger.info("Starting discrete comparison")
            continuous = self.transforms.besov_continuous(self.bump, self.system, self.weight, self.quad,
                                                          route=self.config.besov_route)
            for row in self.map_points(self.measure_step, list(self.config.steps_c)):
                gap = abs(row["discrete"] - continuous.value)
                self.steps.add(row["c"], gap, continuous.value, continuous.converged, row["resolved"],
                               discrete=row["discrete"], grid_n=row["grid_n"])
            usable = self.steps.usable()
            if len(usable) >= 2 and (usable["measured"] > 0).all():
                self.slope, self.residual = fit_slope(usable["c"].to_numpy(), usable["measured"].to_numpy())
            self.logger.info(f"Discrete gap slope {self.slope:.4f} (residual {self.residual:.3e})")

            for row in self.map_points(self.measure_energy, list(self.config.eps)):
                self.energies_sweep.add(row.pop("eps"), row.pop("measured"), row.pop("reference"), **row)
            self.verdict = self.judge()

        except Exception as e:
            self.logger.error(f"Discrete comparison failed: {e}")
            raise

    def judge(self) -> bool:
        """
        Slope within [0.7, 1.3]; |DSGL − SGL| decreasing and below 5% of SGL at the finest ε.
        """
        slope_ok = SLOPE_RANGE[0] <= self.slope <= SLOPE_RANGE[1]
        usable = self.energies_sweep.usable()
        if usable.empty:
            self.logger.warning("No usable rows in the energy comparison")
            return False
        decreasing = len(usable) < 2 or self.energies_sweep.decreasing("measured")
        finest_ok = float(usable["ratio"].iloc[-1]) < ENERGY_TOLERANCE
        self.logger.info(f"slope ok={slope_ok} decreasing={decreasing} finest ok={finest_ok}")
        return bool(slope_ok and decreasing and finest_ok)

    def load(self):
        """
        Write the step and energy tables.
        """
        try:
            self.logger.info("Writing discrete comparison tables")
            steps = self.steps.to_frame()
            steps["slope"] = self.slope
            steps["slope_residual"] = self.residual
            self.outputs: List = [self.file.write_table(steps, "discrete_steps.csv"),
                                  self.file.write_table(self.energies_sweep.to_frame(), "discrete_energy.csv")]

        except Exception as e:
            self.logger.error(f"Writing discrete comparison tables failed: {e}")
            raise

    def main(self) -> Dict[str, Any]:
        try:
            self.logger.info("Starting discrete comparison experiment")
            self.extract()
            self.transform()
            self.load()
            return {"verdict": self.verdict, "summary": f"gap slope {self.slope:.4f}, {len(self.energies_sweep.usable())} usable energy rows",
                    "outputs": self.outputs}

        except Exception as e:
            self.logger.error(f"Discrete comparison experiment failed: {e}")
            raise
