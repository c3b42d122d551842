# ε-sweep of the box-restricted Besov seminorm of smoothed Heaviside functions
# Compares it with Ω(n)² times the H¹ seminorm on the box for every configured normal

from typing import Any, Dict, List, Optional, Tuple
import logging

import numpy as np
import pandas as pd

from scripts.base import Base
from utils.config import ExperimentConfig
from utils.phase_constructs import box_h1_seminorm_sq, sample_on_torus, smooth_heaviside
from utils.sweep import SweepResult
from utils.transforms import torus_window

# transition band must span this many grid cells for a row to count as resolved
MIN_BAND_CELLS = 4.0
RATIO_TOLERANCE = 0.15
MONOTONE_NOISE = 0.03


class SweepHeaviside(Base):
    def __init__(self, file_path: str, config: Optional[ExperimentConfig] = None):
        """
        Initialize the Heaviside sweep.

        Parameters
        ----------
        file_path : str
            The path to the log file including the file name.
        config : ExperimentConfig, optional
            Experiment configuration; `normals`, `eps`, `box_radius`, `width` and `extent_box` drive the sweep.
        """
        # Base class
        super().__init__(file_path=file_path, config=config)

        # Logging
        logger_name = f"scripts.sweep_heaviside.instance_{self.instance_id}"
        self.logger = logging.getLogger(logger_name)
        self.logger.info("Initialized scripts.sweep_heaviside class")

        self.sweeps: Dict[Tuple[float, float], SweepResult] = {}
        self.verdicts: Dict[Tuple[float, float], bool] = {}

    def extract(self):
        """
        Build the system, the window of the enlarged torus and the sweep points.
        """
        try:
            self.logger.info("Building Heaviside sweep inputs")
            c = self.config
            self.system = self.build_system()
            self.weight = self.build_weight()
            self.quad = self.build_quadrature()
            self.norm = self.build_norm(self.weight)
            self.profile = self.build_profile()
            self.check_frame(self.system, self.weight, self.quad)
            inner = c.box_radius + self.system.support_radius
            outer = c.extent_box / 2.0 - self.system.support_radius
            self.window = torus_window(c.n, c.extent_box, inner, outer)
            self.points = [(tuple(normal), eps) for normal in c.normals for eps in c.eps]

        except Exception as e:
            self.logger.error(f"Input construction failed: {e}")
            raise

    def measure(self, point: Tuple[Tuple[float, float], float]) -> Dict[str, Any]:
        normal, eps = point
        c = self.config
        jump = smooth_heaviside(eps, self.profile, c.width, normal)
        sampled = sample_on_torus(jump, c.n, c.extent_box)
        f = sampled.with_values(sampled.values * self.window.values)
        result = self.transforms.besov_box(f, self.system, self.weight, c.box_radius, self.quad)
        reference = float(self.norm(np.asarray(normal)) ** 2) * box_h1_seminorm_sq(jump, c.box_radius)
        cells = eps * c.width * c.n / c.extent_box
        second_cone = result.components.get(-1, 0.0) / result.value if result.value > 0 else 0.0
        self.logger.info(f"n={normal} ε={eps:g}: besov_box={result.value:.6g} reference={reference:.6g}")
        return {"normal": normal, "eps": eps, "measured": result.value, "reference": reference,
                "converged": result.converged, "resolved": cells >= MIN_BAND_CELLS - 1e-9,
                "second_cone": second_cone, "resolution_ceiling": result.resolution_ceiling}

    def transform(self):
        """
        Measure every (normal, ε) point on the worker pool and judge each normal.
        """
        try:
            self.logger.info(f"Starting Heaviside sweep over {len(self.points)} points")
            for row in self.map_points(self.measure, self.points):
                normal = row.pop("normal")
                sweep = self.sweeps.setdefault(normal, SweepResult(f"heaviside{normal}"))
                sweep.add(row.pop("eps"), row.pop("measured"), row.pop("reference"), **row)
            for normal, sweep in self.sweeps.items():
                sweep.verdict = self.judge(sweep)
                self.verdicts[normal] = sweep.verdict
                self.logger.info(f"Normal {normal}: verdict {sweep.verdict}")

        except Exception as e:
            self.logger.error(f"Heaviside sweep failed: {e}")
            raise

    def judge(self, sweep: SweepResult) -> bool:
        """
        Finest usable ratio within 0.15 of 1, and |ratio − 1| non-increasing up to noise 0.03.
        """
        usable = sweep.usable()
        if usable.empty:
            self.logger.warning(f"{sweep.name}: no resolved and converged rows")
            return False
        distance = np.abs(usable["ratio"].to_numpy() - 1.0)
        return bool(distance[-1] <= RATIO_TOLERANCE and np.all(np.diff(distance) <= MONOTONE_NOISE))

    def frame(self) -> pd.DataFrame:
        frames = []
        for normal, sweep in self.sweeps.items():
            table = sweep.to_frame()
            table.insert(0, "n2", normal[1])
            table.insert(0, "n1", normal[0])
            frames.append(table)
        return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()

    def load(self):
        """
        Write the sweep table.
        """
        try:
            self.logger.info("Writing Heaviside sweep table")
            self.outputs: List = [self.file.write_table(self.frame(), "sweep_heaviside.csv")]

        except Exception as e:
            self.logger.error(f"Writing Heaviside sweep table failed: {e}")
            raise

    def main(self) -> Dict[str, Any]:
        try:
            self.logger.info("Starting Heaviside experiment")
            self.extract()
            self.transform()
            self.load()
            finest = {normal: sweep.usable()["ratio"].iloc[-1] if not sweep.usable().empty else float("nan")
                      for normal, sweep in self.sweeps.items()}
            parts = ", ".join(f"({n[0]:.3f},{n[1]:.3f})→{r:.4f}" for n, r in finest.items())
            return {"verdict": all(self.verdicts.values()), "summary": f"finest ratios {parts}",
                    "outputs": self.outputs}

        except Exception as e:
            self.logger.error(f"Heaviside experiment failed: {e}")
            raise
