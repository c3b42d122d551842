# Seminorm quotients of the counterexample sequence
# Shows that the quotient of u_k + g_k follows the wave packet g_k, whatever jump set u_k mollifies

from typing import Any, Dict, List, Optional
import logging
import math

import numpy as np

from scripts.base import Base
from utils.config import ExperimentConfig
from utils.grid_field import GridField, h1_seminorm_sq
from utils.phase_constructs import packet_radius
from utils.sweep import SweepResult

SHAPES = ("disc", "square")
SHAPE_TOLERANCE = 0.02


class Counterexample(Base):
    def __init__(self, file_path: str, config: Optional[ExperimentConfig] = None):
        """
        Initialize the counterexample experiment.

        Parameters
        ----------
        file_path : str
            The path to the log file including the file name.
        config : ExperimentConfig, optional
            Experiment configuration; `indices` lists the sequence indices.
        """
        # Base class
        super().__init__(file_path=file_path, config=config)

        # Logging
        logger_name = f"scripts.counterexample.instance_{self.instance_id}"
        self.logger = logging.getLogger(logger_name)
        self.logger.info("Initialized scripts.counterexample class")

        self.sweep = SweepResult("counterexample", key="index", descending=False)

    def extract(self):
        """
        Build the system and the field pairs for both jump sets.
        """
        try:
            self.logger.info("Building counterexample fields")
            self.system = self.build_system()
            self.weight = self.build_weight()
            self.quad = self.build_quadrature()
            self.pairs = {(index, shape): self.constructs.counterexample_pair(index, self.config.n, shape)
                          for index in self.config.indices for shape in SHAPES}

        except Exception as e:
            self.logger.error(f"Input construction failed: {e}")
            raise

    def quotient(self, f: GridField) -> Dict[str, Any]:
        """
        |f|_{B,p}/|f|_{H¹} with the quadrature flag.
        """
        besov = self.transforms.besov_continuous(f, self.system, self.weight, self.quad,
                                                 route=self.config.besov_route)
        h1 = h1_seminorm_sq(f)
        value = math.sqrt(besov.value / h1) if h1 > 0 else float("nan")
        return {"value": value, "converged": besov.converged}

    def measure(self, index: int) -> Dict[str, Any]:
        u, g = self.pairs[(index, "disc")]
        u_alt, g_alt = self.pairs[(index, "square")]
        q_u, q_g, q_sum = self.quotient(u), self.quotient(g), self.quotient(u + g)
        q_g_alt, q_sum_alt = self.quotient(g_alt), self.quotient(u_alt + g_alt)
        disjoint = bool(np.all(u.values * g.values == 0.0) and np.all(u_alt.values * g_alt.values == 0.0))
        converged = all(q["converged"] for q in (q_u, q_g, q_sum, q_g_alt, q_sum_alt))
        self.logger.info(f"k={index}: q(u)={q_u['value']:.6g} q(g)={q_g['value']:.6g} q(u+g)={q_sum['value']:.6g}")
        resolved = min(2.0 ** (-(index + 2)), packet_radius(index)) * self.config.n >= 2.0
        g_l1 = float(np.sum(np.abs(g.values))) / self.config.n ** 2
        return {"index": index, "measured": abs(q_sum["value"] - q_g["value"]), "reference": q_g["value"],
                "converged": converged, "resolved": resolved, "q_u": q_u["value"], "q_g": q_g["value"],
                "q_sum": q_sum["value"], "q_g_square": q_g_alt["value"], "q_sum_square": q_sum_alt["value"],
                "disjoint": disjoint, "g_l1": g_l1}

    def transform(self):
        """
        Quotients per index on the worker pool, then the verdict.
        """
        try:
            self.logger.info(f"Starting counterexample over indices {list(self.config.indices)}")
            for row in self.map_points(self.measure, list(self.config.indices)):
                self.sweep.add(row.pop("index"), row.pop("measured"), row.pop("reference"), **row)
            self.sweep.verdict = self.judge()

        except Exception as e:
            self.logger.error(f"Counterexample failed: {e}")
            raise

    def judge(self) -> bool:
        """
        Supports disjoint, ‖g_k‖_{L¹} and |q(u+g) − q(g)| decreasing in k, and q(g)
        independent of the jump set within 2%.
        """
        frame = self.sweep.to_frame()
        if not bool(frame["disjoint"].all()):
            self.logger.warning("Counterexample supports overlap")
            return False
        l1 = frame["g_l1"].to_numpy(dtype=float)
        if not bool(np.all(np.diff(l1) < 0.0)):
            self.logger.warning(f"‖g_k‖_L1 is not decreasing: {np.round(l1, 6).tolist()}")
            return False
        decreasing = len(frame) < 2 or self.sweep.decreasing("measured")
        usable = self.sweep.usable()
        last = (usable if not usable.empty else frame).iloc[-1]
        shape_gap = abs(last["q_g"] - last["q_g_square"]) / last["q_g"]
        self.logger.info(f"decreasing={decreasing} jump-set gap={shape_gap:.3%}")
        return bool(decreasing and shape_gap <= SHAPE_TOLERANCE)

    def load(self):
        """
        Write the quotient table.
        """
        try:
            self.logger.info("Writing counterexample table")
            self.outputs: List = [self.file.write_table(self.sweep.to_frame(), "counterexample.csv")]

        except Exception as e:
            self.logger.error(f"Writing counterexample table failed: {e}")
            raise

    def main(self) -> Dict[str, Any]:
        try:
            self.logger.info("Starting counterexample experiment")
            self.extract()
            self.transform()
            self.load()
            last = self.sweep.to_frame().iloc[-1]
            return {"verdict": bool(self.sweep.verdict),
                    "summary": f"k={int(last['index'])}: |q(u+g) − q(g)|={last['measured']:.4g}, "
                               f"q(g)={last['q_g']:.6g} (disc) vs {last['q_g_square']:.6g} (square)",
                    "outputs": self.outputs}

        except Exception as e:
            self.logger.error(f"Counterexample experiment failed: {e}")
            raise
