# Frame-bound experiment for the configured shearlet system
# Scans the H¹ multiplier over an annulus, checks the generator normalization and the homogeneous isometry

from typing import Any, Dict, Optional
import logging
import math

import numpy as np
import pandas as pd
from scipy import fft

from scripts.base import Base
from utils.config import ExperimentConfig
from utils.grid_field import GridField, l2_norm_sq

ISOMETRY_FIELDS = 10
ISOMETRY_GRID = 64


def band_limited_field(rng: np.random.Generator, n: int, radius: float) -> GridField:
    """
    Random real field with spectrum in 1 ≤ |k| ≤ radius and no k₁ = 0 modes.
    """
    k = np.rint(fft.fftfreq(n, d=1.0 / n))
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    mask = (np.hypot(k1, k2) <= radius) & (k1 != 0)
    spectrum = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) * mask
    return GridField(n, fft.ifft2(spectrum).real)


class FrameBoundsCheck(Base):
    def __init__(self, file_path: str, config: Optional[ExperimentConfig] = None):
        """
        Initialize the frame-bound experiment.

        Parameters
        ----------
        file_path : str
            The path to the log file including the file name.
        config : ExperimentConfig, optional
            Experiment configuration.
        """
        # Base class
        super().__init__(file_path=file_path, config=config)

        # Logging
        logger_name = f"scripts.frame_bounds.instance_{self.instance_id}"
        self.logger = logging.getLogger(logger_name)
        self.logger.info("Initialized scripts.frame_bounds class")

        self.bounds = pd.DataFrame()
        self.isometry = pd.DataFrame()
        self.summary: Dict[str, Any] = {}

    def extract(self):
        """
        Build the system, weight, quadrature and the random band-limited fields.
        """
        try:
            self.logger.info("Building system and isometry fields")
            self.system = self.build_system()
            self.weight = self.build_weight()
            self.quad = self.build_quadrature()
            n = min(self.config.n, ISOMETRY_GRID)
            self.fields = [band_limited_field(self.rng, n, n / 8.0) for _ in range(ISOMETRY_FIELDS)]

        except Exception as e:
            self.logger.error(f"Input construction failed: {e}")
            raise

    def transform(self):
        """
        Frame scan at two densities, normalization integral, admissibility and isometry ratios.
        """
        try:
            self.logger.info("Starting frame-bound scan")
            annulus = (1.0, float(self.config.n))
            rows = []
            for samples in (32, 64):
                bounds = self.core.frame_bounds(self.system, self.weight, annulus=annulus, samples=samples,
                                                quad=self.quad)
                rows.append({"samples": samples, "a_est": bounds.a_est, "b_est": bounds.b_est,
                             "r_lo": annulus[0], "r_hi": annulus[1], "converged": bounds.converged})
            self.bounds = pd.DataFrame(rows)
            coarse, fine = self.bounds["a_est"].to_numpy()
            refinement_change = abs(fine - coarse) / fine

            gen = self.system.generator
            c_psi = self.core.admissibility_constant(gen)
            normalization = self.core.normalization_integral(gen)
            normalization_error = abs(normalization - (2.0 * math.pi) ** 2) / (2.0 * math.pi) ** 2

            ratios = []
            for index, f in enumerate(self.fields):
                energy = self.transforms.homogeneous_energy(f, self.system, self.quad)
                reference = c_psi * l2_norm_sq(f)
                ratios.append({"field": index, "energy": energy, "reference": reference,
                               "ratio": energy / reference})
            self.isometry = pd.DataFrame(ratios)

            within = bool(np.all((self.isometry["ratio"] >= 0.98) & (self.isometry["ratio"] <= 1.02)))
            verdict = refinement_change < 0.05 and within and normalization_error <= 1e-6
            self.summary = {
                "a_est": float(fine),
                "b_est": float(self.bounds["b_est"].iloc[-1]),
                "refinement_change": float(refinement_change),
                "c_psi": c_psi,
                "normalization_error": normalization_error,
                "isometry_min": float(self.isometry["ratio"].min()),
                "isometry_max": float(self.isometry["ratio"].max()),
                "verdict": bool(verdict),
            }
            self.logger.info(f"Frame bounds verdict: {self.summary}")

        except Exception as e:
            self.logger.error(f"Frame-bound scan failed: {e}")
            raise

    def load(self):
        """
        Write the bounds and isometry tables.
        """
        try:
            self.logger.info("Writing frame-bound tables")
            self.outputs = [self.file.write_table(self.bounds, "frame_bounds.csv"),
                            self.file.write_table(self.isometry, "isometry.csv")]

        except Exception as e:
            self.logger.error(f"Writing frame-bound tables failed: {e}")
            raise

    def main(self) -> Dict[str, Any]:
        try:
            self.logger.info("Starting frame-bound experiment")
            self.extract()
            self.transform()
            self.load()
            s = self.summary
            return {
                "verdict": s["verdict"],
                "summary": (f"A_est={s['a_est']:.6g} B_est={s['b_est']:.6g} "
                            f"refinement={s['refinement_change']:.2%} "
                            f"isometry=[{s['isometry_min']:.4f}, {s['isometry_max']:.4f}]"),
                "outputs": self.outputs,
            }

        except Exception as e:
            self.logger.error(f"Frame-bound experiment failed: {e}")
            raise
