# ε-sweep over polygon phase fields
# Compares the Besov seminorm with the anisotropic Dirichlet energy, records tame margins, checks the
# recovery energy of the optimal-profile field against the anisotropic perimeter and writes the boundary covering

from typing import Any, Dict, List, Optional
import logging
import math

import numpy as np

from scripts.base import Base
from utils.config import ExperimentConfig
from utils.energies import perimeter_functional
from utils.grid_field import anisotropic_dirichlet
from utils.phase_constructs import DirectionalWidth, Polygon, TransitionProfile
from utils.sweep import SweepResult

DEFAULT_SQUARE = (0.3, 0.7)
MIN_BAND_CELLS = 4.0
RECOVERY_TOLERANCE = 0.10
# recovery bands stay this fraction of the polygon margin away from the boundary of the unit square
RECOVERY_MARGIN = 0.9


def gap_scale(eps: float) -> float:
    """
    ε⁻¹/log₂(ε⁻¹), the order of the Besov–Dirichlet gap.
    """
    return 1.0 / (eps * math.log2(1.0 / eps))


class SweepPolygon(Base):
    def __init__(self, file_path: str, config: Optional[ExperimentConfig] = None,
                 polygon_path: Optional[str] = None):
        """
        Initialize the polygon sweep.

        Parameters
        ----------
        file_path : str
            The path to the log file including the file name.
        config : ExperimentConfig, optional
            Experiment configuration.
        polygon_path : str, optional
            Polygon CSV (x1,x2); the square [0.3, 0.7]² when omitted.
        """
        # Base class
        super().__init__(file_path=file_path, config=config)

        # Logging
        logger_name = f"scripts.sweep_polygon.instance_{self.instance_id}"
        self.logger = logging.getLogger(logger_name)
        self.logger.info("Initialized scripts.sweep_polygon class")

        self.polygon_path = polygon_path
        self.sweep = SweepResult("polygon")
        self.cover_checks: Dict[str, bool] = {}

    def extract(self):
        """
        Read the polygon and build system, norm and profiles.
        """
        try:
            self.logger.info("Building polygon sweep inputs")
            if self.polygon_path:
                self.polygon = self.file.read_polygon(self.polygon_path)
            else:
                self.polygon = Polygon.square(*DEFAULT_SQUARE)
            self.system = self.build_system()
            self.weight = self.build_weight()
            self.quad = self.build_quadrature()
            self.norm = self.build_norm(self.weight)
            self.profile = self.build_profile()
            self.width = DirectionalWidth.constant(self.config.width)
            self.check_frame(self.system, self.weight, self.quad)
            self.perimeter = perimeter_functional(self.polygon, self.norm)
            self.logger.info(f"Polygon with {self.polygon.count} vertices, margin {self.polygon.margin():.4g}, "
                             f"anisotropic perimeter {self.perimeter:.6g}")

        except Exception as e:
            self.logger.error(f"Input construction failed: {e}")
            raise

    def recovery_width(self, eps: float) -> float:
        return min(self.config.optimal_width, RECOVERY_MARGIN * self.polygon.margin() / eps)

    def measure(self, eps: float) -> Dict[str, Any]:
        c = self.config
        route = c.besov_route
        field = self.constructs.polygon_phase_field(self.polygon, eps, self.profile, self.width, c.n)
        besov = self.transforms.besov_continuous(field, self.system, self.weight, self.quad, route=route)
        dirichlet = anisotropic_dirichlet(field, self.norm, method=c.gradient_method)
        tame = self.energies.tame_membership(field, self.system, self.weight, self.norm, self.quad, besov=besov,
                                             method=c.gradient_method)

        w = self.recovery_width(eps)
        optimal_width = DirectionalWidth.constant(w)
        optimal = TransitionProfile.optimal(optimal_width, self.norm)
        recovery = self.constructs.polygon_phase_field(self.polygon, eps, optimal, optimal_width, c.n)
        sgl = self.energies.sgl_energy(recovery, eps, self.system, self.weight, self.norm, self.quad, route=route,
                                       method=c.gradient_method)

        self.logger.info(f"ε={eps:g}: besov={besov.value:.6g} dirichlet={dirichlet:.6g} "
                         f"margin={tame.margin:.4g} sgl={sgl.total:.6g}")
        return {
            "eps": eps,
            "measured": besov.value,
            "reference": dirichlet,
            "converged": besov.converged and sgl.converged,
            "resolved": eps * min(c.width, w) * c.n >= MIN_BAND_CELLS - 1e-9,
            "gap_normalized": abs(besov.value - dirichlet) / gap_scale(eps),
            "tame": tame.member,
            "gradient_method": c.gradient_method,
            "tame_margin": tame.margin,
            "recovery_width": w,
            "sgl": sgl.total,
            "sgl_tame": sgl.tame,
            "perimeter": self.perimeter,
            "recovery_ratio": sgl.total / self.perimeter,
            "resolution_ceiling": besov.resolution_ceiling,
        }

    def transform(self):
        """
        Measure every ε on the worker pool, then build and check the boundary covering.
        """
        try:
            self.logger.info(f"Starting polygon sweep over {len(self.config.eps)} values of ε")
            for row in self.map_points(self.measure, list(self.config.eps)):
                self.sweep.add(row.pop("eps"), row.pop("measured"), row.pop("reference"), **row)

            r = 0.5 * self.polygon.radius_bound()
            self.cover = self.constructs.covering(self.polygon, r)
            lower, upper = self.cover.count_bounds()
            self.cover_checks = {"disjoint": self.cover.check_disjoint(),
                                 "half_widths": self.cover.half_width_bounds_hold(),
                                 "lower_count": lower, "upper_count": upper}
            self.sweep.verdict = self.judge()
            self.logger.info(f"Polygon sweep verdict {self.sweep.verdict}; covering checks {self.cover_checks}")

        except Exception as e:
            self.logger.error(f"Polygon sweep failed: {e}")
            raise

    def judge(self) -> bool:
        """
        Normalized gap strictly decreasing, margins ≥ 0 for ε ≤ 2⁻⁵, recovery within 10% at the finest ε,
        and the covering passing disjointness, half-width and lower count checks.
        """
        usable = self.sweep.usable()
        if len(usable) < 2:
            self.logger.warning("Fewer than two usable rows in the polygon sweep")
            return False
        gap_ok = self.sweep.decreasing("gap_normalized")
        small = usable[usable["eps"] <= 2.0 ** -5 + 1e-15]
        margin_ok = bool(np.all(small["tame_margin"] >= 0.0))
        recovery_ok = abs(float(usable["recovery_ratio"].iloc[-1]) - 1.0) <= RECOVERY_TOLERANCE
        cover_ok = (self.cover_checks["disjoint"] and self.cover_checks["half_widths"]
                    and self.cover_checks["lower_count"])
        self.logger.info(f"gap decreasing={gap_ok} margins={margin_ok} recovery={recovery_ok} cover={cover_ok}")
        return bool(gap_ok and margin_ok and recovery_ok and cover_ok)

    def load(self):
        """
        Write the sweep table, the polygon and its covering.
        """
        try:
            self.logger.info("Writing polygon sweep tables")
            self.outputs: List = [
                self.file.write_table(self.sweep.to_frame(), "sweep_polygon.csv"),
                self.file.write_polygon(self.polygon, "polygon.csv"),
                self.file.write_covering(self.cover, "covering.csv"),
            ]

        except Exception as e:
            self.logger.error(f"Writing polygon sweep tables failed: {e}")
            raise

    def main(self) -> Dict[str, Any]:
        try:
            self.logger.info("Starting polygon experiment")
            self.extract()
            self.transform()
            self.load()
            usable = self.sweep.usable()
            ratio = float(usable["recovery_ratio"].iloc[-1]) if not usable.empty else float("nan")
            return {"verdict": bool(self.sweep.verdict),
                    "summary": f"{len(usable)} usable rows, recovery ratio {ratio:.4f}, perimeter {self.perimeter:.6g}",
                    "outputs": self.outputs}

        except Exception as e:
            self.logger.error(f"Polygon experiment failed: {e}")
            raise
