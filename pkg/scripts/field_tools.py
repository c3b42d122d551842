# Field-level commands: gradient-flow minimization, discrete transform, seminorms and energies of a stored field
# Each reads an ASGF1 field (or builds a default one) and writes a CSV report

from typing import Any, Dict, List, Optional
import logging

import pandas as pd

from scripts.base import Base
from utils.config import ExperimentConfig
from utils.errors import ConfigurationError
from utils.grid_field import GridField, anisotropic_dirichlet, h1_seminorm_sq
from utils.minimizer import default_scale_cap
from utils.phase_constructs import DirectionalWidth, Polygon
from utils.transforms import besov_discrete, enumerate_entries

DEFAULT_SQUARE = (0.3, 0.7)


class FieldCommand(Base):
    module_name = "scripts.field_tools"

    def __init__(self, file_path: str, config: Optional[ExperimentConfig] = None,
                 field_path: Optional[str] = None, label: Optional[str] = None):
        """
        Initialize a field command.

        Parameters
        ----------
        file_path : str
            The path to the log file including the file name.
        config : ExperimentConfig, optional
            Experiment configuration.
        field_path : str, optional
            ASGF1 input field.
        label : str, optional
            Label written into the report rows.
        """
        # Base class
        super().__init__(file_path=file_path, config=config)

        # Logging
        logger_name = f"{self.module_name}.instance_{self.instance_id}"
        self.logger = logging.getLogger(logger_name)
        self.logger.info(f"Initialized {type(self).__name__} command")

        self.field_path = field_path
        self.label = label or type(self).__name__.lower()
        self.report = pd.DataFrame()
        self.verdict = True

    def read_input(self) -> GridField:
        if self.field_path is None:
            self.logger.error("No input field given")
            raise ConfigurationError("This command needs --field")
        return self.file.read_field(self.field_path)

    def extract(self):
        """
        Read the field and build the configured system.
        """
        try:
            self.logger.info("Reading input field")
            self.field = self.read_input()
            self.system = self.build_system()
            self.weight = self.build_weight()
            self.quad = self.build_quadrature()

        except Exception as e:
            self.logger.error(f"Input construction failed: {e}")
            raise

    def load(self):
        """
        Write the report table.
        """
        try:
            self.logger.info("Writing report")
            self.outputs: List = [self.file.write_table(self.report, f"{self.label}.csv")]

        except Exception as e:
            self.logger.error(f"Writing report failed: {e}")
            raise

    def summary(self) -> str:
        return f"{len(self.report)} rows"

    def main(self) -> Dict[str, Any]:
        try:
            self.logger.info(f"Starting {type(self).__name__}")
            self.extract()
            self.transform()
            self.load()
            return {"verdict": bool(self.verdict), "summary": self.summary(), "outputs": self.outputs}

        except Exception as e:
            self.logger.error(f"{type(self).__name__} failed: {e}")
            raise


class SeminormCommand(FieldCommand):
    def transform(self):
        """
        Besov, H¹ and anisotropic Dirichlet seminorms of the field.
        """
        try:
            self.logger.info("Computing seminorms")
            norm = self.build_norm(self.weight)
            besov = self.transforms.besov_continuous(self.field, self.system, self.weight, self.quad,
                                                     route=self.config.besov_route)
            row = besov.as_row()
            row.update({"label": self.label, "h1": h1_seminorm_sq(self.field),
                        "dirichlet": anisotropic_dirichlet(self.field, norm, method=self.config.gradient_method),
                        "gradient_method": self.config.gradient_method, "grid_n": self.field.n})
            self.report = pd.DataFrame([row])

        except Exception as e:
            self.logger.error(f"Seminorm computation failed: {e}")
            raise

    def summary(self) -> str:
        row = self.report.iloc[0]
        return (f"besov={row['value']:.10g} h1={row['h1']:.10g} converged={bool(row['converged'])} "
                f"gradient={row['gradient_method']}")


class EnergyCommand(FieldCommand):
    def transform(self):
        """
        GL and SGL energies of the field at the first configured ε.
        """
        try:
            eps = self.config.eps[0]
            method = self.config.gradient_method
            self.logger.info(f"Computing energies at ε={eps:g}")
            norm = self.build_norm(self.weight)
            self.check_frame(self.system, self.weight, self.quad)
            reports = [
                self.energies.gl_energy(self.field, eps, norm, method=method, label=f"{self.label}_gl"),
                self.energies.sgl_energy(self.field, eps, self.system, self.weight, norm, self.quad,
                                         route=self.config.besov_route, label=f"{self.label}_sgl", method=method),
            ]
            self.report = pd.DataFrame([report.as_row() for report in reports])

        except Exception as e:
            self.logger.error(f"Energy computation failed: {e}")
            raise

    def summary(self) -> str:
        return ", ".join(f"{row.label}: total={row.total:.10g} (potential {row.potential:.10g})"
                         for row in self.report.itertuples())


class TransformCommand(FieldCommand):
    def __init__(self, file_path: str, config: Optional[ExperimentConfig] = None,
                 field_path: Optional[str] = None, label: Optional[str] = None, c: float = 1.0):
        super().__init__(file_path=file_path, config=config, field_path=field_path, label=label)
        self.c = c

    def transform(self):
        """
        Discrete coefficient set at step c, with its entry count checked against the enumerator.
        """
        try:
            self.logger.info(f"Computing discrete transform at c={self.c:g}")
            self.coefficients = self.transforms.discrete_transform(self.field, self.system, self.weight, self.c)
            expected = enumerate_entries(self.field.n, self.c, self.system)
            self.verdict = self.coefficients.entry_count == expected
            self.summary_row = {"label": self.label, "c": self.c, "entries": self.coefficients.entry_count,
                                "expected_entries": expected,
                                "besov_discrete": besov_discrete(self.coefficients),
                                "resolution_ceiling": self.coefficients.resolution_ceiling}
            self.report = self.coefficients.to_frame()

        except Exception as e:
            self.logger.error(f"Discrete transform failed: {e}")
            raise

    def load(self):
        """
        Write the coefficient table and its summary row.
        """
        try:
            self.logger.info("Writing coefficients")
            self.outputs = [self.file.write_coefficients(self.coefficients, f"{self.label}_coefficients.csv"),
                            self.file.write_table(pd.DataFrame([self.summary_row]), f"{self.label}.csv")]

        except Exception as e:
            self.logger.error(f"Writing coefficients failed: {e}")
            raise

    def summary(self) -> str:
        row = self.summary_row
        return (f"{row['entries']} coefficients (enumerator {row['expected_entries']}), "
                f"discrete seminorm {row['besov_discrete']:.10g}")


class MinimizeCommand(FieldCommand):
    def read_input(self) -> GridField:
        """
        The given field, or the sine-profile phase field of the square [0.3, 0.7]² at the first ε.
        """
        if self.field_path is not None:
            return self.file.read_field(self.field_path)
        eps = self.config.eps[0]
        polygon = Polygon.square(*DEFAULT_SQUARE)
        return self.constructs.polygon_phase_field(polygon, eps, self.build_profile(),
                                                   DirectionalWidth.constant(self.config.width), self.config.n)

    def transform(self):
        """
        Run the semi-implicit gradient flow with the periodic multiplier capped at Γ₀.
        """
        try:
            c = self.config
            eps = c.eps[0]
            self.check_frame(self.system, self.weight, self.quad)
            gamma0 = default_scale_cap(self.system, self.field)
            table = self.minimizer.build_multiplier(self.system, self.weight, self.field.n, "periodic",
                                                    gamma0, self.quad, self.field.extent)

            def snapshot(step: int, u: GridField) -> None:
                self.file.write_field(u, f"snapshots/{self.label}_{step:06d}.asgf")

            self.trajectory = self.minimizer.minimize(self.field, eps, table, c.tau, c.max_steps, c.energy_tol,
                                                      snapshot, c.snapshot_every)
            start = float(self.trajectory.trace["total"].iloc[0])
            self.verdict = self.trajectory.stability <= 1e-10 * max(1.0, abs(start))
            self.report = self.trajectory.trace

        except Exception as e:
            self.logger.error(f"Minimization failed: {e}")
            raise

    def load(self):
        """
        Write the energy trace and the final field.
        """
        try:
            self.logger.info("Writing trajectory")
            self.outputs = [self.file.write_trace(self.trajectory, f"{self.label}_trace.csv"),
                            self.file.write_field(self.trajectory.final_field, f"{self.label}_final.asgf")]

        except Exception as e:
            self.logger.error(f"Writing trajectory failed: {e}")
            raise

    def summary(self) -> str:
        t = self.trajectory
        return (f"{t.steps} steps, converged={t.converged}, final energy {t.trace['total'].iloc[-1]:.10g}, "
                f"stability {t.stability:.3e}")
