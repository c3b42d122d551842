# Tool class used to operate the experiments and field utilities from the command line
# Parses the subcommand and flags, builds the configuration, runs the matching experiment class and maps errors to exit codes
# Prints a one-line verdict summary per run

from typing import Callable, Dict, Optional, Sequence, Tuple
import argparse
import logging
import math
import os
import sys

from scripts.base import Base
from scripts.compare_discrete import CompareDiscrete
from scripts.counterexample import Counterexample
from scripts.field_tools import EnergyCommand, MinimizeCommand, SeminormCommand, TransformCommand
from scripts.frame_bounds import FrameBoundsCheck
from scripts.sweep_heaviside import SweepHeaviside
from scripts.sweep_polygon import SweepPolygon
from utils.config import ExperimentConfig
from utils.errors import ShearletError, VerdictFailure

EXIT_PASS = 0


def parse_float_list(text: str) -> Tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Expected comma-separated numbers, got {text!r}") from e
    if not values:
        raise argparse.ArgumentTypeError("Expected at least one number")
    return values


def parse_normals(text: str) -> Tuple[Tuple[float, float], ...]:
    """
    "1,0;1,1" → ((1, 0), (1/√2, 1/√2)); vectors are normalized.
    """
    normals = []
    for chunk in text.split(";"):
        pair = parse_float_list(chunk)
        if len(pair) != 2:
            raise argparse.ArgumentTypeError(f"Normals are pairs 'n1,n2', got {chunk!r}")
        length = math.hypot(*pair)
        if length == 0:
            raise argparse.ArgumentTypeError("Normals must be non-zero")
        normals.append((pair[0] / length, pair[1] / length))
    return tuple(normals)


class Tool:
    def __init__(self, log_file_path: Optional[str] = None):
        """
        Initialize the tool class

        Parameters
        ----------
        log_file_path : str, optional
            The path to the log file including the file name, relative to logs directory.
            Defaults to the configured `run.log_file`.
        """
        # Logging
        self.log_file_path = log_file_path
        if log_file_path:
            log_dir = os.path.dirname(log_file_path)
            if log_dir:
                os.makedirs(os.path.join("logs", log_dir), exist_ok=True)
        self.logger = logging.getLogger("tools.tool")
        self.experiment: Optional[Base] = None

        # Parser
        self.parser = self.create_parser()
        self.logger.info("Initialized Tool class")

    def create_parser(self) -> argparse.ArgumentParser:
        """
        Create the argument parser with one subparser per command.
        """
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--config", help="YAML configuration file")
        common.add_argument("--out", help="output directory")
        common.add_argument("--grid", type=int, help="grid side n (power of two)")
        common.add_argument("--eps", type=parse_float_list, help="comma-separated ε values")
        common.add_argument("--seed", type=int, help="random seed")
        common.add_argument("--workers", type=int, help="worker count")
        common.add_argument("--gradient", choices=("spectral", "fd"),
                            help="gradient for the Dirichlet term; fd is the finite-difference fallback")

        parser = argparse.ArgumentParser(prog="shearlet-gl",
                                         description="Shearlet-based Ginzburg–Landau energy experiments")
        commands = parser.add_subparsers(dest="command", required=True)
        commands.add_parser("frame-bounds", parents=[common], help="frame bounds and homogeneous isometry")
        heaviside = commands.add_parser("sweep-heaviside", parents=[common], help="smoothed Heaviside ε-sweep")
        heaviside.add_argument("--normals", type=parse_normals, help="jump normals, e.g. '1,0;0,1'")
        polygon = commands.add_parser("sweep-polygon", parents=[common], help="polygon phase-field ε-sweep")
        polygon.add_argument("--polygon", help="polygon CSV with columns x1,x2")
        discrete = commands.add_parser("compare-discrete", parents=[common], help="discrete vs continuous")
        discrete.add_argument("--polygon", help="polygon CSV for the recovery fields")
        commands.add_parser("counterexample", parents=[common], help="counterexample quotients")
        for name, text in (("minimize", "gradient-flow minimization"), ("seminorm", "seminorms of a field"),
                           ("energy", "GL and SGL energies of a field"), ("transform", "discrete transform")):
            sub = commands.add_parser(name, parents=[common], help=text)
            sub.add_argument("--field", help="ASGF1 input field")
            sub.add_argument("--label", help="report label")
            if name == "transform":
                sub.add_argument("--c", type=float, default=1.0, help="step parameter c")
        return parser

    def build_config(self, args: argparse.Namespace) -> ExperimentConfig:
        return ExperimentConfig.load(args.config, n=args.grid, eps=args.eps, seed=args.seed, workers=args.workers,
                                     output_dir=args.out, normals=getattr(args, "normals", None),
                                     gradient_method=args.gradient)

    def create_experiment(self, args: argparse.Namespace, config: ExperimentConfig) -> Base:
        log_path = self.log_file_path or config.log_file
        factories: Dict[str, Callable[[], Base]] = {
            "frame-bounds": lambda: FrameBoundsCheck(log_path, config),
            "sweep-heaviside": lambda: SweepHeaviside(log_path, config),
            "sweep-polygon": lambda: SweepPolygon(log_path, config, args.polygon),
            "compare-discrete": lambda: CompareDiscrete(log_path, config, args.polygon),
            "counterexample": lambda: Counterexample(log_path, config),
            "minimize": lambda: MinimizeCommand(log_path, config, args.field, args.label),
            "seminorm": lambda: SeminormCommand(log_path, config, args.field, args.label),
            "energy": lambda: EnergyCommand(log_path, config, args.field, args.label),
            "transform": lambda: TransformCommand(log_path, config, args.field, args.label, args.c),
        }
        return factories[args.command]()

    def main(self, argv: Optional[Sequence[str]] = None) -> int:
        """
        Main function

        Returns
        -------
        int
            Process exit code: 0 pass, 2 verdict failure or frame-bound failure, 3 validation error,
            4 numerical non-convergence, 5 malformed input file.
        """
        args = self.parser.parse_args(list(argv) if argv is not None else None)
        try:
            config = self.build_config(args)
            self.experiment = self.create_experiment(args, config)
            self.logger = logging.getLogger(f"tools.tool.instance_{self.experiment.instance_id}")
            self.logger.info(f"Running {args.command}")
            result = self.experiment.main()
            if not result["verdict"]:
                raise VerdictFailure(result["summary"])
            print(f"{args.command}: PASS {result['summary']}")
            self.logger.info(f"{args.command} passed: {result['summary']}")
            return EXIT_PASS

        except ShearletError as e:
            outcome = "FAIL" if isinstance(e, VerdictFailure) else f"ERROR {type(e).__name__}"
            print(f"{args.command}: {outcome} {e}")
            self.logger.error(f"{args.command} ended with exit code {e.exit_code}: {e}")
            return e.exit_code

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """
        Run the tool
        """
        self.logger.info("Running tool")
        return self.main(argv)

    def dispose(self):
        """
        Dispose of the tool's resources
        """
        self.logger.info("Disposing of Tool class")
        if self.experiment is not None:
            self.experiment.dispose()
            self.experiment = None


if __name__ == "__main__":
    tool = Tool()
    code = tool.run(sys.argv[1:])
    tool.dispose()
    sys.exit(code)
