# Exception hierarchy shared by the numerical library, experiments and CLI
# Each class carries the process exit code the command-line tool maps it to

class ShearletError(Exception):
    """
    Root of every error raised by this project.
    """
    exit_code = 1


class ValidationError(ShearletError, ValueError):
    """
    Invalid input: grid sizes, parameter ranges, degenerate geometry, bad norms.
    """
    exit_code = 3


class ParameterRangeError(ValidationError):
    """
    Shearlet parameters outside a ∈ (0, Γ], |s| ≤ Δ, ι ∈ {−1, 1}.
    """


class SupportLeakError(ValidationError):
    """
    Field mass near the seam of the enlarged torus above the leak threshold.
    """


class ConfigurationError(ValidationError):
    """
    Invalid experiment configuration.
    """


class FrameBoundError(ConfigurationError):
    """
    Lower frame-bound estimate is not positive for the configured system.
    """
    exit_code = 2


class ConvergenceError(ShearletError, RuntimeError):
    """
    A numerical procedure failed to converge.
    """
    exit_code = 4


class AdmissibilityError(ConvergenceError):
    """
    Admissibility quadrature does not settle under refinement of the lower cutoff.
    """


class MinimizerDivergenceError(ConvergenceError):
    """
    The gradient flow increased the energy for too many consecutive steps.
    """


class FieldFormatError(ShearletError, IOError):
    """
    Malformed field or table file.
    """
    exit_code = 5


class VerdictFailure(ShearletError):
    """
    An experiment ran to completion but its verdict failed.
    """
    exit_code = 2
