# Double-well potential, classical and shearlet-based Ginzburg–Landau energies
# Directional weights, anisotropy norms, the weight-norm association, the tame-set test and the perimeter functional

from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Optional, Sequence, Tuple, TYPE_CHECKING
import logging
import math

import numpy as np
from scipy import integrate, optimize

from utils.errors import ConvergenceError, ValidationError
from utils.grid_field import GridField, anisotropic_dirichlet, h1_seminorm_sq
from utils.shearlet_core import QuadratureSpec, ShearletSystem
from utils.transforms import SeminormResult, Transforms

if TYPE_CHECKING:
    from utils.phase_constructs import Polygon

PERIMETER_CONSTANT = 1.0 / 6.0


# MARK: Potential
def double_well(u):
    return u ** 2 * (1.0 - u) ** 2


def double_well_derivative(u):
    return 2.0 * u * (1.0 - u) * (1.0 - 2.0 * u)


def potential_term(f: GridField, eps: float) -> float:
    """
    (1/4ε)∫W(f), the grid mean of W times the box area.
    """
    if not eps > 0:
        raise ValidationError(f"ε must be positive, got {eps}")
    return float(np.mean(double_well(f.values)) * f.extent ** 2 / (4.0 * eps))


def perimeter_constant(potential: Callable[[np.ndarray], np.ndarray] = double_well) -> float:
    """
    c = ∫₀¹ √W(s) ds by Simpson's rule, checked between 10³ and 10⁴ intervals.

    Raises
    ------
    ConvergenceError
        If the two resolutions disagree beyond 10⁻⁹, or the default potential misses 1/6.
    """
    values = []
    for intervals in (1000, 10000):
        s = np.linspace(0.0, 1.0, intervals + 1)
        values.append(float(integrate.simpson(np.sqrt(potential(s)), x=s)))
    coarse, fine = values
    if abs(fine - coarse) > 1e-9:
        raise ConvergenceError(f"Perimeter constant quadrature unsettled: {coarse} vs {fine}")
    if potential is double_well and abs(fine - PERIMETER_CONSTANT) > 1e-12:
        raise ConvergenceError(f"Perimeter constant {fine} differs from 1/6")
    return fine


def slack(x):
    """
    U(x) = x/log₂(2 + x).
    """
    return x / np.log2(2.0 + x)


# MARK: Directional weights
@dataclass(frozen=True)
class DirectionalWeight:
    """
    Piecewise-linear ω(ι, s) on [−Δ, Δ], zero outside.

    `breakpoints` is shared by both cones; `values_pos` and `values_neg` are the
    nodal values for ι = 1 and ι = −1. A weight may vanish on [−Δ*, Δ*]; the
    frame-bound scan is what rejects it.
    """
    breakpoints: np.ndarray
    values_pos: np.ndarray
    values_neg: np.ndarray
    delta: float
    delta_star: float
    label: str = "piecewise"
    fit_residual: Optional[float] = None

    def __post_init__(self):
        breaks = np.array(self.breakpoints, dtype=float)
        pos = np.array(self.values_pos, dtype=float)
        neg = np.array(self.values_neg, dtype=float)
        if breaks.ndim != 1 or breaks.size < 2 or pos.shape != breaks.shape or neg.shape != breaks.shape:
            raise ValidationError("Weight needs matching breakpoint and value arrays with at least two nodes")
        if np.any(np.diff(breaks) <= 0):
            raise ValidationError("Weight breakpoints must be strictly increasing")
        if breaks[0] < -self.delta - 1e-12 or breaks[-1] > self.delta + 1e-12:
            raise ValidationError(f"Weight breakpoints leave [−Δ, Δ] = [−{self.delta}, {self.delta}]")
        if np.any(pos < 0) or np.any(neg < 0) or not (np.all(np.isfinite(pos)) and np.all(np.isfinite(neg))):
            raise ValidationError("Weight values must be finite and non-negative")
        if not 0 < self.delta_star <= self.delta:
            raise ValidationError(f"Need 0 < Δ* <= Δ, got Δ*={self.delta_star}, Δ={self.delta}")
        for name, array in (("breakpoints", breaks), ("values_pos", pos), ("values_neg", neg)):
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    def __call__(self, iota: int, s) -> np.ndarray:
        values = self.values_pos if iota == 1 else self.values_neg
        return np.interp(s, self.breakpoints, values, left=0.0, right=0.0)

    @property
    def lipschitz(self) -> float:
        slopes = [np.abs(np.diff(v)) / np.diff(self.breakpoints) for v in (self.values_pos, self.values_neg)]
        return float(max(np.max(slope) for slope in slopes))

    def min_on(self, lo: float, hi: float) -> float:
        """
        Minimum of ω over both cones on [lo, hi]; attained at a node or an endpoint.
        """
        inner = self.breakpoints[(self.breakpoints > lo) & (self.breakpoints < hi)]
        nodes = np.concatenate([[lo, hi], inner])
        return float(min(np.min(self(1, nodes)), np.min(self(-1, nodes))))

    @property
    def positive_on_core(self) -> bool:
        return self.min_on(-self.delta_star, self.delta_star) > 0

    def scaled(self, factor: float) -> "DirectionalWeight":
        return replace(self, values_pos=factor * self.values_pos, values_neg=factor * self.values_neg,
                       fit_residual=None if self.fit_residual is None else factor ** 4 * self.fit_residual)

    @classmethod
    def constant(cls, value: float, delta: float, delta_star: float = 1.0) -> "DirectionalWeight":
        breaks = np.array([-delta, delta])
        return cls(breaks, np.full(2, float(value)), np.full(2, float(value)), delta, delta_star,
                   label=f"constant({value:g})")

    @classmethod
    def ramp(cls, delta: float, delta_star: float, height: float = 1.0) -> "DirectionalWeight":
        """
        Even weight equal to `height` on [−Δ*, Δ*] falling linearly to 0 at ±Δ.
        """
        if delta == delta_star:
            return replace(cls.constant(height, delta, delta_star), label="ramp")
        breaks = np.array([-delta, -delta_star, delta_star, delta])
        values = height * np.array([0.0, 1.0, 1.0, 0.0])
        return cls(breaks, values, values, delta, delta_star, label="ramp")

    @classmethod
    def piecewise(cls, breakpoints: Sequence[float], values_pos: Sequence[float],
                  values_neg: Optional[Sequence[float]] = None, delta: float = 2.0,
                  delta_star: float = 1.0) -> "DirectionalWeight":
        neg = values_pos if values_neg is None else values_neg
        return cls(np.asarray(breakpoints, dtype=float), np.asarray(values_pos, dtype=float),
                   np.asarray(neg, dtype=float), delta, delta_star)


def _association_terms(w: DirectionalWeight, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    n1, n2 = v[..., 0], v[..., 1]
    ratio_pos = np.divide(n2, n1, out=np.full(n1.shape, np.inf), where=n1 != 0)
    ratio_neg = np.divide(n1, n2, out=np.full(n2.shape, np.inf), where=n2 != 0)
    dominant = np.maximum(np.abs(n1), np.abs(n2))
    return dominant, w(1, ratio_pos) ** 2, w(-1, ratio_neg) ** 2


def norm_from_weight(w: DirectionalWeight, n) -> np.ndarray:
    """
    Ω(n) from Ω(n)² = max{|n₁|,|n₂|}(|n₁|ω(1,n₂/n₁)² + |n₂|ω(−1,n₁/n₂)²), with ω(±1, ±∞) = 0.

    Parameters
    ----------
    w : DirectionalWeight
        The weight.
    n : array_like
        Unit vectors, trailing dimension 2.

    Returns
    -------
    numpy.ndarray
        Ω at each direction.

    Raises
    ------
    ValidationError
        If some n is not a unit vector.
    """
    n = np.asarray(n, dtype=float)
    if not np.allclose(np.hypot(n[..., 0], n[..., 1]), 1.0, atol=1e-9):
        raise ValidationError("norm_from_weight expects unit vectors")
    return _weight_norm(w, n)


def _weight_norm(w: DirectionalWeight, v: np.ndarray) -> np.ndarray:
    # homogeneous of degree two in v, so the square root is a 1-homogeneous extension off the circle
    dominant, pos, neg = _association_terms(w, v)
    return np.sqrt(dominant * (np.abs(v[..., 0]) * pos + np.abs(v[..., 1]) * neg))


@dataclass(frozen=True)
class NormCheck:
    homogeneous: bool
    positive: bool
    triangle: bool


@dataclass(frozen=True)
class AnisotropyNorm:
    """
    Positively homogeneous Ω on ℝ², evaluated on arrays with trailing dimension 2.

    `source` is "analytic", "weight" (derived by the association formula) or "fitted".
    """
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    label: str
    source: str = "analytic"
    weight: Optional[DirectionalWeight] = field(default=None, repr=False)

    def __call__(self, v) -> np.ndarray:
        return self.fn(np.asarray(v, dtype=float))

    def self_test(self, rng: np.random.Generator, samples: int = 256) -> NormCheck:
        """
        Randomized check of homogeneity, positivity on the circle and the triangle inequality.
        """
        x = rng.normal(size=(samples, 2))
        y = rng.normal(size=(samples, 2))
        lam = rng.uniform(0.1, 10.0, size=samples)
        fx, fy = self(x), self(y)
        homogeneous = bool(np.allclose(self(lam[:, None] * x), lam * fx, rtol=1e-9, atol=1e-12))
        angles = np.linspace(0.0, 2.0 * np.pi, 720, endpoint=False)
        circle = self(np.stack([np.cos(angles), np.sin(angles)], axis=-1))
        positive = bool(np.all(np.isfinite(circle)) and np.min(circle) > 0)
        triangle = bool(np.all(self(x + y) <= fx + fy + 1e-9 * (fx + fy)))
        return NormCheck(homogeneous, positive, triangle)

    def validate(self, rng: Optional[np.random.Generator] = None,
                 logger: Optional[logging.Logger] = None) -> NormCheck:
        """
        Raise unless Ω is homogeneous and positive; a failed triangle inequality is only logged.
        """
        check = self.self_test(rng if rng is not None else np.random.default_rng(0))
        if not (check.homogeneous and check.positive):
            raise ValidationError(f"Anisotropy '{self.label}' is not a positive homogeneous function: {check}")
        if not check.triangle and logger is not None:
            logger.warning(f"Anisotropy '{self.label}' violates the triangle inequality on random samples")
        return check

    def scaled(self, factor: float) -> "AnisotropyNorm":
        base = self.fn
        weight = None if self.weight is None else self.weight.scaled(factor)
        return AnisotropyNorm(lambda v: factor * base(v), f"{factor:g}*{self.label}", self.source, weight)

    def negative_directions(self, samples: int = 720) -> np.ndarray:
        """
        Unit directions where the signed association n₁ω(1,·)² + n₂ω(−1,·)² is negative.
        """
        if self.weight is None:
            return np.empty((0, 2))
        angles = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
        n = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
        dominant, pos, neg = _association_terms(self.weight, n)
        signed = dominant * (n[:, 0] * pos + n[:, 1] * neg)
        return n[signed < -1e-14]

    @classmethod
    def euclidean(cls) -> "AnisotropyNorm":
        return cls(lambda v: np.hypot(v[..., 0], v[..., 1]), "euclidean")

    @classmethod
    def l1(cls) -> "AnisotropyNorm":
        return cls(lambda v: np.abs(v[..., 0]) + np.abs(v[..., 1]), "l1")

    @classmethod
    def ellipse(cls, a: float, b: float) -> "AnisotropyNorm":
        if not (a > 0 and b > 0):
            raise ValidationError(f"Ellipse axes must be positive, got {a}, {b}")
        return cls(lambda v: np.hypot(a * v[..., 0], b * v[..., 1]), f"ellipse({a:g},{b:g})")

    @classmethod
    def from_weight(cls, w: DirectionalWeight) -> "AnisotropyNorm":
        source = "fitted" if w.fit_residual is not None else "weight"
        return cls(lambda v: _weight_norm(w, v), f"from_weight({w.label})", source, w)


# MARK: Reports
@dataclass(frozen=True)
class TameResult:
    member: bool
    margin: float
    besov: float
    dirichlet: float
    slack: float
    h1: float


@dataclass(frozen=True)
class StepMap:
    """
    T(ε) = min(1, scale·ε^power).
    """
    power: float = 0.6
    scale: float = 1.0

    def __post_init__(self):
        if not (self.power > 0 and self.scale > 0):
            raise ValidationError(f"Step map needs positive power and scale, got {self.power}, {self.scale}")

    def __call__(self, eps: float) -> float:
        return min(1.0, self.scale * eps ** self.power)


@dataclass(frozen=True)
class EnergyReport:
    """
    Energy split into elastic and potential parts.

    `infinite` marks fields outside the tame set, whose energy is +∞ by
    definition; the finite parts are still reported.
    """
    label: str
    eps: float
    elastic: float
    potential: float
    grid_n: int
    tame: bool = True
    margin: float = 0.0
    step_c: Optional[float] = None
    converged: bool = True
    metadata: Dict[str, object] = field(default_factory=dict, repr=False)

    @property
    def total(self) -> float:
        return self.elastic + self.potential

    @property
    def infinite(self) -> bool:
        return not self.tame

    def as_row(self) -> dict:
        return {
            "label": self.label,
            "eps": self.eps,
            "elastic": self.elastic,
            "potential": self.potential,
            "total": self.total,
            "tame_flag": self.tame,
            "margin": self.margin,
            "grid_n": self.grid_n,
            "step_c": self.step_c,
            "gradient_method": self.metadata.get("method", ""),
        }


def perimeter_functional(P: "Polygon", norm: AnisotropyNorm) -> float:
    """
    c·Σ Ω(outer normal)·edge length with c = 1/6.
    """
    return float(PERIMETER_CONSTANT * np.sum(norm(P.normals) * P.edge_lengths))


class Energies:
    def __init__(self, instance_id=None, workers: Optional[int] = None, transforms: Optional[Transforms] = None):
        """
        Initialize the Energies utility.

        Parameters
        ----------
        instance_id : int, optional
            The instance ID for logging purposes. If not provided, uses default logger.
        workers : int, optional
            Worker count forwarded to the transforms.
        transforms : Transforms, optional
            Shared transforms utility.
        """
        # Logging
        if instance_id:
            logger_name = f"utils.energies.instance_{instance_id}"
        else:
            logger_name = "utils.energies"
        self.logger = logging.getLogger(logger_name)
        self.transforms = transforms or Transforms(instance_id=instance_id, workers=workers)
        self.logger.info("Initialized Energies utility")

    def _check_eps(self, eps: float) -> None:
        if not eps > 0:
            self.logger.error(f"Invalid ε: {eps}")
            raise ValidationError(f"ε must be positive, got {eps}")

    # MARK: Tame set
    def tame_membership(self, f: GridField, sys: ShearletSystem, weight: DirectionalWeight,
                        norm: AnisotropyNorm, quad: Optional[QuadratureSpec] = None,
                        besov: Optional[SeminormResult] = None, route: str = "spatial",
                        method: str = "spectral") -> TameResult:
        """
        Test |f|²_{B,p} ≥ ∫Ω(∇f)² − U(|f|²_{H¹}) with the grid H¹ seminorm.

        Parameters
        ----------
        besov : SeminormResult, optional
            Precomputed Besov seminorm with the same quadrature; computed when omitted.

        Returns
        -------
        TameResult
            Membership flag and signed margin.
        """
        if besov is None:
            besov = self.transforms.besov_continuous(f, sys, weight, quad, route=route)
        dirichlet = anisotropic_dirichlet(f, norm, method=method)
        h1 = h1_seminorm_sq(f)
        u = float(slack(h1))
        margin = besov.value - (dirichlet - u)
        scale = max(besov.value, dirichlet, 1.0)
        return TameResult(margin >= -1e-12 * scale, margin, besov.value, dirichlet, u, h1)

    # MARK: Energies
    def gl_energy(self, f: GridField, eps: float, norm: AnisotropyNorm, method: str = "spectral",
                  label: str = "gl") -> EnergyReport:
        """
        GL_ε^Ω(f) = ε∫Ω(∇f)² + (1/4ε)∫W(f).
        """
        self._check_eps(eps)
        elastic = eps * anisotropic_dirichlet(f, norm, method=method)
        return EnergyReport(label, eps, elastic, potential_term(f, eps), f.n,
                            metadata={"norm": norm.label, "method": method})

    def sgl_energy(self, f: GridField, eps: float, sys: ShearletSystem, weight: DirectionalWeight,
                   norm: AnisotropyNorm, quad: Optional[QuadratureSpec] = None, route: str = "spatial",
                   label: str = "sgl", method: str = "spectral") -> EnergyReport:
        """
        Shearlet-based energy ε|f|²_{B,p} + (1/4ε)∫W(f), flagged infinite outside the tame set.
        """
        self._check_eps(eps)
        besov = self.transforms.besov_continuous(f, sys, weight, quad, route=route)
        tame = self.tame_membership(f, sys, weight, norm, quad, besov=besov, method=method)
        if not tame.member:
            self.logger.info(f"{label}: field outside the tame set (margin {tame.margin:.6g})")
        return EnergyReport(label, eps, eps * besov.value, potential_term(f, eps), f.n, tame.member,
                            tame.margin, converged=besov.converged,
                            metadata={"route": route, "method": method,
                                      "resolution_ceiling": besov.resolution_ceiling})

    def dsgl_energy(self, f: GridField, eps: float, sys: ShearletSystem, weight: DirectionalWeight,
                    norm: AnisotropyNorm, step_map: StepMap, quad: Optional[QuadratureSpec] = None,
                    label: str = "dsgl", method: str = "spectral") -> EnergyReport:
        """
        Discrete energy ε|f|²_{DB,T(ε)} + (1/4ε)∫W(f); the tame test uses the continuous seminorm.
        """
        self._check_eps(eps)
        c = step_map(eps)
        if not 0 < c <= 1:
            raise ValidationError(f"Step T(ε) = {c} outside (0, 1]")
        discrete = self.transforms.besov_discrete_streamed(f, sys, weight, c)
        tame = self.tame_membership(f, sys, weight, norm, quad, method=method)
        return EnergyReport(label, eps, eps * discrete.value, potential_term(f, eps), f.n, tame.member,
                            tame.margin, step_c=c, metadata={"method": method})

    # MARK: Association
    def weight_from_norm(self, target: AnisotropyNorm, delta: float, delta_star: float, knots: int = 33,
                         reg: float = 1e-8, samples: int = 720) -> DirectionalWeight:
        """
        Fit a piecewise-linear weight whose associated norm reproduces `target`.

        Parameters
        ----------
        target : AnisotropyNorm
            Norm to reproduce.
        delta, delta_star : float
            Shear ranges of the weight.
        knots : int
            Equispaced breakpoints on [−Δ, Δ] per cone.
        reg : float
            Ridge strength toward the constant weight of matching scale.
        samples : int
            Number of unit directions in the fit.

        Returns
        -------
        DirectionalWeight
            Non-negative fitted weight; `fit_residual` is Σ(Ω_ω(n)² − Ω(n)²)² over the samples.
        """
        target.validate(logger=self.logger)
        angles = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
        n = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
        goal = target(n) ** 2
        scale = math.sqrt(float(np.mean(goal)))
        breaks = np.linspace(-delta, delta, knots)
        ridge = math.sqrt(reg) * scale

        def weight_of(x: np.ndarray) -> DirectionalWeight:
            return DirectionalWeight(breaks, x[:knots], x[knots:], delta, delta_star, label="fitted")

        def residuals(x: np.ndarray) -> np.ndarray:
            fitted = _weight_norm(weight_of(x), n) ** 2
            return np.concatenate([fitted - goal, ridge * (x - scale)])

        result = optimize.least_squares(residuals, np.full(2 * knots, scale), bounds=(0.0, np.inf),
                                        xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=2000)
        fitted = weight_of(np.maximum(result.x, 0.0))
        misfit = _weight_norm(fitted, n) ** 2 - goal
        residual = float(np.sum(misfit ** 2))
        worst = float(np.max(np.abs(np.sqrt(goal + misfit) - np.sqrt(goal)) / np.sqrt(goal)))
        self.logger.info(f"Fitted weight for '{target.label}': residual {residual:.3e}, "
                         f"max relative Ω error {worst:.3e}")
        if worst > 0.01:
            self.logger.warning(f"Association for '{target.label}' not attained within 1% (max {worst:.2%})")
        if not fitted.positive_on_core:
            self.logger.warning("Fitted weight vanishes somewhere on [−Δ*, Δ*]")
        return replace(fitted, fit_residual=residual)
