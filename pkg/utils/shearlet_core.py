# Shearlet generators, cone geometry and Fourier-domain evaluation of system elements
# Computes admissibility constants, the shearlet part of the H¹ multiplier and frame-bound estimates

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Optional, Sequence, Tuple, TYPE_CHECKING
import logging
import math

import numpy as np
from scipy import integrate

from utils.errors import AdmissibilityError, FrameBoundError, ParameterRangeError, ValidationError

if TYPE_CHECKING:
    from utils.energies import DirectionalWeight

# a and −a give the same element for even generators; every a-integral counts both signs
DILATION_SIGNS = 2.0

# exponent of a in the (a, s) density after the t-integral has been taken in frequency
DENSITY_POWERS = {
    "besov": -3.5,
    "bessel": -1.5,
}


def smoothstep(x: np.ndarray) -> np.ndarray:
    """
    C⁴ transition ν with ν = 0 on (−∞, 0], ν = 1 on [1, ∞) and ν(x) + ν(1 − x) = 1.
    """
    x = np.clip(x, 0.0, 1.0)
    return x ** 5 * (126.0 - 420.0 * x + 540.0 * x ** 2 - 315.0 * x ** 3 + 70.0 * x ** 4)


def meyer_scaling_profile(xi: np.ndarray) -> np.ndarray:
    r = np.abs(xi)
    return np.cos(0.5 * np.pi * smoothstep(2.0 * r - 1.0))


def meyer_wavelet_profile(xi: np.ndarray) -> np.ndarray:
    r = np.abs(xi)
    return np.sin(0.5 * np.pi * smoothstep(8.0 * r - 1.0)) * np.cos(0.5 * np.pi * smoothstep(2.0 * r - 1.0))


def gauss_segments(breaks: Sequence[float], nodes_per_segment: int = 48) -> Tuple[np.ndarray, np.ndarray]:
    """
    Composite Gauss–Legendre rule over consecutive breakpoints.
    """
    ref_nodes, ref_weights = np.polynomial.legendre.leggauss(nodes_per_segment)
    nodes, weights = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi <= lo:
            continue
        half = 0.5 * (hi - lo)
        nodes.append(lo + half * (ref_nodes + 1.0))
        weights.append(half * ref_weights)
    return np.concatenate(nodes), np.concatenate(weights)


@dataclass(frozen=True)
class GeneratorProfile:
    """
    Separable generator ψ̂(ξ) = normalization·ψ̂¹(ξ₁)·φ̂¹(ξ₂).

    `band` is the support of ψ̂¹ in |ξ| when it is band-limited; the breakpoint
    tuples list where the profiles change formula and split the quadratures.
    """
    psi1_hat: Callable[[np.ndarray], np.ndarray]
    phi1_hat: Callable[[np.ndarray], np.ndarray]
    decay_M: int = 4
    decay_L: int = 4
    normalization: float = 1.0
    band: Optional[Tuple[float, float]] = None
    psi_breakpoints: Tuple[float, ...] = ()
    phi_breakpoints: Tuple[float, ...] = ()
    frequency_extent: float = 1.0
    label: str = "custom"

    def __post_init__(self):
        if self.decay_M < 1 or self.decay_L < 1:
            raise ValidationError("Decay exponents must be positive integers")
        if not self.normalization > 0:
            raise ValidationError(f"Normalization must be positive, got {self.normalization}")

    def psi_hat(self, eta1: np.ndarray, eta2: np.ndarray) -> np.ndarray:
        return self.normalization * self.psi1_hat(eta1) * self.phi1_hat(eta2)

    def scaled(self, factor: float) -> "GeneratorProfile":
        return replace(self, normalization=self.normalization * factor)

    def decay_constants(self, radius: float = 64.0, samples: int = 20001) -> Tuple[float, float]:
        """
        Sampled constants C of |φ̂¹| ≤ C(1+|ξ|)^{−L} and |ψ̂¹| ≤ C·min(|ξ|,1)^M/(1+|ξ|)^L.
        """
        xi = np.linspace(-radius, radius, samples)
        xi = xi[xi != 0.0]
        growth = (1.0 + np.abs(xi)) ** self.decay_L
        c_phi = float(np.max(np.abs(self.phi1_hat(xi)) * growth))
        moments = np.minimum(np.abs(xi), 1.0) ** self.decay_M
        c_psi = float(np.max(np.abs(self.psi1_hat(xi)) * growth / moments))
        return c_psi, c_phi

    def phi_energy(self) -> float:
        """
        ∫|φ̂¹|² over ℝ by composite Gauss–Legendre.
        """
        ext = self.frequency_extent
        inner = [b for b in self.phi_breakpoints if 0 < b < ext]
        breaks = sorted({-ext, *(-b for b in inner), 0.0, *inner, ext})
        nodes, weights = gauss_segments(breaks)
        return float(np.sum(weights * np.abs(self.phi1_hat(nodes)) ** 2))

    @classmethod
    def meyer(cls) -> "GeneratorProfile":
        """
        Default band-limited generator with ψ̂¹ supported in 1/8 ≤ |ξ| ≤ 1 and φ̂¹ in |ξ| ≤ 1.

        The normalization makes ∫|ψ̂(ξ)|²/|ξ₁|⁴ dξ = (2π)².
        """
        psi_breaks = (0.125, 0.25, 0.5, 1.0)
        raw = cls(
            psi1_hat=meyer_wavelet_profile,
            phi1_hat=meyer_scaling_profile,
            band=(0.125, 1.0),
            psi_breakpoints=psi_breaks,
            phi_breakpoints=(0.5, 1.0),
            label="meyer",
        )
        psi_moment = 0.0
        for lo, hi in zip(psi_breaks[:-1], psi_breaks[1:]):
            value, _ = integrate.quad(lambda b: meyer_wavelet_profile(b) ** 2 / b ** 4, lo, hi,
                                      epsabs=0.0, epsrel=1e-13, limit=200)
            psi_moment += 2.0 * value
        phi_moment = 0.0
        for lo, hi in ((0.0, 0.5), (0.5, 1.0)):
            value, _ = integrate.quad(lambda b: meyer_scaling_profile(b) ** 2, lo, hi,
                                      epsabs=0.0, epsrel=1e-13, limit=200)
            phi_moment += 2.0 * value
        return raw.scaled(2.0 * math.pi / math.sqrt(psi_moment * phi_moment))


def default_low_pass(phi1_hat: Callable[[np.ndarray], np.ndarray]) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """
    K̂(ξ) = 2π|ξ|·φ̂¹(|ξ|/2): equals 2π|ξ| on [−1, 1]² and vanishes beyond |ξ| = 2.
    """
    def low_pass(xi1: np.ndarray, xi2: np.ndarray) -> np.ndarray:
        r = np.hypot(xi1, xi2)
        return 2.0 * np.pi * r * phi1_hat(0.5 * r)
    return low_pass


@dataclass(frozen=True)
class ShearletSystem:
    generator: GeneratorProfile
    gamma: float = 2.0
    delta: float = 2.0
    gamma_star: float = 1.0
    delta_star: float = 1.0
    low_pass_hat: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    support_radius: float = 0.25

    def __post_init__(self):
        if not (self.gamma_star > 0 and self.delta_star > 0):
            raise ValidationError("Γ* and Δ* must be positive")
        if self.gamma < self.gamma_star or self.delta < self.delta_star:
            raise ValidationError(
                f"Need Γ ≥ Γ* and Δ ≥ Δ*, got Γ={self.gamma}, Γ*={self.gamma_star}, "
                f"Δ={self.delta}, Δ*={self.delta_star}")
        if not self.support_radius > 0:
            raise ValidationError(f"Support radius must be positive, got {self.support_radius}")
        if self.low_pass_hat is None:
            object.__setattr__(self, "low_pass_hat", default_low_pass(self.generator.phi1_hat))

    @classmethod
    def default(cls, **overrides) -> "ShearletSystem":
        return cls(generator=overrides.pop("generator", GeneratorProfile.meyer()), **overrides)

    def check_parameters(self, a: float, s: float, iota: int) -> None:
        if iota not in (-1, 1):
            raise ParameterRangeError(f"Cone flag must be ±1, got {iota}")
        if not 0 < a <= self.gamma:
            raise ParameterRangeError(f"Scale a={a} outside (0, {self.gamma}]")
        if abs(s) > self.delta + 1e-12:
            raise ParameterRangeError(f"Shear s={s} outside [−{self.delta}, {self.delta}]")

    def low_pass(self, xi1: np.ndarray, xi2: np.ndarray) -> np.ndarray:
        return self.low_pass_hat(np.asarray(xi1, dtype=float), np.asarray(xi2, dtype=float))


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    coarse: np.ndarray


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Node counts for the (a, s) integrals.

    Scales use a trapezoid rule in log a; shears a uniform trapezoid on [−Δ, Δ].
    Both rules have an even number of intervals so dropping every other node
    gives the coarse companion used for the refinement check.
    """
    nodes_per_octave: int = 64
    shear_nodes: int = 65
    refinement_tol: float = 0.02
    chunk_rows: int = 1 << 15

    def __post_init__(self):
        if self.nodes_per_octave < 2:
            raise ValidationError("Need at least two scale nodes per octave")
        if self.shear_nodes < 3 or self.shear_nodes % 2 == 0:
            raise ValidationError(f"Shear node count must be odd and >= 3, got {self.shear_nodes}")

    def scale_rule(self, a_min: float, a_max: float) -> QuadratureRule:
        if not 0 < a_min < a_max:
            raise ValidationError(f"Invalid scale range [{a_min}, {a_max}]")
        intervals = max(2, math.ceil(math.log2(a_max / a_min) * self.nodes_per_octave))
        intervals += intervals % 2
        log_nodes = np.linspace(math.log(a_min), math.log(a_max), intervals + 1)
        nodes = np.exp(log_nodes)
        step = log_nodes[1] - log_nodes[0]
        weights, coarse = _trapezoid_pair(intervals, step)
        return QuadratureRule(nodes, weights * nodes, coarse * nodes)

    def shear_rule(self, lo: float, hi: float) -> QuadratureRule:
        intervals = self.shear_nodes - 1
        nodes = np.linspace(lo, hi, self.shear_nodes)
        weights, coarse = _trapezoid_pair(intervals, (hi - lo) / intervals)
        return QuadratureRule(nodes, weights, coarse)


def _trapezoid_pair(intervals: int, step: float) -> Tuple[np.ndarray, np.ndarray]:
    weights = np.full(intervals + 1, step)
    weights[[0, -1]] = 0.5 * step
    coarse = np.zeros(intervals + 1)
    coarse[::2] = 2.0 * step
    coarse[[0, -1]] = step
    return weights, coarse


@dataclass(frozen=True)
class SymbolResult:
    """
    Shearlet multiplier values at a set of frequencies.

    `cones` holds the contribution of each cone; `values` is their sum.
    """
    values: np.ndarray
    cones: Dict[int, np.ndarray] = field(repr=False)
    disagreement: float
    converged: bool
    a_min: float


@dataclass(frozen=True)
class FrameBounds:
    a_est: float
    b_est: float
    annulus: Tuple[float, float]
    samples: int
    converged: bool


def fourier_element(sys: ShearletSystem, a: float, s: float, t: Sequence[float], iota: int,
                    xi: np.ndarray) -> np.ndarray:
    """
    Fourier transform of the cone-adapted element ψ_{a,s,t,ι} at the frequencies xi.

    Parameters
    ----------
    sys : ShearletSystem
        The system supplying the generator and the admissible parameter ranges.
    a, s : float
        Scale in (0, Γ] and shear in [−Δ, Δ].
    t : sequence of float
        Translation.
    iota : int
        Cone flag; −1 swaps the roles of the coordinates.
    xi : numpy.ndarray
        Frequencies with trailing dimension 2.

    Returns
    -------
    numpy.ndarray
        a^{3/4}ψ̂(aξ₁, √a(ξ₂+sξ₁))e^{−2πi⟨ξ,t⟩} for ι = 1, the swapped analogue for ι = −1.

    Raises
    ------
    ParameterRangeError
        If (a, s, ι) is outside the admissible range.
    """
    sys.check_parameters(a, s, iota)
    xi = np.asarray(xi, dtype=float)
    x1, x2 = xi[..., 0], xi[..., 1]
    magnitude = element_profile(sys, a, s, iota, x1, x2)
    return magnitude * np.exp(-2j * np.pi * (x1 * t[0] + x2 * t[1]))


def element_profile(sys: ShearletSystem, a: float, s: float, iota: int,
                    xi1: np.ndarray, xi2: np.ndarray) -> np.ndarray:
    """
    ψ̂_{a,s,0,ι} at (xi1, xi2) without the translation phase; parameters are not re-checked.
    """
    u, v = (xi1, xi2) if iota == 1 else (xi2, xi1)
    return a ** 0.75 * sys.generator.psi_hat(a * u, math.sqrt(a) * (v + s * u))


class ShearletCore:
    def __init__(self, instance_id=None, workers: Optional[int] = None):
        """
        Initialize the ShearletCore utility.

        Parameters
        ----------
        instance_id : int, optional
            The instance ID for logging purposes. If not provided, uses default logger.
        workers : int, optional
            Size of the thread pool used for the scale-node slabs.
        """
        # Logging
        if instance_id:
            logger_name = f"utils.shearlet_core.instance_{instance_id}"
        else:
            logger_name = "utils.shearlet_core"
        self.logger = logging.getLogger(logger_name)
        self.workers = max(1, int(workers or 1))
        self.logger.info("Initialized ShearletCore utility")

    # MARK: Admissibility
    def admissibility_constant(self, gen: GeneratorProfile, rule: str = "gauss",
                               cutoff: float = 1e-6, settle_tol: float = 1e-3) -> float:
        """
        C_ψ = ∫|ψ̂(ξ)|²/|ξ₁|² dξ.

        Parameters
        ----------
        gen : GeneratorProfile
            Generator to test.
        rule : str
            "gauss" (composite Gauss–Legendre in log|ξ₁| and ξ₂) or
            "trapezoid" (log-trapezoid in |ξ₁|, trapezoid in ξ₂).
        cutoff : float
            Relative lower cutoff of |ξ₁|.
        settle_tol : float
            Allowed relative change when the cutoff is lowered from 10⁻⁴ to `cutoff`.

        Returns
        -------
        float
            The constant; 0 for the zero generator.

        Raises
        ------
        AdmissibilityError
            If the value keeps moving as the cutoff approaches zero.
        """
        if rule not in ("gauss", "trapezoid"):
            raise ValidationError(f"Unknown quadrature rule '{rule}'")
        evaluate = self._moment_gauss if rule == "gauss" else self._moment_trapezoid
        fine = evaluate(gen, 2, cutoff * gen.frequency_extent)
        if fine == 0.0:
            return 0.0
        coarse = evaluate(gen, 2, 1e-4 * gen.frequency_extent)
        if not np.isfinite(fine) or abs(fine - coarse) > settle_tol * abs(fine):
            self.logger.error(f"Admissibility integral does not settle: {coarse} -> {fine}")
            raise AdmissibilityError(
                f"Generator '{gen.label}' is not admissible: cutoff refinement moved C_ψ from {coarse} to {fine}")
        return float(fine)

    def normalization_integral(self, gen: GeneratorProfile) -> float:
        """
        ∫|ψ̂(ξ)|²/|ξ₁|⁴ dξ, which equals (2π)² for a normalized generator.
        """
        return self._moment_gauss(gen, 4, 1e-6 * gen.frequency_extent)

    def _moment_gauss(self, gen: GeneratorProfile, power: int, lower: float) -> float:
        ext = gen.frequency_extent
        log_breaks = sorted({math.log(lower), math.log(ext),
                             *(math.log(b) for b in gen.psi_breakpoints if lower < b < ext)})
        u, wu = gauss_segments(log_breaks, 64)
        xi1 = np.exp(u)
        inner = [b for b in gen.phi_breakpoints if 0 < b < ext]
        xi2, w2 = gauss_segments(sorted({-ext, *(-b for b in inner), 0.0, *inner, ext}), 64)
        total = 0.0
        for sign in (1.0, -1.0):
            values = np.abs(gen.psi_hat(sign * xi1[:, None], xi2[None, :])) ** 2
            total += float(np.sum((wu * xi1 ** (1 - power))[:, None] * values * w2[None, :]))
        return total

    def _moment_trapezoid(self, gen: GeneratorProfile, power: int, lower: float,
                          nodes: int = 8193, shear_nodes: int = 2049) -> float:
        ext = gen.frequency_extent
        u = np.linspace(math.log(lower), math.log(ext), nodes)
        wu = np.full(nodes, u[1] - u[0])
        wu[[0, -1]] *= 0.5
        xi1 = np.exp(u)
        xi2 = np.linspace(-ext, ext, shear_nodes)
        w2 = np.full(shear_nodes, xi2[1] - xi2[0])
        w2[[0, -1]] *= 0.5
        total = 0.0
        for start in range(0, nodes, 512):
            block = slice(start, start + 512)
            for sign in (1.0, -1.0):
                values = np.abs(gen.psi_hat(sign * xi1[block, None], xi2[None, :])) ** 2
                total += float(np.sum((wu[block] * xi1[block] ** (1 - power))[:, None] * values * w2[None, :]))
        return total

    # MARK: Multipliers
    def default_a_min(self, gen: GeneratorProfile, max_frequency: float) -> float:
        """
        Smallest scale at which an element still sees |ξ| ≤ max_frequency.
        """
        lower = gen.band[0] if gen.band else 1e-3
        if max_frequency <= 0:
            return lower
        return lower / max_frequency

    def symbol(self, sys: ShearletSystem, weight: "DirectionalWeight", xi1: np.ndarray, xi2: np.ndarray,
               quad: QuadratureSpec, density: str = "besov", a_min: Optional[float] = None,
               a_max: Optional[float] = None, cones: Sequence[int] = (1, -1)) -> SymbolResult:
        """
        Shearlet part of the multiplier, Σ_ι ∫∫ ω(ι,s)² a^{p}|ψ̂(A_a S_s ξ)|² ds da.

        Parameters
        ----------
        sys : ShearletSystem
            The system.
        weight : DirectionalWeight
            Directional weight ω.
        xi1, xi2 : numpy.ndarray
            Frequencies (broadcastable).
        quad : QuadratureSpec
            Node counts.
        density : str
            "besov" (p = −7/2, the seminorm) or "bessel" (p = −3/2).
        a_min, a_max : float, optional
            Scale range; a_max is capped at Γ and a_min defaults to the resolution floor.
        cones : sequence of int
            Cones to include.

        Returns
        -------
        SymbolResult
            Values, per-cone parts and the refinement check.
        """
        if density not in DENSITY_POWERS:
            raise ValidationError(f"Unknown density '{density}'")
        x1, x2 = np.broadcast_arrays(np.asarray(xi1, dtype=float), np.asarray(xi2, dtype=float))
        shape = x1.shape
        x1, x2 = x1.ravel(), x2.ravel()
        gen = sys.generator
        top = sys.gamma if a_max is None else min(a_max, sys.gamma)
        if a_min is None:
            a_min = self.default_a_min(gen, float(np.max(np.abs(np.concatenate([x1, x2])), initial=0.0)))
        a_min = min(a_min, 0.5 * top)
        rule_a = quad.scale_rule(a_min, top)
        rule_s = quad.shear_rule(-sys.delta, sys.delta)
        factor = DILATION_SIGNS * gen.normalization ** 2
        power = DENSITY_POWERS[density]

        fine_total = np.zeros(x1.size)
        coarse_total = np.zeros(x1.size)
        per_cone = {}
        for iota in cones:
            u, v = (x1, x2) if iota == 1 else (x2, x1)
            omega_sq = np.asarray(weight(iota, rule_s.nodes), dtype=float) ** 2
            fine, coarse = self._cone_sum(gen, u, v, rule_a, rule_s, omega_sq, power, quad.chunk_rows)
            per_cone[iota] = (factor * fine).reshape(shape)
            fine_total += factor * fine
            coarse_total += factor * coarse

        peak = float(np.max(np.abs(fine_total), initial=0.0))
        disagreement = float(np.max(np.abs(fine_total - coarse_total)) / peak) if peak > 0 else 0.0
        converged = disagreement <= quad.refinement_tol
        if not converged:
            self.logger.warning(f"Quadrature refinement disagreement {disagreement:.3%} above "
                                f"{quad.refinement_tol:.0%}")
        return SymbolResult(fine_total.reshape(shape), per_cone, disagreement, converged, a_min)

    def _cone_sum(self, gen: GeneratorProfile, u: np.ndarray, v: np.ndarray, rule_a: QuadratureRule,
                  rule_s: QuadratureRule, omega_sq: np.ndarray, power: float,
                  chunk_rows: int) -> Tuple[np.ndarray, np.ndarray]:
        order = np.argsort(np.abs(u), kind="stable")
        sorted_abs = np.abs(u)[order]
        lo, hi = gen.band if gen.band else (0.0, np.inf)
        s_fine = omega_sq * rule_s.weights
        s_coarse = omega_sq * rule_s.coarse

        def run(slab: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
            fine = np.zeros(u.size)
            coarse = np.zeros(u.size)
            for i in slab:
                a = rule_a.nodes[i]
                start = np.searchsorted(sorted_abs, lo / a, side="left")
                stop = np.searchsorted(sorted_abs, hi / a, side="right")
                if start >= stop:
                    continue
                active = order[start:stop]
                radial = np.abs(gen.psi1_hat(a * u[active])) ** 2 * a ** power
                root = math.sqrt(a)
                for first in range(0, active.size, chunk_rows):
                    rows = active[first:first + chunk_rows]
                    sheared = root * (v[rows, None] + rule_s.nodes[None, :] * u[rows, None])
                    profile = np.abs(gen.phi1_hat(sheared)) ** 2
                    part = radial[first:first + chunk_rows]
                    fine[rows] += rule_a.weights[i] * part * (profile @ s_fine)
                    if rule_a.coarse[i] != 0.0:
                        coarse[rows] += rule_a.coarse[i] * part * (profile @ s_coarse)
            return fine, coarse

        slabs = [slab for slab in np.array_split(np.arange(rule_a.nodes.size), self.workers) if slab.size]
        if len(slabs) == 1:
            return run(slabs[0])
        with ThreadPoolExecutor(max_workers=len(slabs)) as pool:
            parts = list(pool.map(run, slabs))
        fine = np.zeros(u.size)
        coarse = np.zeros(u.size)
        for part_fine, part_coarse in parts:
            fine += part_fine
            coarse += part_coarse
        return fine, coarse

    def homogeneous_symbol(self, sys: ShearletSystem, xi1: np.ndarray, xi2: np.ndarray,
                           quad: QuadratureSpec) -> np.ndarray:
        """
        Multiplier of the homogeneous transform: all a > 0 and all shears s ∈ ℝ, single cone, no weight.

        The shear integral is taken after the substitution u = √a(ξ₂ + sξ₁), which
        maps the whole real line onto the support of φ̂¹.
        """
        gen = sys.generator
        x1 = np.abs(np.asarray(xi1, dtype=float))
        out = np.zeros(np.broadcast(x1, np.asarray(xi2)).shape)
        x1 = np.broadcast_to(x1, out.shape)
        nonzero = x1 > 0
        if not np.any(nonzero):
            return out
        lo, hi = gen.band if gen.band else (1e-4, gen.frequency_extent)
        rule_a = quad.scale_rule(lo / float(np.max(x1[nonzero])), hi / float(np.min(x1[nonzero])))
        shear_integral = gen.phi_energy()
        values = np.zeros(int(np.count_nonzero(nonzero)))
        k = x1[nonzero]
        for a, w in zip(rule_a.nodes, rule_a.weights):
            values += w * a ** -1.5 * np.abs(gen.psi1_hat(a * k)) ** 2 * shear_integral / (math.sqrt(a) * k)
        out[nonzero] = DILATION_SIGNS * gen.normalization ** 2 * values
        return out

    def h1_multiplier(self, sys: ShearletSystem, weight: "DirectionalWeight", xi: np.ndarray,
                      quad: Optional[QuadratureSpec] = None) -> np.ndarray:
        """
        |K̂(ξ)|² plus the shearlet part of the multiplier at the frequencies xi (trailing dimension 2).
        """
        xi = np.asarray(xi, dtype=float)
        quad = quad or QuadratureSpec()
        shearlet = self.symbol(sys, weight, xi[..., 0], xi[..., 1], quad)
        return np.abs(sys.low_pass(xi[..., 0], xi[..., 1])) ** 2 + shearlet.values

    def frame_bounds(self, sys: ShearletSystem, weight: "DirectionalWeight",
                     annulus: Tuple[float, float] = (1.0, 64.0), samples: int = 64,
                     quad: Optional[QuadratureSpec] = None) -> FrameBounds:
        """
        Estimate the frame bounds as the extremes of multiplier(ξ)/|ξ|² over a polar scan.

        Parameters
        ----------
        annulus : tuple of float
            Radii (r_lo, r_hi) of the scanned annulus, r_lo > 0.
        samples : int
            Number of radii; twice as many angles cover the full circle.

        Returns
        -------
        FrameBounds
            (A_est, B_est) with the quadrature refinement flag.

        Raises
        ------
        FrameBoundError
            If A_est is not positive within tolerance.
        """
        r_lo, r_hi = annulus
        if not 0 < r_lo < r_hi:
            raise ValidationError(f"Invalid annulus {annulus}")
        quad = quad or QuadratureSpec()
        radii = np.geomspace(r_lo, r_hi, samples)
        angles = np.linspace(0.0, 2.0 * np.pi, 2 * samples, endpoint=False)
        xi1 = radii[:, None] * np.cos(angles)[None, :]
        xi2 = radii[:, None] * np.sin(angles)[None, :]
        shearlet = self.symbol(sys, weight, xi1, xi2, quad)
        multiplier = np.abs(sys.low_pass(xi1, xi2)) ** 2 + shearlet.values
        ratio = multiplier / (xi1 ** 2 + xi2 ** 2)
        a_est, b_est = float(np.min(ratio)), float(np.max(ratio))
        self.logger.info(f"Frame bounds over annulus {annulus}: A_est={a_est:.6g}, B_est={b_est:.6g}")
        if not a_est > 1e-12 * max(b_est, 1.0):
            self.logger.error(f"Lower frame bound estimate is not positive: {a_est}")
            raise FrameBoundError(f"Lower frame bound estimate {a_est} is not positive; check generator and weight")
        return FrameBounds(a_est, b_est, (r_lo, r_hi), samples, shearlet.converged)
