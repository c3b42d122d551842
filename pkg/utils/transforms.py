# Periodized shearlet coefficients and the shearlet-based Besov seminorms
# Continuous quadrature (periodic and box-restricted), the discrete coefficient set with its
# rounding operators and index sets, the Bessel check and the homogeneous isometry energy

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, TYPE_CHECKING
import logging
import math

import numpy as np
import pandas as pd
from scipy import fft

from utils.errors import ParameterRangeError, SupportLeakError, ValidationError
from utils.grid_field import GridField, l2_norm_sq, raw_coefficients
from utils.shearlet_core import (
    DILATION_SIGNS, QuadratureRule, QuadratureSpec, ShearletCore, ShearletSystem, element_profile,
)

if TYPE_CHECKING:
    from utils.energies import DirectionalWeight

# the discrete sum is a Riemann sum in j for a = 2^{−j}, so da/a = ln 2·dj
DISCRETE_MEASURE = DILATION_SIGNS * math.log(2.0)

LEAK_THRESHOLD = 1e-8
_FLOOR_GUARD = 1e-9


@dataclass(frozen=True)
class SeminormResult:
    name: str
    value: float
    tolerance: float
    converged: bool
    resolution_ceiling: float
    components: Dict[int, float] = field(default_factory=dict)

    def as_row(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "tolerance": self.tolerance,
            "converged": self.converged,
            "resolution_ceiling": self.resolution_ceiling,
        }


@dataclass(frozen=True)
class BesselReport:
    energy: float
    ratio: float
    bound: float
    within: bool
    zero_field: bool


@dataclass(frozen=True)
class CoefficientBlock:
    """
    Coefficients of one (ι, j, k) on the lattice m1 × m2 (values[p, q] at (m1[p], m2[q])).
    """
    iota: int
    j: float
    k: float
    m1: np.ndarray = field(repr=False)
    m2: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.values.size)

    def energy(self) -> float:
        return float(2.0 ** (2.0 * self.j) * np.sum(self.values ** 2))


@dataclass(frozen=True)
class CoefficientSet:
    """
    Discrete shearlet coefficients for step c, indexed by (ι, j, k, m).

    `resolution_ceiling` is the largest scale index the grid resolves; finer
    scales are truncated.
    """
    c: float
    gamma: float
    delta: float
    resolution_ceiling: float
    blocks: Tuple[CoefficientBlock, ...] = field(repr=False, default=())

    def __post_init__(self):
        if not self.c > 0:
            raise ValidationError(f"Step c must be positive, got {self.c}")
        j0 = -math.log2(self.gamma)
        for block in self.blocks:
            steps = (block.j - j0) / self.c
            if steps < -_FLOOR_GUARD or abs(steps - round(steps)) > 1e-7:
                raise ValidationError(f"Scale index {block.j} is not in cℕ₀ − log₂Γ")
            shifts = (block.k + self.delta) / self.c
            if abs(shifts - round(shifts)) > 1e-7 or abs(block.k) > 2.0 ** (block.j / 2) * self.delta + 1e-9:
                raise ValidationError(f"Shear index {block.k} is not in K_(j,c) for j={block.j}")

    @property
    def entry_count(self) -> int:
        return sum(block.size for block in self.blocks)

    def to_frame(self) -> pd.DataFrame:
        frames = []
        for block in self.blocks:
            m1, m2 = np.meshgrid(block.m1, block.m2, indexing="ij")
            frames.append(pd.DataFrame({
                "iota": block.iota,
                "j": block.j,
                "k": block.k,
                "m1": m1.ravel(),
                "m2": m2.ravel(),
                "value": block.values.ravel(),
            }))
        if not frames:
            return pd.DataFrame(columns=["iota", "j", "k", "m1", "m2", "value"])
        return pd.concat(frames, ignore_index=True)


# MARK: Rounding operators and index sets
def round_scale(x: float, c: float, gamma: float) -> float:
    """
    [x]_c = max{x* ∈ cℕ₀ − log₂Γ : x* ≤ max(−log₂Γ, x)}.
    """
    if not c > 0:
        raise ValidationError(f"Step c must be positive, got {c}")
    j0 = -math.log2(gamma)
    steps = math.floor((max(j0, x) - j0) / c + _FLOOR_GUARD)
    return j0 + steps * c


def round_shear(x: float, j: float, c: float, delta: float) -> float:
    """
    [x]_{j,c} = max{x* ∈ K_{j,c} : x* ≤ x} with K_{j,c} = {k ∈ −Δ + cℤ : |k| ≤ 2^{j/2}Δ}.
    """
    if not c > 0:
        raise ValidationError(f"Step c must be positive, got {c}")
    bound = 2.0 ** (j / 2.0) * delta
    if abs(x) > bound + _FLOOR_GUARD:
        raise ParameterRangeError(f"|x| = {abs(x)} exceeds 2^(j/2)Δ = {bound}")
    candidate = -delta + math.floor((x + delta) / c + _FLOOR_GUARD) * c
    if candidate < -bound - _FLOOR_GUARD:
        raise ParameterRangeError(f"No shear index of K_(j,c) lies below {x}")
    return candidate


def scale_indices(c: float, gamma: float, ceiling: float) -> np.ndarray:
    """
    J_c ∩ [−log₂Γ, ceiling].
    """
    if not c > 0:
        raise ValidationError(f"Step c must be positive, got {c}")
    j0 = -math.log2(gamma)
    if ceiling < j0:
        raise ValidationError(f"Empty scale index set: ceiling {ceiling} below {j0}")
    count = math.floor((ceiling - j0) / c + _FLOOR_GUARD) + 1
    return j0 + c * np.arange(count)


def shear_indices(j: float, c: float, delta: float) -> np.ndarray:
    bound = 2.0 ** (j / 2.0) * delta
    lowest = math.ceil((delta - bound) / c - _FLOOR_GUARD)
    highest = math.floor((delta + bound) / c + _FLOOR_GUARD)
    return -delta + c * np.arange(lowest, highest + 1)


def translation_lattice(j: float, c: float, iota: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Lattice c·diag(2^{−j}, 2^{−j/2})ℤ² ∩ [0, 1]² (axes swapped for ι = −1).
    """
    long_step = c * 2.0 ** (-j)
    short_step = c * 2.0 ** (-j / 2.0)
    long_axis = long_step * np.arange(math.floor(1.0 / long_step + _FLOOR_GUARD) + 1)
    short_axis = short_step * np.arange(math.floor(1.0 / short_step + _FLOOR_GUARD) + 1)
    return (long_axis, short_axis) if iota == 1 else (short_axis, long_axis)


def scale_ceiling(n: int, sys: ShearletSystem) -> float:
    """
    Finest scale index the unit-torus grid of side n resolves.
    """
    lower = sys.generator.band[0] if sys.generator.band else 1e-3
    return math.log2(n / (2.0 * lower))


def count_entries(n: int, c: float, sys: ShearletSystem) -> int:
    total = 0
    for iota in (1, -1):
        for j in scale_indices(c, sys.gamma, scale_ceiling(n, sys)):
            m1, m2 = translation_lattice(j, c, iota)
            total += shear_indices(j, c, sys.delta).size * m1.size * m2.size
    return total


def enumerate_entries(n: int, c: float, sys: ShearletSystem, tol: float = 1e-9) -> int:
    """
    Count the discrete index set by walking its definition point by point.

    j runs over −log₂Γ + cℕ₀ while 2^j·2·(lower band edge) ≤ n, k over the members of
    −Δ + cℤ with |k| ≤ 2^{j/2}Δ, and m over c·diag(2^{−j}, 2^{−j/2})ℤ² ∩ [0, 1]²,
    for both cones.
    """
    if not c > 0:
        raise ValidationError(f"Step c must be positive, got {c}")
    lower = sys.generator.band[0] if sys.generator.band else 1e-3
    total = 0
    for _ in (1, -1):
        i = 0
        while True:
            j = i * c - math.log2(sys.gamma)
            if 2.0 ** j * 2.0 * lower > n * (1.0 + tol):
                break
            bound = 2.0 ** (j / 2.0) * sys.delta
            reach = int((sys.delta + bound) / c) + 2
            shears = sum(1 for z in range(-reach, reach + 1) if abs(-sys.delta + z * c) <= bound + tol)
            sites = 1
            for step in (c * 2.0 ** (-j), c * 2.0 ** (-j / 2.0)):
                m = 0
                while (m + 1) * step <= 1.0 + tol:
                    m += 1
                sites *= m + 1
            total += shears * sites
            i += 1
    return total


def besov_discrete(coeffs: CoefficientSet) -> float:
    """
    c⁴·Σ_ι Σ_j Σ_k Σ_m 2^{2j}|entry|² times the dilation measure ln 2 per sign.
    """
    return DISCRETE_MEASURE * coeffs.c ** 4 * sum(block.energy() for block in coeffs.blocks)


def seam_mass_fraction(f: GridField, radius: float) -> float:
    """
    Share of Σ|f| carried by samples within `radius` of the box boundary.
    """
    total = float(np.sum(np.abs(f.values)))
    if total == 0.0:
        return 0.0
    x1, x2 = f.points()
    lo1, lo2 = f.origin
    distance = np.minimum.reduce([x1 - lo1, lo1 + f.extent - x1, x2 - lo2, lo2 + f.extent - x2])
    return float(np.sum(np.abs(f.values)[distance < radius]) / total)


def torus_window(n: int, extent: float, inner: float, outer: float) -> GridField:
    """
    Smooth cutoff on the centred box of side `extent`: 1 on [−inner, inner]², 0 outside [−outer, outer]².
    """
    from utils.shearlet_core import smoothstep

    if not 0 < inner < outer <= extent / 2:
        raise ValidationError(f"Window needs 0 < inner < outer <= extent/2, got {inner}, {outer}, {extent}")
    origin = (-extent / 2.0, -extent / 2.0)

    def profile(x: np.ndarray) -> np.ndarray:
        return 1.0 - smoothstep((np.abs(x) - inner) / (outer - inner))

    return GridField.from_function(lambda x1, x2: profile(x1) * profile(x2), n, extent, origin)


class Transforms:
    def __init__(self, instance_id=None, workers: Optional[int] = None, core: Optional[ShearletCore] = None):
        """
        Initialize the Transforms utility.

        Parameters
        ----------
        instance_id : int, optional
            The instance ID for logging purposes. If not provided, uses default logger.
        workers : int, optional
            Thread-pool size for slab-parallel quadrature.
        core : ShearletCore, optional
            Shared core utility; created with the same instance ID when omitted.
        """
        # Logging
        if instance_id:
            logger_name = f"utils.transforms.instance_{instance_id}"
        else:
            logger_name = "utils.transforms"
        self.logger = logging.getLogger(logger_name)
        self.workers = max(1, int(workers or 1))
        self.core = core or ShearletCore(instance_id=instance_id, workers=self.workers)
        self.logger.info("Initialized Transforms utility")

    # MARK: Helpers
    @staticmethod
    def grid_frequencies(n: int, extent: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
        k = np.rint(fft.fftfreq(n, d=1.0 / n)) / extent
        return np.meshgrid(k, k, indexing="ij")

    def resolution_floor(self, f: GridField, sys: ShearletSystem) -> float:
        return self.core.default_a_min(sys.generator, f.n / (2.0 * f.extent))

    def _map_slabs(self, run, tasks: List) -> List:
        if len(tasks) <= 1 or self.workers == 1:
            return [run(task) for task in tasks]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(run, tasks))

    # MARK: Coefficients
    def periodized_coefficient(self, f: GridField, sys: ShearletSystem, weight: "DirectionalWeight",
                               a: float, s: float, t: Sequence[float], iota: int) -> float:
        """
        ⟨f, ψ^{ω,per}_{a,s,t,ι}⟩ from the integer-frequency samples of ψ̂.

        Parameters
        ----------
        f : GridField
            Field on the unit torus (or any periodic box).
        a, s, t, iota
            Scale, shear, translation and cone.

        Returns
        -------
        float
            ω(ι,s)·Σ_k c_k·conj(ψ̂_{a,s,0,ι}(k))·e^{2πi⟨k,t⟩} (real part) times the box area.
        """
        sys.check_parameters(a, s, iota)
        raw = raw_coefficients(f)
        xi1, xi2 = self.grid_frequencies(f.n, f.extent)
        profile = element_profile(sys, a, s, iota, xi1, xi2)
        shift = (t[0] - f.origin[0], t[1] - f.origin[1])
        phase = np.exp(2j * np.pi * (xi1 * shift[0] + xi2 * shift[1]))
        omega = float(np.asarray(weight(iota, np.array([s])))[0])
        return float(omega * np.real(np.sum(raw * np.conj(profile) * phase)) * f.extent ** 2)

    def coefficient_field(self, f: GridField, sys: ShearletSystem, weight: "DirectionalWeight",
                          a: float, s: float, iota: int) -> GridField:
        """
        t ↦ ⟨f, ψ^{ω,per}_{a,s,t,ι}⟩ sampled at the grid points of f.
        """
        sys.check_parameters(a, s, iota)
        raw = raw_coefficients(f)
        xi1, xi2 = self.grid_frequencies(f.n, f.extent)
        profile = element_profile(sys, a, s, iota, xi1, xi2)
        omega = float(np.asarray(weight(iota, np.array([s])))[0])
        values = fft.ifft2(raw * np.conj(profile)).real * f.n ** 2 * f.extent ** 2
        return f.with_values(omega * values)

    # MARK: Continuous seminorms
    def besov_continuous(self, f: GridField, sys: ShearletSystem, weight: "DirectionalWeight",
                         quad: Optional[QuadratureSpec] = None, route: str = "spatial",
                         a_max: Optional[float] = None) -> SeminormResult:
        """
        Periodic shearlet-based Besov seminorm |f|²_{B,p}.

        Parameters
        ----------
        f : GridField
            Field on a periodic box.
        sys, weight : ShearletSystem, DirectionalWeight
            System and directional weight.
        quad : QuadratureSpec, optional
            Node counts for the (a, s) integrals.
        route : str
            "spatial": one inverse FFT per (ι, a, s) node and an exact grid sum in t.
            "spectral": the multiplier-side sum Σ_k σ(k)|f̂(k)|².
        a_max : float, optional
            Scale cap below Γ.

        Returns
        -------
        SeminormResult
            Value, refinement flag, resolution floor and per-cone parts.
        """
        quad = quad or QuadratureSpec()
        if route == "spectral":
            raw = raw_coefficients(f)
            xi1, xi2 = self.grid_frequencies(f.n, f.extent)
            symbol = self.core.symbol(sys, weight, xi1, xi2, quad, a_min=self.resolution_floor(f, sys),
                                      a_max=a_max)
            energy = np.abs(raw) ** 2 * f.extent ** 2
            components = {iota: float(np.sum(part * energy)) for iota, part in symbol.cones.items()}
            return SeminormResult("besov_continuous", float(sum(components.values())), quad.refinement_tol,
                                  symbol.converged, symbol.a_min, components)
        if route != "spatial":
            raise ValidationError(f"Unknown route '{route}'")
        return self._spatial_seminorm("besov_continuous", f, sys, weight, quad, None, a_max)

    def besov_box(self, f: GridField, sys: ShearletSystem, weight: "DirectionalWeight", r: float,
                  quad: Optional[QuadratureSpec] = None) -> SeminormResult:
        """
        |f|²_{B,[−r,r]}: the Besov integrand with translations restricted to [−r, r]².

        The field lives on an enlarged torus emulating ℝ²; translations are the
        grid points inside the box.

        Raises
        ------
        ValidationError
            If r is outside (0, 1/2).
        SupportLeakError
            If more than 10⁻⁸ of the field's mass sits within the support radius of the seam.
        """
        if not 0 < r < 0.5:
            raise ValidationError(f"Half-width r must lie in (0, 1/2), got {r}")
        leak = seam_mass_fraction(f, sys.support_radius)
        if leak > LEAK_THRESHOLD:
            self.logger.error(f"Support leak detected: {leak:.3e} of the mass is near the seam")
            raise SupportLeakError(f"Field mass fraction {leak:.3e} near the torus seam exceeds {LEAK_THRESHOLD}")
        x1, x2 = f.points()
        mask = (np.abs(x1) <= r + 1e-12) & (np.abs(x2) <= r + 1e-12)
        return self._spatial_seminorm("besov_box", f, sys, weight, quad or QuadratureSpec(), mask, None)

    def _spatial_seminorm(self, name: str, f: GridField, sys: ShearletSystem, weight: "DirectionalWeight",
                          quad: QuadratureSpec, mask: Optional[np.ndarray],
                          a_max: Optional[float]) -> SeminormResult:
        a_min = self.resolution_floor(f, sys)
        top = sys.gamma if a_max is None else min(a_max, sys.gamma)
        rule_a = quad.scale_rule(min(a_min, 0.5 * top), top)
        rule_s = quad.shear_rule(-sys.delta, sys.delta)
        raw = raw_coefficients(f)
        if not np.any(raw):
            return SeminormResult(name, 0.0, quad.refinement_tol, True, a_min, {1: 0.0, -1: 0.0})
        xi1, xi2 = self.grid_frequencies(f.n, f.extent)
        scale = f.n ** 2 * f.extent ** 2
        batch = max(1, (1 << 22) // f.n ** 2)
        band = sys.generator.band
        tasks = [(iota, slab) for iota in (1, -1)
                 for slab in np.array_split(np.arange(rule_a.nodes.size), self.workers) if slab.size]

        def run(task) -> Tuple[float, float]:
            iota, slab = task
            u = np.abs(xi1 if iota == 1 else xi2)
            omega_sq = np.asarray(weight(iota, rule_s.nodes), dtype=float) ** 2
            fine = coarse = 0.0
            for i in slab:
                a = rule_a.nodes[i]
                if band and not np.any((u >= band[0] / a) & (u <= band[1] / a)):
                    continue
                for first in range(0, rule_s.nodes.size, batch):
                    shears = rule_s.nodes[first:first + batch]
                    profile = element_profile(sys, a, shears[:, None, None], iota, xi1[None], xi2[None])
                    coeff = fft.ifft2(raw[None] * profile, axes=(-2, -1)).real * scale
                    squares = coeff ** 2
                    energy = (np.sum(squares[:, mask], axis=1) if mask is not None
                              else np.sum(squares, axis=(1, 2))) * f.cell_area
                    weighted = energy * omega_sq[first:first + batch] * a ** -5.0
                    fine += rule_a.weights[i] * float(np.sum(weighted * rule_s.weights[first:first + batch]))
                    coarse += rule_a.coarse[i] * float(np.sum(weighted * rule_s.coarse[first:first + batch]))
            return fine, coarse

        parts = self._map_slabs(run, tasks)
        components = {1: 0.0, -1: 0.0}
        coarse_total = 0.0
        for (iota, _), (fine, coarse) in zip(tasks, parts):
            components[iota] += DILATION_SIGNS * fine
            coarse_total += DILATION_SIGNS * coarse
        value = components[1] + components[-1]
        disagreement = abs(value - coarse_total) / value if value > 0 else 0.0
        converged = disagreement <= quad.refinement_tol
        if not converged:
            self.logger.warning(f"{name}: refinement disagreement {disagreement:.3%}")
        return SeminormResult(name, value, quad.refinement_tol, converged, a_min, components)

    def besov_symbol_table(self, n: int, sys: ShearletSystem, weight: "DirectionalWeight",
                           quad: Optional[QuadratureSpec] = None, extent: float = 1.0,
                           a_max: Optional[float] = None):
        """
        Shearlet multiplier σ(k) at every grid frequency, in FFT storage order.
        """
        xi1, xi2 = self.grid_frequencies(n, extent)
        a_min = self.core.default_a_min(sys.generator, n / (2.0 * extent))
        return self.core.symbol(sys, weight, xi1, xi2, quad or QuadratureSpec(), a_min=a_min, a_max=a_max)

    def homogeneous_energy(self, f: GridField, sys: ShearletSystem,
                           quad: Optional[QuadratureSpec] = None) -> float:
        """
        Quadrature of ∫₀^∞∫_ℝ∫_{ℝ²}|⟨f, ψ_{a,s,t}⟩|² dt ds da/a³ for the homogeneous system.
        """
        raw = raw_coefficients(f)
        xi1, xi2 = self.grid_frequencies(f.n, f.extent)
        symbol = self.core.homogeneous_symbol(sys, xi1, xi2, quad or QuadratureSpec())
        return float(np.sum(symbol * np.abs(raw) ** 2) * f.extent ** 2)

    # MARK: Bessel check
    def bessel_bound(self, sys: ShearletSystem, weight: "DirectionalWeight", n: int,
                     quad: Optional[QuadratureSpec] = None, samples: int = 64) -> float:
        """
        C_est: supremum of the Bessel multiplier over the grid frequencies and a dense annulus.
        """
        quad = quad or QuadratureSpec()
        xi1, xi2 = self.grid_frequencies(n)
        radii = np.geomspace(0.05, n / 2.0, samples)
        angles = np.linspace(0.0, 2.0 * np.pi, 2 * samples, endpoint=False)
        scan1 = np.concatenate([xi1.ravel(), (radii[:, None] * np.cos(angles)).ravel()])
        scan2 = np.concatenate([xi2.ravel(), (radii[:, None] * np.sin(angles)).ravel()])
        a_min = self.core.default_a_min(sys.generator, n / 2.0)
        symbol = self.core.symbol(sys, weight, scan1, scan2, quad, density="bessel", a_min=a_min)
        return float(np.max(symbol.values))

    def bessel_check(self, f: GridField, sys: ShearletSystem, weight: "DirectionalWeight",
                     quad: Optional[QuadratureSpec] = None, bound: Optional[float] = None) -> BesselReport:
        """
        Coefficient energy without the a⁻² weight, and its ratio to ‖f‖².

        Parameters
        ----------
        bound : float, optional
            Precomputed C_est; scanned when omitted.

        Returns
        -------
        BesselReport
            (energy, ratio, C_est, ratio ≤ 1.01·C_est, zero-field flag).
        """
        quad = quad or QuadratureSpec()
        norm_sq = l2_norm_sq(f)
        if bound is None:
            bound = self.bessel_bound(sys, weight, f.n, quad)
        if norm_sq == 0.0:
            return BesselReport(0.0, 0.0, bound, True, True)
        raw = raw_coefficients(f)
        xi1, xi2 = self.grid_frequencies(f.n, f.extent)
        symbol = self.core.symbol(sys, weight, xi1, xi2, quad, density="bessel",
                                  a_min=self.resolution_floor(f, sys))
        energy = float(np.sum(symbol.values * np.abs(raw) ** 2) * f.extent ** 2)
        ratio = energy / norm_sq
        within = ratio <= 1.01 * bound
        if not within:
            self.logger.warning(f"Bessel ratio {ratio:.6g} exceeds C_est {bound:.6g}")
        return BesselReport(energy, ratio, bound, within, False)

    # MARK: Discrete transform
    def _check_unit_torus(self, f: GridField) -> None:
        if f.extent != 1.0 or f.origin != (0.0, 0.0):
            raise ValidationError("The discrete transform is defined on the unit torus only")

    def _scale_blocks(self, raw: np.ndarray, kint: np.ndarray, sys: ShearletSystem,
                      weight: "DirectionalWeight", c: float, iota: int, j: float) -> List[CoefficientBlock]:
        a = min(2.0 ** (-j), sys.gamma)
        m1, m2 = translation_lattice(j, c, iota)
        e1 = np.exp(2j * np.pi * m1[:, None] * kint[None, :])
        e2 = np.exp(2j * np.pi * m2[:, None] * kint[None, :])
        xi1, xi2 = np.meshgrid(kint, kint, indexing="ij")
        blocks = []
        for k in shear_indices(j, c, sys.delta):
            s = float(np.clip(2.0 ** (-j / 2.0) * k, -sys.delta, sys.delta))
            omega = float(np.asarray(weight(iota, np.array([s])))[0])
            spectrum = raw * element_profile(sys, a, s, iota, xi1, xi2)
            rows = np.flatnonzero(np.any(spectrum != 0, axis=1))
            cols = np.flatnonzero(np.any(spectrum != 0, axis=0))
            if omega == 0.0 or rows.size == 0:
                values = np.zeros((m1.size, m2.size))
            else:
                inner = spectrum[np.ix_(rows, cols)] @ e2[:, cols].T
                values = omega * np.real(e1[:, rows] @ inner)
            blocks.append(CoefficientBlock(iota, float(j), float(k), m1, m2, values))
        return blocks

    def iter_blocks(self, f: GridField, sys: ShearletSystem, weight: "DirectionalWeight",
                    c: float) -> Iterator[List[CoefficientBlock]]:
        """
        Yield the coefficient blocks scale by scale, cone 1 first, in increasing j.
        """
        self._check_unit_torus(f)
        if not c > 0:
            raise ValidationError(f"Step c must be positive, got {c}")
        raw = raw_coefficients(f)
        kint = np.rint(fft.fftfreq(f.n, d=1.0 / f.n))
        scales = scale_indices(c, sys.gamma, scale_ceiling(f.n, sys))
        tasks = [(iota, j) for iota in (1, -1) for j in scales]
        for first in range(0, len(tasks), self.workers):
            chunk = tasks[first:first + self.workers]
            for blocks in self._map_slabs(lambda task: self._scale_blocks(raw, kint, sys, weight, c, *task), chunk):
                yield blocks

    def discrete_transform(self, f: GridField, sys: ShearletSystem, weight: "DirectionalWeight", c: float,
                           max_entries: int = 20_000_000) -> CoefficientSet:
        """
        All coefficients ⟨f, ψ^{ω,per}_{2^{−j}, 2^{−j/2}k, m, ι}⟩ up to the resolution ceiling.

        Parameters
        ----------
        f : GridField
            Field on the unit torus.
        c : float
            Step parameter, c > 0.
        max_entries : int
            Refuse to materialize sets larger than this; use `besov_discrete_streamed` instead.

        Returns
        -------
        CoefficientSet
            The coefficient set.

        Raises
        ------
        ValidationError
            For c ≤ 0, an empty index set, a non-unit torus or an oversized set.
        """
        if not c > 0:
            raise ValidationError(f"Step c must be positive, got {c}")
        entries = count_entries(f.n, c, sys)
        if entries > max_entries:
            self.logger.error(f"Coefficient set with {entries} entries exceeds {max_entries}")
            raise ValidationError(f"Coefficient set would hold {entries} entries; stream the seminorm instead")
        ceiling = scale_ceiling(f.n, sys)
        self.logger.info(f"Discrete transform: c={c}, {entries} entries, resolution ceiling j={ceiling:.3f}")
        blocks = tuple(block for scale in self.iter_blocks(f, sys, weight, c) for block in scale)
        return CoefficientSet(c, sys.gamma, sys.delta, ceiling, blocks)

    def besov_discrete_streamed(self, f: GridField, sys: ShearletSystem, weight: "DirectionalWeight",
                                c: float) -> SeminormResult:
        """
        besov_discrete(discrete_transform(f, ...)) accumulated scale by scale.
        """
        components = {1: 0.0, -1: 0.0}
        for scale in self.iter_blocks(f, sys, weight, c):
            for block in scale:
                components[block.iota] += DISCRETE_MEASURE * c ** 4 * block.energy()
        ceiling = scale_ceiling(f.n, sys)
        return SeminormResult("besov_discrete", components[1] + components[-1], 0.0, True,
                              2.0 ** (-ceiling), components)
