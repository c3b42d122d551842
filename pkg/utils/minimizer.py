# Semi-implicit spectral gradient flow for the shearlet-based energy
# Tabulates the Fourier multiplier of the energy and runs the frequency-diagonal linear solves

from dataclasses import dataclass, field
from typing import Callable, Optional, TYPE_CHECKING
import logging

import numpy as np
import pandas as pd
from scipy import fft

from utils.errors import MinimizerDivergenceError, ValidationError
from utils.energies import double_well_derivative, potential_term
from utils.grid_field import GridField, raw_coefficients
from utils.shearlet_core import QuadratureSpec, ShearletSystem
from utils.transforms import SeminormResult, Transforms

if TYPE_CHECKING:
    from utils.energies import DirectionalWeight

DIVERGENCE_STREAK = 5


@dataclass(frozen=True)
class MultiplierTable:
    """
    Multiplier σ(k) at every grid frequency in FFT order.

    variant "periodic" holds the shearlet part only (σ(0) = 0 for band-limited
    generators); "full" adds |K̂(k)|². Both parts are kept separately.
    """
    n: int
    shearlet: np.ndarray = field(repr=False)
    low_pass_sq: np.ndarray = field(repr=False)
    variant: str = "periodic"
    gamma0: Optional[float] = None
    extent: float = 1.0
    converged: bool = True

    def __post_init__(self):
        if self.variant not in ("periodic", "full"):
            raise ValidationError(f"Unknown multiplier variant '{self.variant}'")
        if np.any(self.shearlet < 0) or np.any(self.low_pass_sq < 0):
            raise ValidationError("Multiplier values must be non-negative")

    @property
    def values(self) -> np.ndarray:
        return self.shearlet + self.low_pass_sq if self.variant == "full" else self.shearlet


@dataclass(frozen=True)
class Trajectory:
    final_field: GridField
    trace: pd.DataFrame = field(repr=False)
    steps: int
    converged: bool
    stability: float
    tau: float


def flow_step(u: GridField, tau: float, eps: float, table: MultiplierTable,
              workers: Optional[int] = None) -> GridField:
    """
    One step û⁺ = (û − τ/(4ε)·FFT(W′(u)))/(1 + 2τεσ).
    """
    if not (tau > 0 and eps > 0):
        raise ValidationError(f"Need τ, ε > 0, got τ={tau}, ε={eps}")
    if table.n != u.n:
        raise ValidationError(f"Multiplier table is {table.n}x{table.n}, field is {u.n}x{u.n}")
    rhs = fft.fft2(u.values, workers=workers) - tau / (4.0 * eps) * fft.fft2(double_well_derivative(u.values),
                                                                               workers=workers)
    values = fft.ifft2(rhs / (1.0 + 2.0 * tau * eps * table.values), workers=workers).real
    return u.with_values(values)


def flow_energy(u: GridField, eps: float, table: MultiplierTable) -> tuple:
    """
    (elastic, potential) parts of ε·Σσ|û|²L² + (1/4ε)∫W(u), the energy the flow decreases.
    """
    elastic = eps * float(np.sum(table.values * np.abs(raw_coefficients(u)) ** 2) * u.extent ** 2)
    return elastic, potential_term(u, eps)


def default_scale_cap(sys: ShearletSystem, u0: GridField) -> float:
    """
    Γ₀ = Γ·(margin/R)² clipped to Γ, with R the element support radius at a = Γ and
    margin the distance from supp u₀ to the box boundary.
    """
    support = np.abs(u0.values) > 1e-12
    if not np.any(support):
        return sys.gamma
    x1, x2 = u0.points()
    lo1, lo2 = u0.origin
    distance = np.minimum.reduce([x1 - lo1, lo1 + u0.extent - x1, x2 - lo2, lo2 + u0.extent - x2])
    margin = max(float(np.min(distance[support])), u0.spacing)
    return min(sys.gamma, sys.gamma * (margin / sys.support_radius) ** 2)


def multiplier_gap(f: GridField, table: MultiplierTable, besov) -> float:
    """
    |f|²_{B,p} − ‖𝒮_p f‖², the representation gap for fields violating the support condition.
    """
    value = besov.value if isinstance(besov, SeminormResult) else float(besov)
    projected = float(np.sum(table.shearlet * np.abs(raw_coefficients(f)) ** 2) * f.extent ** 2)
    return value - projected


class Minimizer:
    def __init__(self, instance_id=None, workers: Optional[int] = None, transforms: Optional[Transforms] = None):
        """
        Initialize the Minimizer utility.

        Parameters
        ----------
        instance_id : int, optional
            The instance ID for logging purposes. If not provided, uses default logger.
        workers : int, optional
            Worker count for the multiplier quadrature and the FFTs.
        transforms : Transforms, optional
            Shared transforms utility.
        """
        # Logging
        if instance_id:
            logger_name = f"utils.minimizer.instance_{instance_id}"
        else:
            logger_name = "utils.minimizer"
        self.logger = logging.getLogger(logger_name)
        self.workers = workers
        self.transforms = transforms or Transforms(instance_id=instance_id, workers=workers)
        self.logger.info("Initialized Minimizer utility")

    def build_multiplier(self, sys: ShearletSystem, weight: "DirectionalWeight", n: int,
                         variant: str = "periodic", gamma0: Optional[float] = None,
                         quad: Optional[QuadratureSpec] = None, extent: float = 1.0) -> MultiplierTable:
        """
        Tabulate the multiplier of 𝒮_p (scale cap Γ₀) or 𝒮 at every grid frequency.

        Parameters
        ----------
        sys, weight : ShearletSystem, DirectionalWeight
            System and weight.
        n : int
            Grid side.
        variant : str
            "periodic" (shearlet part only) or "full" (with |K̂|²).
        gamma0 : float, optional
            Scale cap; Γ when omitted.

        Returns
        -------
        MultiplierTable
            The table; `converged` carries the quadrature refinement flag.
        """
        if gamma0 is not None and not 0 < gamma0 <= sys.gamma:
            raise ValidationError(f"Scale cap Γ₀ = {gamma0} outside (0, Γ]")
        symbol = self.transforms.besov_symbol_table(n, sys, weight, quad, extent=extent, a_max=gamma0)
        if not symbol.converged:
            self.logger.warning(f"Multiplier quadrature not converged (disagreement {symbol.disagreement:.3%})")
        xi1, xi2 = self.transforms.grid_frequencies(n, extent)
        low_pass_sq = np.abs(sys.low_pass(xi1, xi2)) ** 2
        return MultiplierTable(n, np.maximum(symbol.values, 0.0), low_pass_sq, variant, gamma0, extent,
                               symbol.converged)

    def minimize(self, u0: GridField, eps: float, table: MultiplierTable, tau: Optional[float] = None,
                 max_steps: int = 500, energy_tol: float = 1e-8,
                 snapshot: Optional[Callable[[int, GridField], None]] = None,
                 snapshot_every: int = 0) -> Trajectory:
        """
        Iterate `flow_step` until the relative energy decrease falls below `energy_tol`.

        Parameters
        ----------
        u0 : GridField
            Initial field.
        eps : float
            Interface parameter ε.
        table : MultiplierTable
            Multiplier of the elastic term.
        tau : float, optional
            Step size; ε/10 when omitted.
        max_steps : int
            Step limit.
        energy_tol : float
            Relative decrease below which the run stops as converged.
        snapshot : callable, optional
            Called as snapshot(step, field) every `snapshot_every` steps.

        Returns
        -------
        Trajectory
            Final field, energy trace, step count and the stability indicator
            (largest per-step energy increase, ≤ 0 for a monotone run).

        Raises
        ------
        MinimizerDivergenceError
            After five consecutive energy increases.
        """
        tau = eps / 10.0 if tau is None else tau
        if not (tau > 0 and eps > 0):
            raise ValidationError(f"Need τ, ε > 0, got τ={tau}, ε={eps}")
        u = u0
        elastic, potential = flow_energy(u, eps, table)
        rows = [{"step": 0, "elastic": elastic, "potential": potential, "total": elastic + potential}]
        streak = 0
        stability = -np.inf
        converged = False
        step = 0
        for step in range(1, max_steps + 1):
            u = flow_step(u, tau, eps, table, self.workers)
            elastic, potential = flow_energy(u, eps, table)
            total = elastic + potential
            previous = rows[-1]["total"]
            rows.append({"step": step, "elastic": elastic, "potential": potential, "total": total})
            change = total - previous
            stability = max(stability, change)
            streak = streak + 1 if change > 1e-10 * max(1.0, abs(previous)) else 0
            if streak >= DIVERGENCE_STREAK:
                self.logger.error(f"Energy increased for {streak} consecutive steps at step {step} (τ={tau})")
                raise MinimizerDivergenceError(f"Gradient flow diverged at step {step}; reduce τ below {tau}")
            if snapshot is not None and snapshot_every > 0 and step % snapshot_every == 0:
                snapshot(step, u)
            if abs(change) <= energy_tol * max(abs(previous), 1e-300):
                converged = True
                break
        self.logger.info(f"Minimizer finished after {step} steps (converged={converged}); "
                         f"largest per-step energy change {stability:.3e} at τ={tau}")
        return Trajectory(u, pd.DataFrame(rows, columns=["step", "elastic", "potential", "total"]), step,
                          converged, float(stability), tau)
