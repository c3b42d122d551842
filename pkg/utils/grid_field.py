# Periodic sampled fields on a square torus and their discrete Fourier coefficients
# Provides the FFT contract, inner products and the isotropic/anisotropic Sobolev seminorms

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple, TYPE_CHECKING

import numpy as np
from scipy import fft

from utils.errors import ValidationError

if TYPE_CHECKING:
    from utils.energies import AnisotropyNorm


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridField:
    """
    Real samples of a function on the periodic box origin + [0, extent)².

    Sample (i, j) sits at origin + (i, j)·extent/n; axis 0 runs along x₁.
    The unit torus (extent 1, origin (0, 0)) is the default.
    """
    n: int
    values: np.ndarray = field(repr=False)
    extent: float = 1.0
    origin: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not is_power_of_two(int(self.n)) or self.n < 8:
            raise ValidationError(f"Grid side must be a power of two >= 8, got {self.n}")
        values = np.array(self.values, dtype=float)
        if values.shape != (self.n, self.n):
            raise ValidationError(f"Expected {self.n}x{self.n} samples, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValidationError("Field contains non-finite samples")
        if self.extent <= 0:
            raise ValidationError(f"Extent must be positive, got {self.extent}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def spacing(self) -> float:
        return self.extent / self.n

    @property
    def cell_area(self) -> float:
        return self.spacing ** 2

    def axes(self) -> Tuple[np.ndarray, np.ndarray]:
        grid = np.arange(self.n) * self.spacing
        return self.origin[0] + grid, self.origin[1] + grid

    def points(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Sample coordinates as two n×n arrays (x₁, x₂).
        """
        x1, x2 = self.axes()
        return np.meshgrid(x1, x2, indexing="ij")

    def with_values(self, values: np.ndarray) -> "GridField":
        return GridField(self.n, values, self.extent, self.origin)

    def translate(self, shift: Tuple[int, int]) -> "GridField":
        """
        Periodic shift by whole grid cells.
        """
        return self.with_values(np.roll(self.values, shift, axis=(0, 1)))

    def scaled(self, alpha: float) -> "GridField":
        return self.with_values(alpha * self.values)

    def __add__(self, other: "GridField") -> "GridField":
        _check_compatible(self, other)
        return self.with_values(self.values + other.values)

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray, np.ndarray], np.ndarray], n: int,
                      extent: float = 1.0, origin: Tuple[float, float] = (0.0, 0.0)) -> "GridField":
        grid = origin[0] + np.arange(n) * extent / n, origin[1] + np.arange(n) * extent / n
        x1, x2 = np.meshgrid(grid[0], grid[1], indexing="ij")
        return cls(n, np.broadcast_to(fn(x1, x2), (n, n)).astype(float), extent, origin)

    @classmethod
    def constant(cls, value: float, n: int) -> "GridField":
        return cls(n, np.full((n, n), float(value)))

    @classmethod
    def zeros_like(cls, other: "GridField") -> "GridField":
        return other.with_values(np.zeros((other.n, other.n)))


@dataclass(frozen=True)
class SpectralField:
    """
    Fourier coefficients c_k ≈ L⁻²∫ f(x)e^{−2πi⟨k/L, x⟩}dx in FFT storage order.

    Integer frequencies k run over [−n/2, n/2)² and correspond to the physical
    frequency k/L of the box of side L = extent.
    """
    n: int
    coeffs: np.ndarray = field(repr=False)
    extent: float = 1.0
    origin: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not is_power_of_two(int(self.n)):
            raise ValidationError(f"Grid side must be a power of two, got {self.n}")
        coeffs = np.array(self.coeffs, dtype=complex)
        if coeffs.shape != (self.n, self.n):
            raise ValidationError(f"Expected {self.n}x{self.n} coefficients, got shape {coeffs.shape}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def integer_frequencies(self) -> Tuple[np.ndarray, np.ndarray]:
        k = np.rint(fft.fftfreq(self.n, d=1.0 / self.n))
        return np.meshgrid(k, k, indexing="ij")

    def frequencies(self) -> Tuple[np.ndarray, np.ndarray]:
        k1, k2 = self.integer_frequencies()
        return k1 / self.extent, k2 / self.extent

    def at(self, k1: int, k2: int) -> complex:
        return complex(self.coeffs[int(k1) % self.n, int(k2) % self.n])


def _check_compatible(f: GridField, g: GridField) -> None:
    if f.n != g.n:
        raise ValidationError(f"Grid size mismatch: {f.n} vs {g.n}")
    if not np.isclose(f.extent, g.extent) or not np.allclose(f.origin, g.origin):
        raise ValidationError("Fields live on different boxes")


def _origin_phase(n: int, extent: float, origin: Tuple[float, float]) -> np.ndarray:
    k = np.rint(fft.fftfreq(n, d=1.0 / n)) / extent
    return np.exp(-2j * np.pi * (k[:, None] * origin[0] + k[None, :] * origin[1]))


def raw_coefficients(f: GridField, workers: Optional[int] = None) -> np.ndarray:
    """
    fft2(values)/n², without the origin phase.

    Grid-sampled products and convolutions only need these; the origin phase
    cancels whenever the result is sampled back on the same grid.
    """
    return fft.fft2(f.values, workers=workers) / f.n ** 2


def to_spectral(f: GridField, workers: Optional[int] = None) -> SpectralField:
    coeffs = raw_coefficients(f, workers)
    if f.origin != (0.0, 0.0):
        coeffs = coeffs * _origin_phase(f.n, f.extent, f.origin)
    return SpectralField(f.n, coeffs, f.extent, f.origin)


def from_spectral(F: SpectralField, workers: Optional[int] = None) -> GridField:
    coeffs = F.coeffs
    if F.origin != (0.0, 0.0):
        coeffs = coeffs / _origin_phase(F.n, F.extent, F.origin)
    values = fft.ifft2(coeffs * F.n ** 2, workers=workers)
    return GridField(F.n, values.real, F.extent, F.origin)


def inner_product(f: GridField, g: GridField) -> float:
    _check_compatible(f, g)
    return float(np.sum(f.values * g.values) * f.cell_area)


def spectral_inner_product(f: GridField, g: GridField) -> float:
    _check_compatible(f, g)
    F, G = raw_coefficients(f), raw_coefficients(g)
    return float(np.real(np.sum(F * np.conj(G))) * f.extent ** 2)


def l2_norm_sq(f: GridField) -> float:
    return inner_product(f, f)


def derivative_wavenumbers(n: int, extent: float = 1.0) -> np.ndarray:
    """
    Physical wavenumbers k/L used for differentiation; the Nyquist entry carries no derivative.
    """
    k = np.rint(fft.fftfreq(n, d=1.0 / n))
    k[n // 2] = 0.0
    return k / extent


def h1_seminorm_sq(f: GridField, workers: Optional[int] = None) -> float:
    """
    Isotropic seminorm (2π)²·Σ_k |k|²|f̂(k)|² scaled by the box area.

    Parameters
    ----------
    f : GridField
        Real field.
    workers : int, optional
        Worker count forwarded to scipy.fft.

    Returns
    -------
    float
        |f|²_{H¹} of the trigonometric interpolant.
    """
    F = raw_coefficients(f, workers)
    k = derivative_wavenumbers(f.n, f.extent)
    k_sq = k[:, None] ** 2 + k[None, :] ** 2
    return float((2 * np.pi) ** 2 * np.sum(k_sq * np.abs(F) ** 2) * f.extent ** 2)


def spectral_gradient(f: GridField, workers: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    F = fft.fft2(f.values, workers=workers)
    k = derivative_wavenumbers(f.n, f.extent)
    d1 = fft.ifft2(2j * np.pi * k[:, None] * F, workers=workers).real
    d2 = fft.ifft2(2j * np.pi * k[None, :] * F, workers=workers).real
    return d1, d2


def finite_difference_gradient(f: GridField) -> Tuple[np.ndarray, np.ndarray]:
    h = f.spacing
    d1 = (np.roll(f.values, -1, axis=0) - np.roll(f.values, 1, axis=0)) / (2 * h)
    d2 = (np.roll(f.values, -1, axis=1) - np.roll(f.values, 1, axis=1)) / (2 * h)
    return d1, d2


def anisotropic_dirichlet(f: GridField, norm: "AnisotropyNorm", method: str = "spectral",
                          rng: Optional[np.random.Generator] = None,
                          workers: Optional[int] = None) -> float:
    """
    ∫ Ω(∇f)² over the box.

    Parameters
    ----------
    f : GridField
        Real field.
    norm : AnisotropyNorm
        The anisotropy Ω; rejected when its randomized self-test fails.
    method : str
        "spectral" (default) or "fd" for the central-difference fallback.
    rng : numpy.random.Generator, optional
        Source for the self-test samples.

    Returns
    -------
    float
        Grid average of Ω(∇f)² times the box area.

    Raises
    ------
    ValidationError
        If Ω is not positively homogeneous and positive, or the method is unknown.
    """
    check = norm.self_test(rng if rng is not None else np.random.default_rng(0))
    if not (check.homogeneous and check.positive):
        raise ValidationError(f"Anisotropy '{norm.label}' failed the norm self-test: {check}")
    if method == "spectral":
        d1, d2 = spectral_gradient(f, workers)
    elif method == "fd":
        d1, d2 = finite_difference_gradient(f)
    else:
        raise ValidationError(f"Unknown differentiation method '{method}'")
    omega = norm(np.stack([d1, d2], axis=-1))
    return float(np.mean(omega ** 2) * f.extent ** 2)
