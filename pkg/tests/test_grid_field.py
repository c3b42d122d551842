# Tests for the periodic grid fields and their Fourier coefficients
# Covers construction checks, the FFT contract, Parseval and the Sobolev seminorms

import math

import numpy as np
import pytest

from utils.energies import AnisotropyNorm
from utils.errors import ValidationError
from utils.grid_field import (
    GridField, anisotropic_dirichlet, from_spectral, h1_seminorm_sq, inner_product, spectral_inner_product,
    to_spectral,
)


def wave(n: int) -> GridField:
    return GridField.from_function(lambda x1, x2: np.sin(2 * np.pi * x1) + 0.5 * np.cos(4 * np.pi * x2), n)


class TestGridFieldConstruction:
    """Test suite for GridField validation."""

    @pytest.mark.parametrize("n", [4, 12, 0])
    def test_rejects_bad_sizes(self, n):
        """Grid sides must be powers of two of at least 8."""
        with pytest.raises(ValidationError):
            GridField(n, np.zeros((max(n, 1), max(n, 1))))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValidationError):
            GridField(16, np.zeros((16, 8)))

    def test_rejects_non_finite(self):
        values = np.zeros((8, 8))
        values[3, 3] = np.nan
        with pytest.raises(ValidationError):
            GridField(8, values)

    def test_values_are_read_only(self):
        f = GridField.constant(0.5, 8)
        with pytest.raises(ValueError):
            f.values[0, 0] = 1.0

    def test_addition_needs_matching_grids(self):
        with pytest.raises(ValidationError):
            GridField.constant(1.0, 8) + GridField.constant(1.0, 16)


class TestSpectralContract:
    """Test suite for the FFT convention."""

    def test_cosine_coefficients(self):
        """cos(2πx₁) has coefficient 1/2 at k = (±1, 0)."""
        F = to_spectral(GridField.from_function(lambda x1, x2: np.cos(2 * np.pi * x1), 16))
        assert F.at(1, 0) == pytest.approx(0.5, abs=1e-14)
        assert F.at(-1, 0) == pytest.approx(0.5, abs=1e-14)
        assert F.at(0, 1) == pytest.approx(0.0, abs=1e-14)

    def test_origin_phase(self):
        """Coefficients refer to the physical coordinates, not the sample index."""
        f = GridField.from_function(lambda x1, x2: np.cos(2 * np.pi * x1), 16, 1.0, (-0.5, -0.5))
        assert to_spectral(f).at(1, 0) == pytest.approx(0.5, abs=1e-12)

    def test_inverse(self, random_field):
        back = from_spectral(to_spectral(random_field))
        np.testing.assert_allclose(back.values, random_field.values, atol=1e-12)

    def test_parseval(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            f = GridField(32, rng.standard_normal((32, 32)))
            g = GridField(32, rng.standard_normal((32, 32)))
            assert spectral_inner_product(f, g) == pytest.approx(inner_product(f, g), rel=1e-10)


class TestSeminorms:
    """Test suite for the isotropic and anisotropic seminorms."""

    def test_h1_of_sine(self):
        f = GridField.from_function(lambda x1, x2: np.sin(2 * np.pi * x1), 16)
        assert h1_seminorm_sq(f) == pytest.approx((2 * math.pi) ** 2 / 2, rel=1e-12)

    def test_h1_translation_invariant(self, random_field):
        assert h1_seminorm_sq(random_field.translate((3, 5))) == pytest.approx(h1_seminorm_sq(random_field),
                                                                              rel=1e-12)

    def test_h1_of_constant_is_zero(self):
        assert h1_seminorm_sq(GridField.constant(0.7, 16)) == pytest.approx(0.0, abs=1e-20)

    def test_euclidean_dirichlet_matches_h1(self):
        f = wave(32)
        assert anisotropic_dirichlet(f, AnisotropyNorm.euclidean()) == pytest.approx(h1_seminorm_sq(f), rel=1e-10)

    def test_finite_difference_fallback(self):
        f = wave(64)
        exact = h1_seminorm_sq(f)
        fd = anisotropic_dirichlet(f, AnisotropyNorm.euclidean(), method="fd")
        assert abs(fd - exact) / exact < 0.02

    def test_l1_dominates_euclidean(self, random_field):
        assert (anisotropic_dirichlet(random_field, AnisotropyNorm.l1())
                >= anisotropic_dirichlet(random_field, AnisotropyNorm.euclidean()))

    def test_rejects_non_homogeneous_norm(self, random_field):
        squared = AnisotropyNorm(lambda v: np.hypot(v[..., 0], v[..., 1]) ** 2, "squared")
        with pytest.raises(ValidationError):
            anisotropic_dirichlet(random_field, squared)

    def test_rejects_unknown_method(self, random_field):
        with pytest.raises(ValidationError):
            anisotropic_dirichlet(random_field, AnisotropyNorm.euclidean(), method="simpson")
