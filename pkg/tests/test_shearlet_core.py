# Tests for the shearlet generators, system elements and multipliers

import math

import numpy as np
import pytest

from utils.energies import DirectionalWeight
from utils.errors import AdmissibilityError, FrameBoundError, ParameterRangeError, ValidationError
from utils.shearlet_core import (
    GeneratorProfile, QuadratureSpec, ShearletSystem, fourier_element, meyer_scaling_profile, smoothstep,
)


class TestGenerator:
    """Test suite for the Meyer generator."""

    def test_smoothstep(self):
        x = np.linspace(-0.5, 1.5, 41)
        assert smoothstep(np.array([0.0]))[0] == 0.0
        assert smoothstep(np.array([1.0]))[0] == pytest.approx(1.0, abs=1e-14)
        np.testing.assert_allclose(smoothstep(x) + smoothstep(1.0 - x), 1.0, atol=1e-12)

    def test_vanishing_moment(self, system):
        assert system.generator.psi1_hat(np.array([0.0]))[0] == 0.0

    def test_normalization(self, core, system):
        assert core.normalization_integral(system.generator) == pytest.approx((2 * math.pi) ** 2, rel=1e-6)

    def test_decay_constants_finite(self, system):
        c_psi, c_phi = system.generator.decay_constants(radius=8.0, samples=2001)
        assert np.isfinite(c_psi) and np.isfinite(c_phi)
        assert c_psi > 0 and c_phi > 0

    def test_rejects_bad_normalization(self):
        with pytest.raises(ValidationError):
            GeneratorProfile(meyer_scaling_profile, meyer_scaling_profile, normalization=0.0)


class TestAdmissibility:
    """Test suite for the admissibility constant."""

    def test_rules_agree(self, core, system):
        gauss = core.admissibility_constant(system.generator)
        trapezoid = core.admissibility_constant(system.generator, rule="trapezoid")
        assert gauss > 0
        assert trapezoid == pytest.approx(gauss, rel=1e-3)

    def test_zero_generator(self, core):
        zero = GeneratorProfile(lambda x: 0.0 * x, meyer_scaling_profile, band=(0.125, 1.0))
        assert core.admissibility_constant(zero) == 0.0

    def test_divergent_generator(self, core):
        flat = GeneratorProfile(lambda x: np.where(np.abs(x) <= 1.0, 1.0, 0.0), meyer_scaling_profile,
                                phi_breakpoints=(0.5, 1.0))
        with pytest.raises(AdmissibilityError):
            core.admissibility_constant(flat)

    def test_unknown_rule(self, core, system):
        with pytest.raises(ValidationError):
            core.admissibility_constant(system.generator, rule="simpson")


class TestElements:
    """Test suite for the Fourier-domain system elements."""

    def test_zero_on_vertical_axis(self, system):
        xi = np.array([[0.0, 0.3], [0.0, -2.0]])
        np.testing.assert_array_equal(fourier_element(system, 1.0, 0.0, (0.0, 0.0), 1, xi), 0.0)

    def test_translation_is_a_phase(self, system):
        xi = np.array([[0.4, 0.1], [3.0, -1.0], [0.2, 0.2]])
        plain = fourier_element(system, 0.5, 0.3, (0.0, 0.0), 1, xi)
        shifted = fourier_element(system, 0.5, 0.3, (0.5, 0.0), 1, xi)
        np.testing.assert_allclose(np.abs(shifted), np.abs(plain), rtol=1e-14)

    def test_closed_form(self, system):
        gen = system.generator
        value = fourier_element(system, 0.25, 0.0, (0.0, 0.0), 1, np.array([2.0, 0.0]))
        expected = 0.25 ** 0.75 * gen.normalization * gen.psi1_hat(np.array([0.5]))[0] * gen.phi1_hat(np.array([0.0]))[0]
        assert value == pytest.approx(expected, rel=1e-14)

    def test_cone_swap(self, system):
        a = fourier_element(system, 1.0, 0.0, (0.0, 0.0), 1, np.array([0.5, 0.1]))
        b = fourier_element(system, 1.0, 0.0, (0.0, 0.0), -1, np.array([0.1, 0.5]))
        assert a == pytest.approx(b, rel=1e-14)
        assert abs(a) > 0

    @pytest.mark.parametrize("a, s, iota", [(0.0, 0.0, 1), (2.5, 0.0, 1), (1.0, 2.5, 1), (1.0, 0.0, 0)])
    def test_parameter_range(self, system, a, s, iota):
        with pytest.raises(ParameterRangeError):
            fourier_element(system, a, s, (0.0, 0.0), iota, np.array([1.0, 0.0]))

    def test_system_needs_minimal_ranges(self):
        with pytest.raises(ValidationError):
            ShearletSystem.default(gamma=0.5)


class TestQuadrature:
    """Test suite for the (a, s) quadrature rules."""

    def test_even_shear_nodes_rejected(self):
        with pytest.raises(ValidationError):
            QuadratureSpec(shear_nodes=16)

    def test_scale_rule_integrates_da(self):
        rule = QuadratureSpec(nodes_per_octave=32).scale_rule(0.01, 2.0)
        assert np.sum(rule.weights) == pytest.approx(1.99, rel=1e-3)
        assert np.sum(rule.coarse) == pytest.approx(1.99, rel=1e-2)

    def test_shear_rule(self):
        rule = QuadratureSpec(shear_nodes=9).shear_rule(-2.0, 2.0)
        assert np.sum(rule.weights) == pytest.approx(4.0)
        assert np.sum(rule.coarse) == pytest.approx(4.0)


class TestMultipliers:
    """Test suite for the shearlet multiplier and frame bounds."""

    def test_symbol_even_and_zero_at_origin(self, core, system, weight, quad):
        xi1 = np.array([0.0, 1.5, -1.5, 4.0, -4.0])
        xi2 = np.array([0.0, 0.5, -0.5, -3.0, 3.0])
        result = core.symbol(system, weight, xi1, xi2, quad)
        assert result.values[0] == 0.0
        assert np.all(result.values >= 0)
        assert result.values[1] == pytest.approx(result.values[2], rel=1e-12)
        assert result.values[3] == pytest.approx(result.values[4], rel=1e-12)

    def test_symbol_cones_sum(self, core, system, weight, quad):
        result = core.symbol(system, weight, np.array([2.0, 0.5]), np.array([0.5, 2.0]), quad)
        np.testing.assert_allclose(result.cones[1] + result.cones[-1], result.values, rtol=1e-12)

    def test_unknown_density(self, core, system, weight, quad):
        with pytest.raises(ValidationError):
            core.symbol(system, weight, np.array([1.0]), np.array([0.0]), quad, density="sobolev")

    def test_homogeneous_symbol_is_admissibility_constant(self, core, system):
        c_psi = core.admissibility_constant(system.generator)
        values = core.homogeneous_symbol(system, np.array([1.0, 3.0, -7.0, 0.0]), np.array([0.0, 2.0, -5.0, 1.0]),
                                         QuadratureSpec())
        np.testing.assert_allclose(values[:3], c_psi, rtol=1e-3)
        assert values[3] == 0.0

    def test_frame_bounds_positive(self, core, system, weight, quad):
        bounds = core.frame_bounds(system, weight, annulus=(1.0, 16.0), samples=16, quad=quad)
        assert bounds.a_est > 0
        assert bounds.b_est >= bounds.a_est

    def test_zero_weight_fails_frame_scan(self, core, system, quad):
        with pytest.raises(FrameBoundError):
            core.frame_bounds(system, DirectionalWeight.constant(0.0, 2.0), annulus=(1.0, 16.0), samples=8,
                              quad=quad)

    def test_invalid_annulus(self, core, system, weight, quad):
        with pytest.raises(ValidationError):
            core.frame_bounds(system, weight, annulus=(2.0, 1.0), quad=quad)
