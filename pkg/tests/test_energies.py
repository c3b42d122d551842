# Tests for the double-well potential, directional weights, anisotropy norms and the energies

import math

import numpy as np
import pytest

from utils.energies import (
    AnisotropyNorm, DirectionalWeight, EnergyReport, StepMap, double_well, norm_from_weight, perimeter_constant,
    perimeter_functional, potential_term, slack,
)
from utils.errors import ValidationError
from utils.grid_field import GridField
from utils.phase_constructs import Polygon


class TestPotential:
    """Test suite for the double well and its derived constants."""

    def test_wells(self):
        np.testing.assert_allclose(double_well(np.array([0.0, 1.0, 0.5])), [0.0, 0.0, 1.0 / 16.0])

    def test_potential_of_half(self):
        assert potential_term(GridField.constant(0.5, 16), 2.0 ** -5) == pytest.approx(0.5, rel=1e-14)

    def test_potential_rejects_eps(self):
        with pytest.raises(ValidationError):
            potential_term(GridField.constant(0.5, 16), 0.0)

    def test_perimeter_constant(self):
        assert perimeter_constant() == pytest.approx(1.0 / 6.0, abs=1e-12)

    def test_slack(self):
        assert slack(0.0) == 0.0
        assert slack(2.0) == pytest.approx(1.0)


class TestDirectionalWeight:
    """Test suite for piecewise-linear directional weights."""

    def test_ramp_values(self):
        w = DirectionalWeight.ramp(2.0, 1.0)
        np.testing.assert_allclose(w(1, np.array([0.0, 1.0, 1.5, 2.0, 2.5])), [1.0, 1.0, 0.5, 0.0, 0.0])
        assert w.positive_on_core
        assert w.lipschitz == pytest.approx(1.0)

    def test_zero_weight_is_allowed_but_not_positive(self):
        w = DirectionalWeight.constant(0.0, 2.0)
        assert not w.positive_on_core

    def test_asymmetric_cones(self):
        w = DirectionalWeight.piecewise([-2.0, 2.0], [1.0, 1.0], [0.5, 0.5])
        assert w(1, 0.0) == pytest.approx(1.0)
        assert w(-1, 0.0) == pytest.approx(0.5)

    def test_scaled(self):
        w = DirectionalWeight.ramp(2.0, 1.0).scaled(3.0)
        assert w(1, 0.0) == pytest.approx(3.0)

    @pytest.mark.parametrize("breaks, values", [
        ([-2.0, 2.0], [1.0, -1.0]),
        ([2.0, -2.0], [1.0, 1.0]),
        ([-3.0, 2.0], [1.0, 1.0]),
        ([0.0], [1.0]),
    ])
    def test_rejects_invalid(self, breaks, values):
        with pytest.raises(ValidationError):
            DirectionalWeight.piecewise(breaks, values)


class TestAnisotropyNorm:
    """Test suite for anisotropy norms and the weight association."""

    def test_constant_weight_norm(self):
        w = DirectionalWeight.constant(1.0, 2.0)
        n = np.array([[1.0, 0.0], [0.0, 1.0], [math.sqrt(0.5), math.sqrt(0.5)]])
        np.testing.assert_allclose(norm_from_weight(w, n), 1.0, rtol=1e-12)

    def test_norm_from_weight_needs_unit_vectors(self):
        with pytest.raises(ValidationError):
            norm_from_weight(DirectionalWeight.constant(1.0, 2.0), np.array([2.0, 0.0]))

    def test_derived_norm_is_homogeneous(self):
        norm = AnisotropyNorm.from_weight(DirectionalWeight.ramp(2.0, 1.0))
        v = np.array([[0.3, -0.8], [1.0, 0.2]])
        np.testing.assert_allclose(norm(3.0 * v), 3.0 * norm(v), rtol=1e-12)
        assert norm.source == "weight"

    def test_self_test(self):
        check = AnisotropyNorm.euclidean().self_test(np.random.default_rng(0))
        assert check.homogeneous and check.positive and check.triangle

    def test_validate_rejects_non_norm(self):
        squared = AnisotropyNorm(lambda v: v[..., 0] ** 2 + v[..., 1] ** 2, "squared")
        with pytest.raises(ValidationError):
            squared.validate()

    def test_ellipse_axes(self):
        with pytest.raises(ValidationError):
            AnisotropyNorm.ellipse(0.0, 1.0)
        assert AnisotropyNorm.ellipse(1.0, 2.0)(np.array([0.0, 1.0])) == pytest.approx(2.0)

    def test_association_uses_absolute_components(self):
        norm = AnisotropyNorm.from_weight(DirectionalWeight.constant(1.0, 2.0))
        v = np.array([[-1.0, 0.0], [0.0, -1.0], [-math.sqrt(0.5), -math.sqrt(0.5)]])
        np.testing.assert_allclose(norm(v), 1.0, rtol=1e-12)

    def test_negative_directions(self):
        assert AnisotropyNorm.euclidean().negative_directions().size == 0
        signed = AnisotropyNorm.from_weight(DirectionalWeight.constant(1.0, 2.0)).negative_directions()
        assert signed.size > 0
        assert np.all(signed.sum(axis=1) < 0)

    def test_weight_from_euclidean(self, energies):
        fitted = energies.weight_from_norm(AnisotropyNorm.euclidean(), 2.0, 1.0)
        assert fitted.fit_residual is not None
        norm = AnisotropyNorm.from_weight(fitted)
        assert norm.source == "fitted"
        angles = np.linspace(0.0, 2.0 * np.pi, 90, endpoint=False)
        n = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
        assert np.max(np.abs(norm(n) - 1.0)) < 0.02


class TestEnergies:
    """Test suite for GL, SGL, DSGL and the tame-set test."""

    def test_gl_of_constant(self, energies, euclidean):
        report = energies.gl_energy(GridField.constant(0.5, 16), 2.0 ** -5, euclidean)
        assert report.elastic == pytest.approx(0.0, abs=1e-20)
        assert report.potential == pytest.approx(0.5)
        assert report.total == pytest.approx(0.5)

    def test_gl_rejects_eps(self, energies, euclidean):
        with pytest.raises(ValidationError):
            energies.gl_energy(GridField.constant(0.5, 16), -1.0, euclidean)

    def test_sgl_of_constant(self, energies, system, weight, quad):
        norm = AnisotropyNorm.from_weight(weight)
        report = energies.sgl_energy(GridField.constant(0.5, 16), 2.0 ** -5, system, weight, norm, quad)
        assert report.tame and not report.infinite
        assert report.potential == pytest.approx(0.5)
        assert report.elastic == pytest.approx(0.0, abs=1e-20)

    def test_zero_field_is_tame(self, energies, system, weight, quad):
        result = energies.tame_membership(GridField.constant(0.0, 16), system, weight,
                                          AnisotropyNorm.from_weight(weight), quad)
        assert result.member
        assert result.margin == pytest.approx(0.0, abs=1e-20)

    def test_dsgl_rejects_eps(self, energies, system, weight, quad, random_field):
        with pytest.raises(ValidationError):
            energies.dsgl_energy(random_field, 0.0, system, weight, AnisotropyNorm.from_weight(weight),
                                 StepMap(), quad)

    def test_dsgl_reports_step(self, energies, system, weight, quad, random_field):
        report = energies.dsgl_energy(random_field, 0.5, system, weight, AnisotropyNorm.from_weight(weight),
                                      StepMap(0.6, 1.0), quad)
        assert report.step_c == pytest.approx(0.5 ** 0.6)
        assert report.elastic >= 0.0

    def test_report_row(self):
        row = EnergyReport("x", 0.1, 1.0, 2.0, 16, tame=False).as_row()
        assert row["total"] == pytest.approx(3.0)
        assert row["tame_flag"] is False


class TestStepMapAndPerimeter:
    """Test suite for the step map and the perimeter functional."""

    def test_step_map(self):
        assert StepMap(0.6, 1.0)(2.0 ** -5) == pytest.approx(2.0 ** -3)
        assert StepMap(0.6, 1.0)(4.0) == 1.0

    def test_step_map_rejects_power(self):
        with pytest.raises(ValidationError):
            StepMap(0.0, 1.0)

    def test_square_perimeter(self, square, euclidean):
        assert perimeter_functional(square, euclidean) == pytest.approx(1.6 / 6.0)

    def test_l1_perimeter_of_square(self):
        assert perimeter_functional(Polygon.square(0.2, 0.6), AnisotropyNorm.l1()) == pytest.approx(1.6 / 6.0)
