# Tests for the multiplier table and the semi-implicit gradient flow

import numpy as np
import pytest

from utils.errors import MinimizerDivergenceError, ValidationError
from utils.grid_field import GridField
from utils.minimizer import MultiplierTable, default_scale_cap, flow_energy, flow_step, multiplier_gap


def h1_table(n: int) -> MultiplierTable:
    k = np.fft.fftfreq(n, d=1.0 / n)
    sigma = (2 * np.pi) ** 2 * (k[:, None] ** 2 + k[None, :] ** 2)
    return MultiplierTable(n, sigma, np.zeros((n, n)))


def near_half(random_field: GridField) -> GridField:
    return random_field.with_values(0.5 + 0.1 * random_field.values / np.max(np.abs(random_field.values)))


class TestMultiplierTable:
    """Test suite for the tabulated multiplier."""

    def test_rejects_variant(self):
        with pytest.raises(ValidationError):
            MultiplierTable(16, np.zeros((16, 16)), np.zeros((16, 16)), variant="hybrid")

    def test_rejects_negative_values(self):
        with pytest.raises(ValidationError):
            MultiplierTable(16, -np.ones((16, 16)), np.zeros((16, 16)))

    def test_full_variant_adds_low_pass(self):
        table = MultiplierTable(16, np.ones((16, 16)), np.full((16, 16), 2.0), variant="full")
        np.testing.assert_allclose(table.values, 3.0)
        assert np.all(MultiplierTable(16, np.ones((16, 16)), np.full((16, 16), 2.0)).values == 1.0)


class TestFlowStep:
    """Test suite for a single semi-implicit step."""

    @pytest.mark.parametrize("phase", [0.0, 1.0])
    def test_wells_are_fixed_points(self, phase):
        u = GridField.constant(phase, 16)
        np.testing.assert_allclose(flow_step(u, 0.01, 0.1, h1_table(16)).values, phase, atol=1e-14)

    def test_rejects_mismatched_grid(self):
        with pytest.raises(ValidationError):
            flow_step(GridField.constant(0.5, 8), 0.01, 0.1, h1_table(16))

    def test_rejects_step(self):
        with pytest.raises(ValidationError):
            flow_step(GridField.constant(0.5, 16), 0.0, 0.1, h1_table(16))

    def test_energy_of_constant(self):
        elastic, potential = flow_energy(GridField.constant(0.5, 16), 0.25, h1_table(16))
        assert elastic == pytest.approx(0.0, abs=1e-20)
        assert potential == pytest.approx(1.0 / 16.0)


class TestMinimize:
    """Test suite for the gradient-flow driver."""

    def test_energy_decreases(self, minimizer, random_field):
        trajectory = minimizer.minimize(near_half(random_field), 0.1, h1_table(16), max_steps=20,
                                        energy_tol=1e-300)
        totals = trajectory.trace["total"].to_numpy()
        assert trajectory.steps == 20
        assert np.all(np.diff(totals) <= 1e-12 * totals[:-1])
        assert trajectory.stability <= 1e-12
        assert trajectory.tau == pytest.approx(0.01)

    def test_snapshots(self, minimizer, random_field, mocker):
        snapshot = mocker.Mock()
        minimizer.minimize(near_half(random_field), 0.1, h1_table(16), max_steps=6, energy_tol=1e-300,
                           snapshot=snapshot, snapshot_every=2)
        assert snapshot.call_count == 3
        assert [call.args[0] for call in snapshot.call_args_list] == [2, 4, 6]

    def test_stationary_field_converges(self, minimizer):
        trajectory = minimizer.minimize(GridField.constant(1.0, 16), 0.1, h1_table(16), max_steps=10)
        assert trajectory.converged
        assert trajectory.steps == 1

    def test_divergence(self, minimizer, mocker):
        mocker.patch("utils.minimizer.flow_step", side_effect=lambda u, *args: u.scaled(1.1))
        zero = MultiplierTable(16, np.zeros((16, 16)), np.zeros((16, 16)))
        with pytest.raises(MinimizerDivergenceError):
            minimizer.minimize(GridField.constant(1.0, 16), 0.1, zero, max_steps=50)

    def test_rejects_eps(self, minimizer):
        with pytest.raises(ValidationError):
            minimizer.minimize(GridField.constant(0.5, 16), 0.0, h1_table(16), tau=0.01)


class TestScaleCapAndMultiplier:
    """Test suite for the scale cap and the tabulated shearlet multiplier."""

    def test_scale_cap(self, system):
        centre = np.zeros((16, 16))
        centre[8, 8] = 1.0
        near_edge = np.zeros((16, 16))
        near_edge[1, 8] = 1.0
        assert default_scale_cap(system, GridField(16, centre)) == pytest.approx(2.0)
        assert default_scale_cap(system, GridField(16, near_edge)) == pytest.approx(0.125)
        assert default_scale_cap(system, GridField.constant(0.0, 16)) == system.gamma

    def test_rejects_large_cap(self, minimizer, system, weight, quad):
        with pytest.raises(ValidationError):
            minimizer.build_multiplier(system, weight, 16, gamma0=3.0, quad=quad)

    def test_build_multiplier(self, minimizer, system, weight, quad):
        table = minimizer.build_multiplier(system, weight, 16, quad=quad)
        assert table.values.shape == (16, 16)
        assert np.all(table.values >= 0)
        assert table.values[0, 0] == 0.0

    def test_gap_vanishes_for_matching_table(self, minimizer, transforms, system, weight, quad, random_field):
        table = minimizer.build_multiplier(system, weight, 16, quad=quad)
        besov = transforms.besov_continuous(random_field, system, weight, quad, route="spectral")
        assert multiplier_gap(random_field, table, besov) == pytest.approx(0.0, abs=1e-9 * besov.value)
        assert multiplier_gap(random_field, table, besov.value) == pytest.approx(0.0, abs=1e-9 * besov.value)
