# Tests for the sweep tables and slope fits

import math

import numpy as np
import pytest

from utils.errors import ValidationError
from utils.sweep import SweepResult, fit_slope, two_point_slope


class TestSlopes:
    """Test suite for the log-log slope fits."""

    def test_power_law(self):
        x = np.array([0.5, 0.25, 0.125, 0.0625])
        slope, residual = fit_slope(x, 3.0 * x ** 2)
        assert slope == pytest.approx(2.0)
        assert residual == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("x, y", [([1.0], [1.0]), ([1.0, 2.0], [1.0]), ([1.0, 2.0], [0.0, 1.0])])
    def test_rejects_bad_data(self, x, y):
        with pytest.raises(ValidationError):
            fit_slope(x, y)

    def test_two_point_slope(self):
        assert two_point_slope(1.0, 2.0, 2.0, 8.0) == pytest.approx(2.0)
        with pytest.raises(ValidationError):
            two_point_slope(1.0, 1.0, 1.0, 2.0)


class TestSweepResult:
    """Test suite for sweep tables."""

    def make_sweep(self) -> SweepResult:
        sweep = SweepResult("heaviside")
        sweep.add(2.0 ** -5, 4.0, 2.0)
        sweep.add(2.0 ** -4, 2.0, 2.0)
        sweep.add(2.0 ** -6, 8.0, 2.0, resolved=False)
        return sweep

    def test_rows_sorted_descending(self):
        frame = self.make_sweep().to_frame()
        assert list(frame["eps"]) == [2.0 ** -4, 2.0 ** -5, 2.0 ** -6]
        assert list(frame["ratio"]) == [1.0, 2.0, 4.0]

    def test_ascending_key(self):
        sweep = SweepResult("steps", key="c", descending=False)
        sweep.add(0.5, 1.0, 1.0)
        sweep.add(0.25, 1.0, 1.0)
        assert list(sweep.to_frame()["c"]) == [0.25, 0.5]

    def test_zero_reference(self):
        sweep = SweepResult("x")
        sweep.add(0.1, 1.0, 0.0)
        assert math.isnan(sweep.rows[0]["ratio"])

    def test_usable_drops_flagged_rows(self):
        usable = self.make_sweep().usable()
        assert len(usable) == 2

    def test_fit_uses_usable_rows(self):
        slope, _ = self.make_sweep().fit_slope()
        assert slope == pytest.approx(-1.0)

    def test_decreasing(self):
        sweep = self.make_sweep()
        assert not sweep.decreasing("measured")
        assert sweep.decreasing("ratio", tol=0.0) is False
        descending = SweepResult("x")
        descending.add(0.2, 1.0, 1.0)
        descending.add(0.1, 0.5, 1.0)
        assert descending.decreasing("measured")

    def test_extra_columns(self):
        sweep = SweepResult("x")
        sweep.add(0.1, 1.0, 1.0, normal="(1,0)")
        assert sweep.to_frame()["normal"][0] == "(1,0)"
