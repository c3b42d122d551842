# Tests for the File utility class

import numpy as np
import pandas as pd
import pytest

from utils.errors import FieldFormatError
from utils.file import MAGIC
from utils.grid_field import GridField
from utils.phase_constructs import PhaseConstructs


class TestFieldFiles:
    """Test suite for ASGF1 field files."""

    def test_round_trip(self, file_instance, random_field):
        path = file_instance.write_field(random_field, "fields/u.asgf")
        assert path.parent.name == "fields"
        assert path.stat().st_size == 9 + 8 * 16 * 16
        restored = file_instance.read_field(path)
        np.testing.assert_array_equal(restored.values, random_field.values)

    def test_layout_is_row_major(self, file_instance):
        values = np.arange(64, dtype=float).reshape(8, 8)
        path = file_instance.write_field(GridField(8, values), "ramp.asgf")
        payload = path.read_bytes()
        assert payload[:5] == MAGIC
        assert np.frombuffer(payload[5:9], dtype="<u4")[0] == 8
        assert np.frombuffer(payload[9:17], dtype="<f8")[0] == 0.0
        assert np.frombuffer(payload[17:25], dtype="<f8")[0] == 1.0

    def test_missing_file(self, file_instance, temp_directory):
        with pytest.raises(FieldFormatError):
            file_instance.read_field(temp_directory / "absent.asgf")

    @pytest.mark.parametrize("payload", [
        b"ASGF2" + np.array([8], dtype="<u4").tobytes() + bytes(8 * 64),
        MAGIC + np.array([8], dtype="<u4").tobytes() + bytes(8 * 63),
        MAGIC + np.array([12], dtype="<u4").tobytes() + bytes(8 * 144),
        MAGIC + np.array([8], dtype="<u4").tobytes() + np.full(64, np.nan, dtype="<f8").tobytes(),
        b"ASG",
    ])
    def test_rejects_malformed(self, file_instance, temp_directory, payload):
        path = temp_directory / "bad.asgf"
        path.write_bytes(payload)
        with pytest.raises(FieldFormatError):
            file_instance.read_field(path)


class TestTables:
    """Test suite for the CSV tables."""

    def test_polygon_round_trip(self, file_instance, square):
        path = file_instance.write_polygon(square, "square.csv")
        assert path.read_text().splitlines()[0] == "x1,x2"
        np.testing.assert_allclose(file_instance.read_polygon(path).vertices, square.vertices)

    def test_read_table_checks_columns(self, file_instance):
        path = file_instance.write_table(pd.DataFrame({"a": [1.0], "b": [2.0]}), "ab.csv")
        assert list(file_instance.read_table(path, ["a", "b"]).columns) == ["a", "b"]
        with pytest.raises(FieldFormatError):
            file_instance.read_table(path, ["x1", "x2"])

    def test_empty_table(self, file_instance, temp_directory):
        path = temp_directory / "empty.csv"
        path.write_text("")
        with pytest.raises(FieldFormatError):
            file_instance.read_table(path)

    def test_covering_table(self, file_instance, square):
        cover = PhaseConstructs().covering(square, 0.04)
        frame = file_instance.read_table(file_instance.write_covering(cover, "cover.csv"))
        assert list(frame.columns) == ["edge_index", "k", "z1", "z2", "s"]
        assert len(frame) == 64

    def test_coefficient_table(self, file_instance, transforms, system, weight, random_field):
        coeffs = transforms.discrete_transform(random_field, system, weight, 1.0)
        frame = file_instance.read_table(file_instance.write_coefficients(coeffs, "coeffs.csv"))
        assert len(frame) == coeffs.entry_count
        assert list(frame.columns) == ["iota", "j", "k", "m1", "m2", "value"]

    def test_field_csv(self, file_instance):
        frame = file_instance.read_table(file_instance.write_field_csv(GridField.constant(0.25, 8), "f.csv"))
        assert len(frame) == 64
        assert np.allclose(frame["value"], 0.25)
