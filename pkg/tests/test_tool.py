# Tests for the command-line tool and its exit codes

import argparse
import math

import numpy as np
import pandas as pd
import pytest

from main.main import main
from tools.tool import Tool, parse_float_list, parse_normals
from utils.grid_field import GridField


@pytest.fixture
def tool():
    """
    Create a Tool instance and dispose of it after the test.
    """
    instance = Tool()
    yield instance
    instance.dispose()


@pytest.fixture
def field_path(file_instance, temp_directory):
    def write(field: GridField, name: str = "u.asgf") -> str:
        return str(file_instance.write_field(field, temp_directory / name))
    return write


class TestParsers:
    """Test suite for the flag parsers."""

    def test_float_list(self):
        assert parse_float_list("0.5, 0.25") == (0.5, 0.25)

    @pytest.mark.parametrize("text", ["", "a,b"])
    def test_float_list_rejects(self, text):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_float_list(text)

    def test_normals_are_normalized(self):
        normals = parse_normals("1,0;1,1")
        assert normals[0] == (1.0, 0.0)
        assert normals[1] == pytest.approx((math.sqrt(0.5), math.sqrt(0.5)))

    @pytest.mark.parametrize("text", ["1,2,3", "0,0"])
    def test_normals_reject(self, text):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_normals(text)

    def test_command_is_required(self, tool):
        with pytest.raises(SystemExit):
            tool.main([])


class TestFieldCommands:
    """Test suite for the field-level commands."""

    def test_seminorm_of_zero_field(self, tool, small_config_file, field_path, capsys, temp_directory):
        path = field_path(GridField.constant(0.0, 16))
        code = tool.main(["seminorm", "--config", str(small_config_file), "--field", path, "--label", "zero"])
        assert code == 0
        assert capsys.readouterr().out.startswith("seminorm: PASS besov=0 h1=0")
        report = pd.read_csv(temp_directory / "output" / "zero.csv")
        assert report["value"][0] == 0.0
        assert report["gradient_method"][0] == "spectral"
        assert (temp_directory / "logs" / "test" / "run.log").exists()

    def test_seminorm_with_finite_differences(self, tool, small_config_file, field_path, random_field, capsys,
                                              temp_directory):
        path = field_path(random_field)
        code = tool.main(["seminorm", "--config", str(small_config_file), "--field", path, "--label", "fd",
                          "--gradient", "fd"])
        assert code == 0
        assert capsys.readouterr().out.rstrip().endswith("gradient=fd")
        report = pd.read_csv(temp_directory / "output" / "fd.csv")
        assert report["gradient_method"][0] == "fd"
        assert report["dirichlet"][0] > 0.0

    def test_energy_of_constant_field(self, tool, small_config_file, field_path, temp_directory):
        path = field_path(GridField.constant(0.5, 16))
        code = tool.main(["energy", "--config", str(small_config_file), "--field", path, "--eps", "0.03125",
                          "--label", "half"])
        assert code == 0
        report = pd.read_csv(temp_directory / "output" / "half.csv")
        assert list(report["label"]) == ["half_gl", "half_sgl"]
        np.testing.assert_allclose(report["potential"], 0.5, rtol=1e-12)

    def test_transform_entry_count(self, tool, small_config_file, field_path, random_field, temp_directory):
        path = field_path(random_field)
        code = tool.main(["transform", "--config", str(small_config_file), "--field", path, "--c", "1",
                          "--label", "t"])
        assert code == 0
        summary = pd.read_csv(temp_directory / "output" / "t.csv")
        assert summary["entries"][0] == summary["expected_entries"][0]
        coefficients = pd.read_csv(temp_directory / "output" / "t_coefficients.csv")
        assert len(coefficients) == summary["entries"][0]


class TestExitCodes:
    """Test suite for the mapping of errors to exit codes."""

    def test_zero_weight_fails_frame_scan(self, tool, temp_directory, capsys):
        config = temp_directory / "zero_weight.yaml"
        config.write_text("grid:\n  n: 16\nquadrature:\n  nodes_per_octave: 8\n  shear_nodes: 17\n"
                          "weight:\n  kind: constant\n  value: 0.0\n", encoding="utf-8")
        assert tool.main(["frame-bounds", "--config", str(config)]) == 2
        assert "FrameBoundError" in capsys.readouterr().out

    def test_malformed_field(self, tool, small_config_file, temp_directory):
        path = temp_directory / "bad.asgf"
        path.write_bytes(b"not a field")
        assert tool.main(["seminorm", "--config", str(small_config_file), "--field", str(path)]) == 5

    def test_missing_field(self, tool, small_config_file):
        assert tool.main(["seminorm", "--config", str(small_config_file)]) == 3

    def test_invalid_grid(self, tool, small_config_file):
        assert tool.main(["energy", "--config", str(small_config_file), "--grid", "12"]) == 3

    def test_missing_config(self, tool, temp_directory):
        assert tool.main(["seminorm", "--config", str(temp_directory / "absent.yaml")]) == 3

    def test_entry_point(self, small_config_file):
        assert main(["seminorm", "--config", str(small_config_file)]) == 3
