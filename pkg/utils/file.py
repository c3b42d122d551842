# File utility class for the experiment inputs and outputs
# Reads and writes ASGF1 binary fields and the CSV tables (polygons, coverings, coefficients, fields, traces)

from pathlib import Path
from typing import Union
import logging

import numpy as np
import pandas as pd

from utils.errors import FieldFormatError, ValidationError
from utils.grid_field import GridField

MAGIC = b"ASGF1"
FLOAT_FORMAT = "%.12e"

PathLike = Union[str, Path]


class File:
    def __init__(self, instance_id=None, output_dir: PathLike = "output"):
        """
        Initialize the File utility.

        Parameters
        ----------
        instance_id : int, optional
            The instance ID for logging purposes. If not provided, uses default logger.
        output_dir : str or Path
            Directory relative output names resolve against.
        """
        # Logging
        if instance_id:
            logger_name = f"utils.file.instance_{instance_id}"
        else:
            logger_name = "utils.file"
        self.logger = logging.getLogger(logger_name)
        self.output_dir = Path(output_dir)
        self.logger.info("Initialized File utility")

    def resolve(self, name: PathLike) -> Path:
        path = Path(name)
        if not path.is_absolute():
            path = self.output_dir / path
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    # MARK: Fields
    def write_field(self, f: GridField, name: PathLike) -> Path:
        """
        Write an ASGF1 file: magic, u32 little-endian n, n² little-endian float64 row-major.
        """
        path = self.resolve(name)
        header = MAGIC + np.array([f.n], dtype="<u4").tobytes()
        path.write_bytes(header + np.ascontiguousarray(f.values, dtype="<f8").tobytes())
        self.logger.info(f"Wrote {f.n}x{f.n} field to {path}")
        return path

    def read_field(self, path: PathLike) -> GridField:
        """
        Read an ASGF1 file.

        Raises
        ------
        FieldFormatError
            For a missing file, bad magic, a size mismatch or non-finite samples.
        """
        try:
            payload = Path(path).read_bytes()
        except OSError as e:
            self.logger.error(f"Cannot read field {path}: {e}")
            raise FieldFormatError(f"Cannot read field '{path}': {e}") from e
        if len(payload) < 9 or payload[:5] != MAGIC:
            self.logger.error(f"Bad ASGF1 header in {path}")
            raise FieldFormatError(f"'{path}' is not an ASGF1 field")
        n = int(np.frombuffer(payload[5:9], dtype="<u4")[0])
        body = payload[9:]
        if len(body) != 8 * n * n:
            self.logger.error(f"ASGF1 payload of {path} holds {len(body)} bytes, expected {8 * n * n}")
            raise FieldFormatError(f"'{path}' has a truncated or oversized payload for n={n}")
        values = np.frombuffer(body, dtype="<f8").reshape(n, n).astype(float)
        if not np.all(np.isfinite(values)):
            raise FieldFormatError(f"'{path}' contains non-finite samples")
        try:
            return GridField(n, values)
        except ValidationError as e:
            raise FieldFormatError(f"'{path}': {e}") from e

    def write_field_csv(self, f: GridField, name: PathLike) -> Path:
        x1, x2 = f.points()
        frame = pd.DataFrame({"x1": x1.ravel(), "x2": x2.ravel(), "value": f.values.ravel()})
        return self.write_table(frame, name)

    # MARK: Tables
    def write_table(self, frame: pd.DataFrame, name: PathLike) -> Path:
        path = self.resolve(name)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        self.logger.info(f"Wrote {len(frame)} rows to {path}")
        return path

    def read_table(self, path: PathLike, columns=None) -> pd.DataFrame:
        try:
            frame = pd.read_csv(path)
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            self.logger.error(f"Cannot read table {path}: {e}")
            raise FieldFormatError(f"Cannot read table '{path}': {e}") from e
        if columns is not None and list(frame.columns) != list(columns):
            raise FieldFormatError(f"'{path}' has columns {list(frame.columns)}, expected {list(columns)}")
        return frame

    def read_polygon(self, path: PathLike):
        from utils.phase_constructs import Polygon

        frame = self.read_table(path, ["x1", "x2"])
        return Polygon(frame.to_numpy(dtype=float))

    def write_polygon(self, polygon, name: PathLike) -> Path:
        return self.write_table(polygon.to_frame(), name)

    def write_covering(self, covering, name: PathLike) -> Path:
        return self.write_table(covering.to_frame(), name)

    def write_coefficients(self, coeffs, name: PathLike) -> Path:
        return self.write_table(coeffs.to_frame(), name)

    def write_trace(self, trajectory, name: PathLike) -> Path:
        return self.write_table(trajectory.trace, name)
