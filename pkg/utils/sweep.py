# Sweep tables and convergence-rate fits for the ε- and c-sweeps
# Rows carry their quadrature and resolution flags; fits and verdicts only use unflagged rows

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import math

import numpy as np
import pandas as pd

from utils.errors import ValidationError


def fit_slope(x, y) -> Tuple[float, float]:
    """
    Least-squares slope of log y against log x.

    Returns
    -------
    tuple of float
        (slope, root-mean-square residual of the log–log fit).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or x.shape != y.shape:
        raise ValidationError("Slope fit needs at least two matching points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValidationError("Slope fit needs positive data")
    log_x, log_y = np.log(x), np.log(y)
    coeffs = np.polyfit(log_x, log_y, 1)
    residual = float(np.sqrt(np.mean((np.polyval(coeffs, log_x) - log_y) ** 2)))
    return float(coeffs[0]), residual


def two_point_slope(x1: float, y1: float, x2: float, y2: float) -> float:
    if min(x1, y1, x2, y2) <= 0 or x1 == x2:
        raise ValidationError("Two-point slope needs positive data at distinct abscissae")
    return math.log(y2 / y1) / math.log(x2 / x1)


@dataclass
class SweepResult:
    """
    Rows (key, measured, reference, ratio, flags...) of one sweep, kept sorted by key (descending by default).

    `key` is ε for ε-sweeps and c for step sweeps.
    """
    name: str
    key: str = "eps"
    descending: bool = True
    rows: List[Dict[str, object]] = field(default_factory=list)
    verdict: Optional[bool] = None

    def add(self, key_value: float, measured: float, reference: float, converged: bool = True,
            resolved: bool = True, **extra) -> None:
        ratio = measured / reference if reference != 0 else math.nan
        row = {self.key: key_value, "measured": measured, "reference": reference, "ratio": ratio,
               "converged": bool(converged), "resolved": bool(resolved)}
        row.update(extra)
        self.rows.append(row)
        self.rows.sort(key=lambda r: float(r[self.key]), reverse=self.descending)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.rows)
        if not frame.empty:
            frame = frame.sort_values(self.key, ascending=not self.descending, kind="stable").reset_index(drop=True)
        return frame

    def usable(self) -> pd.DataFrame:
        frame = self.to_frame()
        if frame.empty:
            return frame
        return frame[frame["converged"] & frame["resolved"]].reset_index(drop=True)

    def fit_slope(self, column: str = "measured") -> Tuple[float, float]:
        frame = self.usable()
        return fit_slope(frame[self.key].to_numpy(), frame[column].to_numpy())

    def decreasing(self, column: str, tol: float = 0.0) -> bool:
        """
        Whether `column` decreases strictly along the row order over the usable rows.
        """
        values = self.usable()[column].to_numpy(dtype=float)
        return values.size >= 2 and bool(np.all(np.diff(values) < tol))
