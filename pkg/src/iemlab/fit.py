"""Least-squares slope fits with standard errors, for decay diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateFit


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    stderr: float
    npoints: int

    def clears_below(self, threshold: float, k: float = 2.0) -> bool:
        """slope < threshold by at least k standard errors."""
        return self.slope + k * self.stderr < threshold

    def clears_above(self, threshold: float, k: float = 2.0) -> bool:
        return self.slope - k * self.stderr > threshold


def fit_slope(xs: Sequence[float], ys: Sequence[float]) -> FitResult:
    """Ordinary least squares y = a x + b with the slope's standard error."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 3:
        raise DegenerateFit(f"need at least 3 points, got {x.size}")
    sxx = float(np.sum((x - x.mean()) ** 2))
    if sxx == 0:
        raise DegenerateFit("no spread in the abscissae")
    slope = float(np.sum((x - x.mean()) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    dof = max(x.size - 2, 1)
    stderr = float(np.sqrt(np.sum(resid**2) / dof / sxx))
    return FitResult(slope, intercept, stderr, int(x.size))


def tail_slice(n: int, fraction: float = 0.5, minimum: int = 3) -> slice:
    """Indices of the trailing window used for asymptotic fits."""
    k = max(minimum, int(n * fraction))
    return slice(max(0, n - k), n)
