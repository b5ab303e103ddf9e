"""Distance proxies from CSI magnitudes: inverse square root sum and log regression."""
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateInput, SingularFit


def mean_magnitudes(csi):
    """Per-antenna magnitude, averaged over the rows of a CSI matrix."""
    csi = np.asarray(csi)
    if csi.ndim == 1:
        return np.abs(csi)
    return np.abs(csi).mean(axis=0)


def magnitude_sum(csi):
    total = float(np.sum(mean_magnitudes(csi)))
    if not total > 0:
        raise DegenerateInput("CSI magnitudes sum to zero")
    return total


def isq_rho(csi):
    """ISQ distance: ``1 / sqrt(sum_n |h_n|)``.

    For a free-space ray ``|h| ~ rho**-2`` this is proportional to ``rho``;
    the scale is irrelevant for rank-based chart quality.
    """
    return 1.0 / np.sqrt(magnitude_sum(csi))


def log_magnitude(csi):
    """Regressor ``X = log sum_n |h_n|``."""
    return float(np.log(magnitude_sum(csi)))


@dataclass(frozen=True)
class LrModel:
    """Linear map ``rho = a * X + b``."""

    a: float
    b: float

    def predict(self, x):
        return self.a * np.asarray(x) + self.b


def lr_fit(x, rho):
    """Ordinary least squares of distance against ``X``."""
    x = np.asarray(x, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if x.shape != rho.shape or x.ndim != 1:
        raise ValueError("x and rho must be 1D arrays of equal length")
    if x.size < 2 or np.ptp(x) == 0:
        raise SingularFit("need at least two distinct X values")
    xm = x.mean()
    dx = x - xm
    a = float(np.dot(dx, rho - rho.mean()) / np.dot(dx, dx))
    return LrModel(a=a, b=float(rho.mean() - a * xm))


def lr_rho(model, csi):
    return float(model.predict(log_magnitude(csi)))
