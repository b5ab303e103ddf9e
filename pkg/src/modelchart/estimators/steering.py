"""Search vectors and parameter grids for the spectral estimators."""
from functools import lru_cache

import numpy as np

from ..errors import InvalidAngle, InvalidRange
from ..scenario import SPEED_OF_LIGHT

THETA_GRID = np.arange(361) * 0.5  # degrees, 0:0.5:180
RHO_GRID = np.arange(1001, dtype=float)  # metres, 0:1:1000
RS_RHO_GRID = np.arange(1, 1001, dtype=float)  # metres, 1:1:1000

DEFAULT_SUBCARRIER_SPACING = 312.5e3


def steering_theta(theta_deg, n_rx):
    """Half-wavelength ULA response, entry n = exp(j pi n cos theta).

    ``theta_deg`` may be a scalar (returns shape ``(n_rx,)``) or an array
    (returns one row per angle).
    """
    theta = np.asarray(theta_deg, dtype=float)
    if np.any(theta < 0) or np.any(theta > 180) or np.any(np.isnan(theta)):
        raise InvalidAngle(f"theta must lie in [0, 180] degrees, got {theta_deg}")
    if n_rx < 1:
        raise ValueError("n_rx must be >= 1")
    n = np.arange(n_rx)
    return np.exp(1j * np.pi * np.multiply.outer(np.cos(np.radians(theta)), n))


def steering_rho(rho_m, n_sc, delta_f=DEFAULT_SUBCARRIER_SPACING, c=SPEED_OF_LIGHT):
    """Per-subcarrier phase progression, entry s = exp(-j 2 pi rho s df / c)."""
    rho = np.asarray(rho_m, dtype=float)
    if np.any(rho < 0) or np.any(np.isnan(rho)):
        raise InvalidRange(f"rho must be >= 0, got {rho_m}")
    if n_sc < 1:
        raise ValueError("n_sc must be >= 1")
    s = np.arange(n_sc)
    return np.exp(-2j * np.pi * np.multiply.outer(rho, s) * delta_f / c)


@lru_cache(maxsize=64)
def _theta_table(n_rx):
    table = steering_theta(THETA_GRID, n_rx)
    table.flags.writeable = False
    return table


@lru_cache(maxsize=64)
def _rho_table(n_sc, delta_f, grid_key):
    grid = RHO_GRID if grid_key == "music" else RS_RHO_GRID
    table = steering_rho(grid, n_sc, delta_f)
    table.flags.writeable = False
    return table


def theta_table(n_rx):
    """Steering vectors for every point of :data:`THETA_GRID`, ``(361, n_rx)``."""
    return _theta_table(int(n_rx))


def rho_table(n_sc, delta_f=DEFAULT_SUBCARRIER_SPACING, grid="music"):
    """Range vectors over :data:`RHO_GRID` (``grid="music"``) or :data:`RS_RHO_GRID`."""
    return _rho_table(int(n_sc), float(delta_f), grid)
