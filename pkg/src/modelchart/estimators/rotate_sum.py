"""Rotate-and-sum (RS) spectral search.

For each subcarrier row ``c`` the rank-1 matrix ``S = c^H c`` has entries
``conj(c_a) c_b``; under a single ray their phases advance by the per-antenna
rotation factor ``exp(j pi cos theta)`` along every row and column. RS
counter-rotates each entry by the candidate factor raised to ``a - b`` and
sums, so only the true angle adds coherently. The distance search mirrors
this over antenna columns with ``S = c c^H`` and the per-subcarrier factor.

No eigendecomposition is involved: the cost is one table lookup and one
multiply-accumulate per matrix entry and grid point.
"""
from functools import lru_cache

import numba
import numpy as np

from ..errors import InsufficientSubcarriers, NoSignal
from .music import PseudoSpectrum
from .steering import DEFAULT_SUBCARRIER_SPACING, RS_RHO_GRID, THETA_GRID, rho_table, theta_table

# Summation order is fixed so results are reproducible bit for bit: each
# Gram entry accumulates its rows in index order, then every grid point
# sums the counter-rotated entries row-major.


@numba.njit(cache=True, nogil=True)
def _gram_rows(csi):
    # S[a, b] = sum_r conj(c_ra) c_rb
    n_r, n = csi.shape
    s = np.zeros((n, n), dtype=np.complex128)
    for r in range(n_r):
        for a in range(n):
            ca = np.conj(csi[r, a])
            for b in range(n):
                s[a, b] += ca * csi[r, b]
    return s


@numba.njit(cache=True, nogil=True)
def _gram_cols(csi):
    # S[s, t] = sum_n c_sn conj(c_tn)
    n, n_c = csi.shape
    s = np.zeros((n, n), dtype=np.complex128)
    for col in range(n_c):
        for a in range(n):
            ca = csi[a, col]
            for b in range(n):
                s[a, b] += ca * np.conj(csi[b, col])
    return s


@numba.njit(cache=True, nogil=True)
def _rotate_sum(s, tr, ti, conj_left):
    # |sum_ab S[a, b] rot_g[a, b]| for every grid point g, with rot_g[a, b] =
    # t_a conj(t_b) (angle) or conj(t_a) t_b (distance). ``tr``/``ti`` hold the
    # factor table transposed to (n, n_grid); the grid loop is innermost so it
    # vectorizes while each point still sums its terms in (a, b) order.
    n, n_g = tr.shape
    sa = -1.0 if conj_left else 1.0
    sb = 1.0 if conj_left else -1.0
    accr = np.zeros(n_g)
    acci = np.zeros(n_g)
    for a in range(n):
        for b in range(n):
            sr = s[a, b].real
            si = s[a, b].imag
            for g in range(n_g):
                ar = tr[a, g]
                ai = sa * ti[a, g]
                br = tr[b, g]
                bi = sb * ti[b, g]
                rr = ar * br - ai * bi
                ri = ar * bi + ai * br
                accr[g] += sr * rr - si * ri
                acci[g] += sr * ri + si * rr
    return np.hypot(accr, acci)


def _split(table):
    t = np.ascontiguousarray(table.T)
    return np.ascontiguousarray(t.real), np.ascontiguousarray(t.imag)


@lru_cache(maxsize=32)
def _theta_factors(n_rx):
    return _split(theta_table(n_rx))


@lru_cache(maxsize=32)
def _rho_factors(n_sc, delta_f):
    return _split(rho_table(n_sc, delta_f, grid="rs"))


def _nonzero(csi):
    csi = np.asarray(csi, dtype=np.complex128)
    if csi.ndim == 1:
        csi = csi[None, :]
    if not np.any(csi):
        raise NoSignal("CSI is identically zero")
    return csi


def rs_spectrum_theta(csi):
    """``|C(theta)|`` on the 0.5 degree grid."""
    csi = _nonzero(csi)
    if csi.shape[1] < 2:
        raise ValueError("RS angle search needs at least 2 antennas")
    values = _rotate_sum(_gram_rows(csi), *_theta_factors(csi.shape[1]), False)
    return PseudoSpectrum(grid=THETA_GRID, values=values)


def rs_spectrum_rho(csi, delta_f=DEFAULT_SUBCARRIER_SPACING):
    """``|C(rho)|`` on the 1..1000 m grid."""
    csi = _nonzero(csi)
    if csi.shape[0] < 2:
        raise InsufficientSubcarriers("RS distance search needs at least 2 subcarriers")
    values = _rotate_sum(_gram_cols(csi), *_rho_factors(csi.shape[0], float(delta_f)), True)
    return PseudoSpectrum(grid=RS_RHO_GRID, values=values)


def rs_estimate_theta(csi):
    return rs_spectrum_theta(csi).peak()


def rs_estimate_rho(csi, delta_f=DEFAULT_SUBCARRIER_SPACING):
    return rs_spectrum_rho(csi, delta_f).peak()
