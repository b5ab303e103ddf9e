"""MUSIC estimation of the angle of arrival and the BS-UE distance.

The CSI matrix is ``n_sc x n_rx``. For the angle, each subcarrier row is one
snapshot of the array; for the distance, each antenna column is one snapshot
across subcarriers.
"""
from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientSubcarriers, NoNoiseSubspace, NoSignal
from ..numerics import hermitian_eig
from .steering import (DEFAULT_SUBCARRIER_SPACING, RHO_GRID, THETA_GRID, rho_table,
                       theta_table)

DEFAULT_THRESHOLD = 0.5
SPECTRUM_CLAMP = 1e12


@dataclass(frozen=True)
class SubspaceSplit:
    signal_dim: int
    noise_basis: np.ndarray

    @property
    def noise_dim(self):
        return self.noise_basis.shape[1]


@dataclass(frozen=True)
class PseudoSpectrum:
    grid: np.ndarray
    values: np.ndarray

    def peak(self):
        """Grid value at the global maximum (first one on ties)."""
        return float(self.grid[int(np.argmax(self.values))])


def snapshot_covariance(csi, axis="antennas"):
    """Sample covariance ``E[h h^H]`` of one UE's CSI.

    ``axis="antennas"`` averages over subcarrier rows and gives an
    ``n_rx x n_rx`` matrix; ``axis="subcarriers"`` averages over antenna
    columns and gives ``n_sc x n_sc``.
    """
    csi = np.asarray(csi, dtype=np.complex128)
    if csi.ndim != 2 or csi.size == 0:
        raise ValueError(f"expected a non-empty 2D CSI matrix, got shape {csi.shape}")
    if axis == "antennas":
        return csi.T @ csi.conj() / csi.shape[0]
    if axis == "subcarriers":
        return csi @ csi.conj().T / csi.shape[1]
    raise ValueError(f"unknown axis {axis!r}")


def split_subspace(eig, threshold_ratio=DEFAULT_THRESHOLD, max_signal_dim=None):
    """Separate signal and noise eigenvectors by an eigenvalue threshold.

    Eigenvalues at or above ``threshold_ratio * lambda_max`` count as signal
    (at least one). ``max_signal_dim`` optionally caps the signal dimension,
    which guarantees a noise subspace when set below the matrix size.
    """
    lam = eig.eigenvalues
    n = len(lam)
    signal_dim = max(1, int(np.count_nonzero(lam >= threshold_ratio * lam[0])))
    if max_signal_dim is not None:
        signal_dim = min(signal_dim, max(1, max_signal_dim))
    if signal_dim >= n:
        raise NoNoiseSubspace(f"all {n} eigenvalues exceed the threshold")
    return SubspaceSplit(signal_dim=signal_dim, noise_basis=eig.eigenvectors[:, signal_dim:])


def music_spectrum(split, grid, steering_fn):
    """Pseudospectrum ``1 / ||N^H a(g)||`` over ``grid``.

    ``steering_fn(grid)`` must return one search vector per row. An exactly
    orthogonal search vector is clamped to :data:`SPECTRUM_CLAMP`.
    """
    vectors = np.asarray(steering_fn(grid))
    if vectors.shape[-1] != split.noise_basis.shape[0]:
        raise ValueError("search vector length does not match the noise basis")
    proj = vectors @ split.noise_basis.conj()
    norm = np.sqrt(np.sum(proj.real ** 2 + proj.imag ** 2, axis=-1))
    with np.errstate(divide="ignore"):
        values = np.minimum(1.0 / norm, SPECTRUM_CLAMP)
    return PseudoSpectrum(grid=np.asarray(grid), values=values)


def _noise_split(cov, threshold_ratio):
    eig = hermitian_eig(cov)
    if eig.eigenvalues[0] <= 0:
        raise NoSignal("covariance has no positive eigenvalue")
    return split_subspace(eig, threshold_ratio, max_signal_dim=cov.shape[0] - 1)


def _check_signal(csi):
    csi = np.asarray(csi, dtype=np.complex128)
    if csi.ndim == 1:
        csi = csi[None, :]
    if not np.any(csi):
        raise NoSignal("CSI is identically zero")
    return csi


def theta_spectrum(csi, threshold_ratio=DEFAULT_THRESHOLD):
    csi = _check_signal(csi)
    split = _noise_split(snapshot_covariance(csi, "antennas"), threshold_ratio)
    table = theta_table(csi.shape[1])
    return music_spectrum(split, THETA_GRID, lambda _: table)


def rho_spectrum(csi, threshold_ratio=DEFAULT_THRESHOLD, delta_f=DEFAULT_SUBCARRIER_SPACING):
    csi = _check_signal(csi)
    if csi.shape[0] < 2:
        raise InsufficientSubcarriers("MUSIC range estimation needs at least 2 subcarriers")
    split = _noise_split(snapshot_covariance(csi, "subcarriers"), threshold_ratio)
    table = rho_table(csi.shape[0], delta_f)
    return music_spectrum(split, RHO_GRID, lambda _: table)


def music_estimate_theta(csi, threshold_ratio=DEFAULT_THRESHOLD):
    """Angle of arrival in degrees, on the 0.5 degree grid.

    Works with a single subcarrier row; several rows (subcarriers or
    repeated observations) are averaged into the covariance.
    """
    return theta_spectrum(csi, threshold_ratio).peak()


def music_estimate_rho(csi, threshold_ratio=DEFAULT_THRESHOLD, delta_f=DEFAULT_SUBCARRIER_SPACING):
    """BS-UE distance in metres, on the 1 m grid from 0 to 1000 m.

    Distances past ``c / delta_f`` (about 959 m at the default spacing) wrap
    around and come back as ``rho mod c / delta_f`` or its grid alias.
    """
    return rho_spectrum(csi, threshold_ratio, delta_f).peak()
