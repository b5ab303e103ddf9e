"""Joint angle/distance MUSIC over a two-dimensionally smoothed CSI matrix."""
import numpy as np

from ..errors import NoSignal, SubarrayTooLarge
from ..numerics import hermitian_eig
from .music import DEFAULT_THRESHOLD, split_subspace
from .steering import DEFAULT_SUBCARRIER_SPACING, RHO_GRID, THETA_GRID, rho_table, theta_table

DEFAULT_SUBARRAY = (4, 4)


def jm_smooth(csi, n_sa=4, m_sa=4):
    """Stack every ``n_sa x m_sa`` window of the CSI matrix as a column.

    Windows are vectorized subcarrier-major (``index = s * m_sa + n``) and
    ordered by subcarrier offset, then antenna offset. The result has shape
    ``(n_sa * m_sa, (n_sc - n_sa + 1) * (n_rx - m_sa + 1))``.
    """
    csi = np.asarray(csi, dtype=np.complex128)
    n_sc, n_rx = csi.shape
    if n_sa > n_sc or m_sa > n_rx:
        raise SubarrayTooLarge(
            f"{n_sa}x{m_sa} subarray does not fit a {n_sc}x{n_rx} CSI matrix")
    if n_sa < 1 or m_sa < 1:
        raise ValueError("subarray dimensions must be positive")
    windows = np.lib.stride_tricks.sliding_window_view(csi, (n_sa, m_sa))
    return windows.reshape(-1, n_sa * m_sa).T.copy()


def jm_spectrum(csi, n_sa=4, m_sa=4, threshold_ratio=DEFAULT_THRESHOLD,
                delta_f=DEFAULT_SUBCARRIER_SPACING):
    """2D pseudospectrum, shape ``(len(RHO_GRID), len(THETA_GRID))``.

    The search vector is ``kron(B(rho), A(theta))`` restricted to the window,
    matching the window vectorization of :func:`jm_smooth`.
    """
    smoothed = jm_smooth(csi, n_sa, m_sa)
    if not np.any(smoothed):
        raise NoSignal("CSI is identically zero")
    cov = smoothed @ smoothed.conj().T / smoothed.shape[1]
    split = split_subspace(hermitian_eig(cov), threshold_ratio, max_signal_dim=cov.shape[0] - 1)
    a = theta_table(m_sa)  # (n_theta, m_sa)
    b = rho_table(n_sa, delta_f)  # (n_rho, n_sa)
    # <n_k, b (x) a> = b^T conj(M_k) a with M_k the noise vector as an n_sa x m_sa window
    power = np.zeros((b.shape[0], a.shape[0]))
    for vec in split.noise_basis.T:
        z = b @ (vec.conj().reshape(n_sa, m_sa) @ a.T)
        power += z.real ** 2 + z.imag ** 2
    norm = np.sqrt(power)
    with np.errstate(divide="ignore"):
        return np.minimum(1.0 / norm, 1e12)


def jm_estimate(csi, n_sa=4, m_sa=4, threshold_ratio=DEFAULT_THRESHOLD,
                delta_f=DEFAULT_SUBCARRIER_SPACING):
    """Joint ``(theta_deg, rho_m)`` at the 2D spectrum peak."""
    spec = jm_spectrum(csi, n_sa, m_sa, threshold_ratio, delta_f)
    i_rho, i_theta = np.unravel_index(int(np.argmax(spec)), spec.shape)
    return float(THETA_GRID[i_theta]), float(RHO_GRID[i_rho])
