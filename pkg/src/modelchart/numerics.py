"""Complex linear-algebra primitives used by the subspace estimators.

The eigensolver is a cyclic complex Jacobi iteration compiled with numba.
Matrices in this package are small (at most 32 x 32), where Jacobi is both
fast enough and fully deterministic for a given input.
"""
from dataclasses import dataclass

import numba
import numpy as np

from .errors import EmptyInput, InvalidMatrix

HERMITIAN_RTOL = 1e-10
_JACOBI_TOL = 1e-15
_MAX_SWEEPS = 100


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs of a Hermitian matrix, eigenvalues sorted descending.

    ``eigenvectors[:, i]`` is the unit-norm eigenvector for ``eigenvalues[i]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_hermitian(m, rtol=HERMITIAN_RTOL):
    """Validate ``m`` as a square Hermitian matrix and return it as complex128."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InvalidMatrix(f"expected a non-empty square matrix, got shape {m.shape}")
    m = m.astype(np.complex128)
    if not np.all(np.isfinite(m)):
        raise InvalidMatrix("matrix has non-finite entries")
    scale = np.abs(m).max()
    if np.abs(m - m.conj().T).max() > rtol * max(scale, 1e-300):
        raise InvalidMatrix("matrix is not Hermitian")
    return m


@numba.njit(cache=True, nogil=True)
def _jacobi(ar, ai, tol, max_sweeps):
    # real and imaginary parts are kept apart so the inner loops vectorize
    n = ar.shape[0]
    vr = np.eye(n)
    vi = np.zeros((n, n))
    for _ in range(max_sweeps):
        off = 0.0
        diag = 0.0
        for p in range(n):
            diag += ar[p, p] ** 2
            for q in range(p + 1, n):
                off += ar[p, q] ** 2 + ai[p, q] ** 2
        if off == 0.0 or off <= tol * tol * (diag + off):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                xr = ar[p, q]
                xi = ai[p, q]
                mag = np.sqrt(xr * xr + xi * xi)
                if mag == 0.0:
                    continue
                # unit phase e = a_pq / |a_pq| reduces the pair to a real 2x2 problem
                er = xr / mag
                ei = xi / mag
                app = ar[p, p]
                aqq = ar[q, q]
                tau = (aqq - app) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                sr = t * c * er
                si = t * c * ei
                # rows p, q of J^H A J: p <- c p - (s e) q, q <- (s conj e) p + c q
                for k in range(n):
                    pr = ar[p, k]
                    pi = ai[p, k]
                    qr = ar[q, k]
                    qi = ai[q, k]
                    ar[p, k] = c * pr - (sr * qr - si * qi)
                    ai[p, k] = c * pi - (sr * qi + si * qr)
                    ar[q, k] = (sr * pr + si * pi) + c * qr
                    ai[q, k] = (sr * pi - si * pr) + c * qi
                # columns follow by Hermitian symmetry, the 2x2 block is known in closed form
                for k in range(n):
                    ar[k, p] = ar[p, k]
                    ai[k, p] = -ai[p, k]
                    ar[k, q] = ar[q, k]
                    ai[k, q] = -ai[q, k]
                ar[p, p] = app - t * mag
                ar[q, q] = aqq + t * mag
                ai[p, p] = ai[q, q] = 0.0
                ar[p, q] = ai[p, q] = ar[q, p] = ai[q, p] = 0.0
                # eigenvectors accumulated as rows of V^T
                for k in range(n):
                    pr = vr[p, k]
                    pi = vi[p, k]
                    qr = vr[q, k]
                    qi = vi[q, k]
                    vr[p, k] = c * pr - (sr * qr + si * qi)
                    vi[p, k] = c * pi - (sr * qi - si * qr)
                    vr[q, k] = (sr * pr - si * pi) + c * qr
                    vi[q, k] = (sr * pi + si * pr) + c * qi
    w = np.empty(n)
    for i in range(n):
        w[i] = ar[i, i]
    return w, vr, vi


def hermitian_eig(m):
    """Full eigendecomposition of a Hermitian matrix.

    Eigenvalues come back in descending order. Exactly equal eigenvalues are
    ordered by the first component of their eigenvectors (real part, then
    imaginary part, largest first), so the result is reproducible.

    Raises InvalidMatrix for non-square or non-Hermitian input.
    """
    m = as_hermitian(m)
    # symmetrize exactly; the check above already bounds the discrepancy
    work = 0.5 * (m + m.conj().T)
    w, vr, vi = _jacobi(work.real.copy(), work.imag.copy(), _JACOBI_TOL, _MAX_SWEEPS)
    v = vr.T + 1j * vi.T
    order = np.lexsort((-v[0].imag, -v[0].real, -w))
    return EigenDecomposition(eigenvalues=w[order], eigenvectors=v[:, order])


def gram(v, direction="outer"):
    """Rank-1 Gram matrix of a complex vector.

    ``direction="outer"`` treats ``v`` as a column ``c`` and returns
    ``c c^H``; ``"inner"`` treats it as a row and returns ``c^H c``, whose
    (a, b) entry is ``conj(c_a) c_b``. Both have trace ``||v||^2``.
    """
    v = np.asarray(v, dtype=np.complex128).ravel()
    if v.size == 0:
        raise EmptyInput("gram of an empty vector")
    if direction == "outer":
        return np.outer(v, v.conj())
    if direction == "inner":
        return np.outer(v.conj(), v)
    raise ValueError(f"unknown direction {direction!r}")
