"""Training-based reference charts: angular-domain features, PCA and Sammon's mapping."""
import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import DegenerateFeatures, DuplicatePoints
from .numerics import hermitian_eig


def extract_features(csi_batch):
    """Angular-domain magnitude features, one row per UE.

    Each subcarrier row is mapped through a unitary DFT across antennas, the
    magnitudes are taken and the rows are concatenated. The batch is then
    scaled to unit mean power so the embeddings do not depend on the absolute
    channel gain.
    """
    csi = np.asarray(csi_batch, dtype=np.complex128)
    if csi.ndim == 2:
        csi = csi[:, None, :]
    feats = np.abs(np.fft.fft(csi, axis=-1, norm="ortho")).reshape(len(csi), -1)
    power = np.mean(feats ** 2)
    if power > 0:
        feats = feats / np.sqrt(power)
    return feats


def pca_chart(features, n_components=2):
    """Project centred features onto their top principal directions."""
    x = np.asarray(features, dtype=float)
    if x.ndim != 2 or len(x) < 3:
        raise DegenerateFeatures("PCA needs at least 3 feature vectors")
    centred = x - x.mean(axis=0)
    cov = centred.T @ centred / (len(x) - 1)
    eig = hermitian_eig(cov)
    lam = eig.eigenvalues
    if len(lam) < n_components or lam[n_components - 1] <= 1e-12 * max(lam[0], 1e-300):
        raise DegenerateFeatures("feature covariance has rank below 2")
    basis = eig.eigenvectors[:, :n_components].real
    return centred @ basis


def sammon_stress(d_input, y):
    """Sammon stress of embedding ``y`` for condensed input distances ``d_input``."""
    d_out = pdist(y)
    return float(np.sum((d_input - d_out) ** 2 / d_input) / np.sum(d_input))


def sammon_chart(features, iters=500, step=1.0, seed=0, init=None, max_halves=20, tol=1e-9,
                 return_history=False):
    """Sammon's mapping to 2D by diagonal-Newton descent with step halving.

    Starts from the PCA chart (or ``init``). Duplicate feature vectors are
    separated by a tiny seeded jitter first. Iteration stops after ``iters``
    steps, when the stress changes by less than ``tol``, or when no step
    halving reduces the stress.
    """
    x = np.asarray(features, dtype=float)
    if x.ndim != 2 or len(x) < 3:
        raise DegenerateFeatures("Sammon's mapping needs at least 3 feature vectors")
    d_cond = pdist(x)
    if np.all(d_cond == 0):
        raise DuplicatePoints("all feature vectors coincide")
    if np.any(d_cond == 0):
        rng = np.random.default_rng(seed)
        scale = np.abs(x).max() if np.any(x) else 1.0
        x = x + 1e-9 * scale * rng.standard_normal(x.shape)
        d_cond = pdist(x)
        if np.any(d_cond == 0):
            raise DuplicatePoints("input distances remain zero after jitter")
    y = pca_chart(x) if init is None else np.array(init, dtype=float)
    n = len(x)
    D = squareform(d_cond) + np.eye(n)
    D_inv = 1.0 / D
    np.fill_diagonal(D_inv, 0.0)
    scale = d_cond.sum()
    ones = np.ones((n, y.shape[1]))

    def stress_of(y_):
        d_ = squareform(pdist(y_)) + np.eye(n)
        return np.sum((D - d_) ** 2 * D_inv) / 2.0 / scale, d_

    stress, d = stress_of(y)
    history = [stress]
    for _ in range(iters):
        if stress == 0.0:
            break
        d_inv = 1.0 / d
        np.fill_diagonal(d_inv, 0.0)
        delta = d_inv - D_inv
        delta_one = delta @ ones
        grad = delta @ y - y * delta_one
        d_inv3 = d_inv ** 3
        y2 = y ** 2
        hess = d_inv3 @ y2 - delta_one - 2 * y * (d_inv3 @ y) + y2 * (d_inv3 @ ones)
        move = -grad / np.maximum(np.abs(hess), 1e-300)
        move *= step
        for _ in range(max_halves):
            y_new = y + move
            new_stress, d_new = stress_of(y_new)
            if new_stress < stress:
                break
            move *= 0.5
        else:
            break
        improvement = stress - new_stress
        y, d, stress = y_new, d_new, new_stress
        history.append(stress)
        if improvement < tol:
            break
    if return_history:
        return y, history
    return y
