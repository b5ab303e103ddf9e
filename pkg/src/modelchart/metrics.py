"""Trustworthiness and continuity of a chart against the true positions.

With ``r(i, j)`` the rank of point j among the neighbours of i in the
original space and ``r_hat(i, j)`` the same in the chart (both in 1..N-1,
ties broken by point index):

    CT_i = 1 - 2 / (K (2N - 3K - 1)) * sum_{j in V_K(i), r_hat(i,j) > K} (r_hat(i,j) - K)
    TW_i = 1 - 2 / (K (2N - 3K - 1)) * sum_{j in U_K(i), r(i,j) > K}     (r(i,j) - K)

where ``V_K(i)`` is the original K-neighbourhood and ``U_K(i)`` the chart
K-neighbourhood. The global values are the means over points.
"""
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InvalidK


def default_k(n):
    """Neighbourhood size used for the summary tables: 5% of the point count."""
    return max(1, int(round(0.05 * n)))


def neighbor_ranks(points):
    """Rank matrix: ``ranks[i, j]`` is the rank of j among i's neighbours.

    The diagonal is 0; off-diagonal ranks of each row are a permutation of
    1..N-1. Equal distances are ordered by point index.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    n = len(pts)
    dist = cdist(pts, pts)
    np.fill_diagonal(dist, -1.0)
    order = np.argsort(dist, axis=1, kind="stable")
    ranks = np.empty((n, n), dtype=np.int64)
    rows = np.arange(n)[:, None]
    ranks[rows, order] = np.arange(n)[None, :]
    return ranks


def check_k(k, n):
    if n < 4:
        raise InvalidK(f"need at least 4 points, got {n}")
    if not (isinstance(k, (int, np.integer)) and 1 <= k and 2 * n - 3 * k - 1 > 0):
        raise InvalidK(f"K={k} is not valid for N={n} (need 1 <= K < (2N-1)/3)")


def _penalty(rank_a, rank_b, k):
    """Per-point sum over j in the K-neighbourhood of ``rank_a`` of ``rank_b - K`` where ``rank_b > K``."""
    mask = (rank_a >= 1) & (rank_a <= k) & (rank_b > k)
    return np.where(mask, rank_b - k, 0).sum(axis=1)


def _score(penalty, n, k):
    return 1.0 - 2.0 * penalty / (k * (2 * n - 3 * k - 1))


def _pair(original, chart):
    orig = np.asarray(original, dtype=float)
    emb = np.asarray(chart, dtype=float)
    if len(orig) != len(emb):
        raise ValueError("original and chart must have the same number of points")
    return orig, emb


def continuity(original, chart, k):
    """Global and per-point continuity."""
    orig, emb = _pair(original, chart)
    check_k(k, len(orig))
    per_point = _score(_penalty(neighbor_ranks(orig), neighbor_ranks(emb), k), len(orig), k)
    return float(per_point.mean()), per_point


def trustworthiness(original, chart, k):
    """Global and per-point trustworthiness."""
    orig, emb = _pair(original, chart)
    check_k(k, len(orig))
    per_point = _score(_penalty(neighbor_ranks(emb), neighbor_ranks(orig), k), len(orig), k)
    return float(per_point.mean()), per_point


@dataclass(frozen=True)
class CurveRow:
    k: int
    tw: float
    ct: float


def metric_curve(original, chart, k_list):
    """TW and CT for every K in ``k_list``; ranks are computed once."""
    orig, emb = _pair(original, chart)
    n = len(orig)
    for k in k_list:
        check_k(k, n)
    r_orig = neighbor_ranks(orig)
    r_emb = neighbor_ranks(emb)
    rows = []
    for k in k_list:
        tw = _score(_penalty(r_emb, r_orig, k), n, k).mean()
        ct = _score(_penalty(r_orig, r_emb, k), n, k).mean()
        rows.append(CurveRow(int(k), float(tw), float(ct)))
    return rows
