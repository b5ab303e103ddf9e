"""Brute-force trustworthiness / continuity straight from the definitions."""
import math


def _ranks(points):
    n = len(points)
    ranks = []
    for i in range(n):
        others = sorted((j for j in range(n) if j != i),
                        key=lambda j: (math.dist(points[i], points[j]), j))
        r = {j: pos + 1 for pos, j in enumerate(others)}
        ranks.append(r)
    return ranks


def tw_ct_reference(original, chart, k):
    n = len(original)
    r = _ranks(original)
    r_hat = _ranks(chart)
    norm = 2.0 / (k * (2 * n - 3 * k - 1))
    tw = ct = 0.0
    for i in range(n):
        v_k = {j for j, rank in r[i].items() if rank <= k}       # original neighbourhood
        u_k = {j for j, rank in r_hat[i].items() if rank <= k}   # chart neighbourhood
        ct += 1 - norm * sum(r_hat[i][j] - k for j in v_k if r_hat[i][j] > k)
        tw += 1 - norm * sum(r[i][j] - k for j in u_k if r[i][j] > k)
    return tw / n, ct / n
