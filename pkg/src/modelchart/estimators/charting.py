"""Compose angle and distance estimators into a channel chart."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .._io import read_csv, write_csv
from ..errors import ChartingError, InvalidConfig, MissingModel, NoSignal
from .joint import jm_estimate
from .magnitude import isq_rho, lr_rho
from .music import DEFAULT_THRESHOLD, music_estimate_rho, music_estimate_theta
from .rotate_sum import rs_estimate_rho, rs_estimate_theta
from .steering import DEFAULT_SUBCARRIER_SPACING

ALGORITHMS = ("MM", "RS", "JM", "ISQ", "LR")
MULTI_SUBCARRIER = ("MM", "RS", "JM")


@dataclass(frozen=True)
class ChartPoint:
    ue_index: int
    theta_deg: float
    rho_m: float
    x: float
    y: float
    error: str = ""


@dataclass
class Chart:
    """Per-UE estimates of one algorithm; failed UEs carry NaN and an error name.

    Charts from the 2D baselines have no polar coordinates: ``theta`` and
    ``rho`` are NaN and the embedding is given directly as ``planar``.
    """

    algorithm: str
    theta: np.ndarray
    rho: np.ndarray
    errors: list
    planar: np.ndarray = None

    @classmethod
    def from_planar(cls, algorithm, xy):
        xy = np.asarray(xy, dtype=float)
        nan = np.full(len(xy), np.nan)
        return cls(algorithm, nan, nan.copy(), [""] * len(xy), planar=xy)

    @property
    def n_ue(self):
        return len(self.theta)

    @property
    def xy(self):
        if self.planar is not None:
            return self.planar
        t = np.radians(self.theta)
        return np.column_stack([self.rho * np.cos(t), self.rho * np.sin(t)])

    @property
    def ok(self):
        return np.array([not e for e in self.errors], dtype=bool)

    def points(self):
        xy = self.xy
        return [
            ChartPoint(k, float(self.theta[k]), float(self.rho[k]),
                       float(xy[k, 0]), float(xy[k, 1]), self.errors[k])
            for k in range(self.n_ue)
        ]


def _map(fn, n, workers):
    if workers <= 1:
        return [fn(k) for k in range(n)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n)))


def _guard(fn):
    def run(k):
        try:
            return fn(k), ""
        except ChartingError as exc:
            return (np.nan, np.nan), exc.reason
    return run


def estimate_thetas(csi_batch, threshold_ratio=DEFAULT_THRESHOLD, workers=1):
    """MUSIC angle per UE, NaN where estimation failed, plus error names."""
    run = _guard(lambda k: (music_estimate_theta(csi_batch[k], threshold_ratio), np.nan))
    results = _map(run, len(csi_batch), workers)
    return np.array([r[0][0] for r in results]), [r[1] for r in results]


def chart(algorithm, csi_batch, threshold_ratio=DEFAULT_THRESHOLD,
          delta_f=DEFAULT_SUBCARRIER_SPACING, lr_model=None, theta=None,
          subarray=(4, 4), workers=1):
    """Estimate ``(theta, rho)`` for every UE of ``csi_batch``.

    ``algorithm`` is one of :data:`ALGORITHMS`; ISQ and LR pair their
    distance proxy with MUSIC for the angle. A precomputed angle array can be
    passed as ``theta`` for ISQ/LR so both share one MUSIC pass. Per-UE
    failures are recorded in ``Chart.errors``, never dropped.
    """
    if algorithm not in ALGORITHMS:
        raise InvalidConfig(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    if algorithm == "LR" and lr_model is None:
        raise MissingModel("LR charting needs a fitted LrModel")
    n_sa, m_sa = subarray

    def music_theta(k):
        if theta is not None:
            if np.isnan(theta[k]):
                raise NoSignal(f"no angle estimate for UE {k}")
            return float(theta[k])
        return music_estimate_theta(csi_batch[k], threshold_ratio)

    estimators = {
        "MM": lambda k: (music_estimate_theta(csi_batch[k], threshold_ratio),
                         music_estimate_rho(csi_batch[k], threshold_ratio, delta_f)),
        "RS": lambda k: (rs_estimate_theta(csi_batch[k]), rs_estimate_rho(csi_batch[k], delta_f)),
        "JM": lambda k: jm_estimate(csi_batch[k], n_sa, m_sa, threshold_ratio, delta_f),
        "ISQ": lambda k: (music_theta(k), isq_rho(csi_batch[k])),
        "LR": lambda k: (music_theta(k), lr_rho(lr_model, csi_batch[k])),
    }
    results = _map(_guard(estimators[algorithm]), len(csi_batch), workers)
    est = np.array([r[0] for r in results], dtype=float).reshape(-1, 2)
    return Chart(algorithm=algorithm, theta=est[:, 0], rho=est[:, 1],
                 errors=[r[1] for r in results])


def write_chart_csv(charts, path):
    """Write one or more charts to the shared chart CSV schema."""
    if isinstance(charts, Chart):
        charts = [charts]
    rows = []
    for ch in charts:
        for p in ch.points():
            rows.append((p.ue_index, repr(p.theta_deg), repr(p.rho_m), repr(p.x), repr(p.y),
                         ch.algorithm, p.error))
    write_csv(path, ["ue_index", "theta_deg", "rho_m", "x", "y", "algorithm", "error_flag"], rows)


def read_chart_csv(path):
    """Load a chart CSV back into :class:`Chart` objects keyed by algorithm."""
    by_alg = {}
    for r in read_csv(path):
        by_alg.setdefault(r["algorithm"], []).append(r)
    out = {}
    for alg, rows in by_alg.items():
        rows.sort(key=lambda r: int(r["ue_index"]))
        theta = np.array([float(r["theta_deg"]) for r in rows])
        rho = np.array([float(r["rho_m"]) for r in rows])
        xy = np.array([[float(r["x"]), float(r["y"])] for r in rows])
        errors = [r["error_flag"] for r in rows]
        planar = xy if np.all(np.isnan(theta)) and not any(errors) else None
        out[alg] = Chart(alg, theta, rho, errors, planar=planar)
    return out
