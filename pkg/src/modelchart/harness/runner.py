"""Seeded experiment sweeps: scene -> CSI -> charts -> TW/CT, with timing.

Every run ``r`` uses seed ``config.seeds[r]`` for the scene, the channel and
the noise. The swept algorithms (MM, RS, JM) are charted once per
subcarrier count. ISQ, LR, PCA and SM see a single subcarrier observed
``n_ave`` times; they are reported with ``n_sc = 1``. ISQ and LR share one
MUSIC angle pass, whose time is charged to both.

Timing wraps the chart-producing call only. Channel synthesis and scoring
are excluded. Timing lives in its own table so the metric CSV stays
byte-identical across repeated runs and worker counts.
"""
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .._io import atomic_write_text, write_csv
from ..baselines import extract_features, pca_chart, sammon_chart
from ..channel import channel_rays, repeated_snapshots, snapshot_csi
from ..errors import ChartingError
from ..estimators import Chart, chart, estimate_thetas, log_magnitude, lr_fit, write_chart_csv
from ..metrics import metric_curve
from ..scenario import generate_scenario, write_scenario_csv
from .config import ALGORITHMS, SWEPT, dump_config
from .render import render_chart_svg

log = logging.getLogger(__name__)

SINGLE_SC = 1


@dataclass(frozen=True)
class MetricRow:
    algorithm: str
    channel: str
    n_sc: int
    k: int
    tw: float
    ct: float
    n_ue: int
    seed: int


@dataclass(frozen=True)
class SkippedCell:
    algorithm: str
    channel: str
    n_sc: int
    seed: int
    reason: str


@dataclass(frozen=True)
class TimingRow:
    algorithm: str
    channel: str
    n_sc: int
    seed: int
    seconds: float


@dataclass(frozen=True)
class SummaryRow:
    algorithm: str
    channel: str
    n_sc: int
    k: int
    tw_mean: float
    tw_std: float
    ct_mean: float
    ct_std: float
    runs: int


def _order(alg):
    return ALGORITHMS.index(alg) if alg in ALGORITHMS else len(ALGORITHMS)


def _std(x):
    return float(np.std(x, ddof=1)) if len(x) > 1 else 0.0


@dataclass
class EvalReport:
    """Per-run metric rows, skipped cells, timings and the charts themselves."""

    config: object
    rows: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    timings: list = field(default_factory=list)
    charts: dict = field(default_factory=dict)

    def summary(self):
        groups = {}
        for r in self.rows:
            groups.setdefault((r.algorithm, r.channel, r.n_sc, r.k), []).append(r)
        out = []
        for (alg, ch, n_sc, k), rows in groups.items():
            tw = [r.tw for r in rows]
            ct = [r.ct for r in rows]
            out.append(SummaryRow(alg, ch, n_sc, k, float(np.mean(tw)), _std(tw),
                                  float(np.mean(ct)), _std(ct), len(rows)))
        out.sort(key=lambda s: (s.channel, _order(s.algorithm), s.n_sc, s.k))
        return out

    def cell(self, algorithm, channel="vanilla-los", n_sc=None, k=None):
        """Summary row for one (algorithm, channel, n_sc, K); defaults pick the only match."""
        hits = [s for s in self.summary()
                if s.algorithm == algorithm and s.channel == channel
                and (n_sc is None or s.n_sc == n_sc) and (k is None or s.k == k)]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} summary rows match {algorithm}/{channel}/{n_sc}/{k}")
        return hits[0]

    def seconds(self, algorithm, channel=None, n_sc=None):
        return float(sum(t.seconds for t in self.timings if t.algorithm == algorithm
                         and (channel is None or t.channel == channel)
                         and (n_sc is None or t.n_sc == n_sc)))

    def timing_table(self):
        """(algorithm, cells, total seconds, mean seconds per cell) for every requested algorithm."""
        table = []
        for alg in self.config.algorithms:
            ts = [t.seconds for t in self.timings if t.algorithm == alg]
            total = float(sum(ts))
            table.append((alg, len(ts), total, total / len(ts) if ts else 0.0))
        return table


def _sorted_rows(rows):
    return sorted(rows, key=lambda r: (r.channel, _order(r.algorithm), r.n_sc, r.k, r.seed))


def _infeasible(alg, n_sc, config):
    if alg in ("MM", "RS") and n_sc < 2:
        return "InsufficientSubcarriers"
    if alg == "JM" and (n_sc < config.subarray[0] or config.n_rx < config.subarray[1]):
        return "SubarrayTooLarge"
    return None


def _score(ch, truth, ks, tag, report):
    alg, channel, n_sc, seed = tag
    xy = ch.xy
    ok = ch.ok & np.all(np.isfinite(xy), axis=1)
    n_ok = int(ok.sum())
    valid = [k for k in ks if n_ok >= 4 and 2 * n_ok - 3 * k - 1 > 0]
    if not valid:
        report.skipped.append(SkippedCell(alg, channel, n_sc, seed, "InvalidK"))
        return
    for row in metric_curve(truth[ok], xy[ok], valid):
        report.rows.append(MetricRow(alg, channel, n_sc, row.k, row.tw, row.ct, n_ok, seed))


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def _run_once(config, channel, seed, report):
    scene = generate_scenario(config.n_ue, config.bounds, config.bs_height, seed, config.bs_xy)
    cfg = config.system()
    rays = channel_rays(channel, scene, cfg, seed, config.n_paths, config.k_factor_db,
                        config.scatter_radius)
    truth = scene.ground_xy
    ks = list(config.k_list)
    thr = config.threshold_ratio
    charts = {}

    def record(alg, n_sc, produce):
        tag = (alg, channel, n_sc, seed)
        try:
            ch, dt = produce()
        except ChartingError as exc:
            report.skipped.append(SkippedCell(alg, channel, n_sc, seed, exc.reason))
            return
        report.timings.append(TimingRow(alg, channel, n_sc, seed, dt))
        charts[(n_sc, alg)] = ch
        _score(ch, truth, ks, tag, report)

    swept = [a for a in config.algorithms if a in SWEPT]
    for n_sc in config.subcarriers:
        todo = []
        for alg in swept:
            reason = _infeasible(alg, n_sc, config)
            if reason:
                report.skipped.append(SkippedCell(alg, channel, n_sc, seed, reason))
            else:
                todo.append(alg)
        if not todo:
            continue
        csi = snapshot_csi(rays, cfg, seed, n_sc=n_sc)
        for alg in todo:
            log.info("%s seed=%d n_sc=%d %s", channel, seed, n_sc, alg)
            record(alg, n_sc, lambda alg=alg: _timed(lambda: chart(
                alg, csi, threshold_ratio=thr, delta_f=cfg.subcarrier_spacing,
                subarray=config.subarray, workers=config.workers)))

    single = [a for a in config.algorithms if a not in SWEPT]
    if single:
        snaps = repeated_snapshots(rays, cfg, seed)
        if "ISQ" in single or "LR" in single:
            (theta, _), t_theta = _timed(lambda: estimate_thetas(snaps, thr, config.workers))
        if "ISQ" in single:
            def isq():
                ch, dt = _timed(lambda: chart("ISQ", snaps, theta=theta, workers=config.workers))
                return ch, dt + t_theta
            record("ISQ", SINGLE_SC, isq)
        if "LR" in single:
            m = config.lr_train_count
            known = np.arange(m)

            def lr():
                def fit_and_chart():
                    x = np.array([log_magnitude(snaps[k]) for k in known])
                    model = lr_fit(x, scene.distances()[known])
                    return chart("LR", snaps, lr_model=model, theta=theta, workers=config.workers)
                ch, dt = _timed(fit_and_chart)
                return ch, dt + t_theta
            record("LR", SINGLE_SC, lr)
        if "PCA" in single or "SM" in single:
            feats = extract_features(snaps)
        if "PCA" in single:
            record("PCA", SINGLE_SC, lambda: _timed(
                lambda: Chart.from_planar("PCA", pca_chart(feats))))
        if "SM" in single:
            record("SM", SINGLE_SC, lambda: _timed(
                lambda: Chart.from_planar("SM", sammon_chart(feats, iters=config.sammon_iters,
                                                              seed=seed))))
    return scene, charts


def _write_run(out, channel, seed, scene, charts, render):
    write_scenario_csv(scene, out / "scenes" / f"seed{seed}.csv")
    by_nsc = {}
    for (n_sc, alg), ch in charts.items():
        by_nsc.setdefault(n_sc, []).append(ch)
    for n_sc, chs in by_nsc.items():
        chs.sort(key=lambda c: _order(c.algorithm))
        write_chart_csv(chs, out / "charts" / channel / f"seed{seed}_sc{n_sc}.csv")
    if render:
        svg = out / "svg" / channel
        render_chart_svg(scene.ground_xy, scene.vip_indices, svg / f"seed{seed}_scene.svg",
                         title=f"scene, seed {seed}")
        for (n_sc, alg), ch in sorted(charts.items(), key=lambda kv: (kv[0][0], _order(kv[0][1]))):
            if np.any(ch.ok):
                render_chart_svg(ch.xy, scene.vip_indices, svg / f"seed{seed}_{alg}_sc{n_sc}.svg",
                                 title=f"{alg}, {n_sc} subcarrier(s), {channel}, seed {seed}")


def _f(v):
    return repr(float(v))


def write_metrics_csv(rows, path):
    write_csv(path, ["algorithm", "channel", "n_sc", "K", "TW", "CT", "n_ue", "seed"],
              [(r.algorithm, r.channel, r.n_sc, r.k, _f(r.tw), _f(r.ct), r.n_ue, r.seed)
               for r in _sorted_rows(rows)])


def write_summary_csv(summary, path):
    write_csv(path, ["algorithm", "channel", "n_sc", "K", "TW_mean", "TW_std", "CT_mean",
                     "CT_std", "runs"],
              [(s.algorithm, s.channel, s.n_sc, s.k, _f(s.tw_mean), _f(s.tw_std),
                _f(s.ct_mean), _f(s.ct_std), s.runs) for s in summary])


CONVENTIONS = """\
Conventions applied uniformly to every table:
- SNR is per entry, relative to the mean signal power of each UE's tensor.
- Each cell is the mean (sample stddev) over n_ave seeded runs.
- ISQ, LR, PCA and SM use one subcarrier observed n_ave times with fresh noise;
  MUSIC averages the covariance over those observations.
- LR is fitted on the first round(n_ue * lr_fraction) UEs of each scene.
- TW/CT compare charts with ground-plane positions; UEs whose estimate
  failed are left out and counted in n_ue.
"""


def format_report(report):
    cfg = report.config
    lines = [
        "# Channel-charting experiment",
        "",
        f"profile={cfg.profile} n_ue={cfg.n_ue} n_ave={cfg.n_ave} n_rx={cfg.n_rx} "
        f"snr_db={cfg.snr_db} seeds={list(cfg.seeds)} threshold_ratio={cfg.threshold_ratio}",
        "",
        CONVENTIONS,
        "## TW / CT",
        "",
        "| algorithm | channel | n_sc | K | TW | CT | runs |",
        "|---|---|---|---|---|---|---|",
    ]
    for s in report.summary():
        lines.append(f"| {s.algorithm} | {s.channel} | {s.n_sc} | {s.k} | "
                     f"{s.tw_mean:.4f} ± {s.tw_std:.4f} | {s.ct_mean:.4f} ± {s.ct_std:.4f} | "
                     f"{s.runs} |")
    lines += ["", "## Wall-clock (chart production only)", "",
              "| algorithm | cells | total s | mean s per cell |", "|---|---|---|---|"]
    for alg, cells, total, mean in report.timing_table():
        lines.append(f"| {alg} | {cells} | {total:.3f} | {mean:.3f} |")
    if report.skipped:
        lines += ["", "## Skipped cells", "", "| algorithm | channel | n_sc | seed | reason |",
                  "|---|---|---|---|---|"]
        for s in report.skipped:
            lines.append(f"| {s.algorithm} | {s.channel} | {s.n_sc} | {s.seed} | {s.reason} |")
    return "\n".join(lines) + "\n"


def write_report(report, out_dir):
    out = Path(out_dir)
    write_metrics_csv(report.rows, out / "metrics.csv")
    write_summary_csv(report.summary(), out / "summary.csv")
    write_csv(out / "timing.csv", ["algorithm", "channel", "n_sc", "seed", "seconds"],
              [(t.algorithm, t.channel, t.n_sc, t.seed, _f(t.seconds)) for t in report.timings])
    write_csv(out / "timing_summary.csv", ["algorithm", "cells", "total_seconds", "mean_seconds"],
              [(a, n, _f(tot), _f(m)) for a, n, tot, m in report.timing_table()])
    write_csv(out / "skipped.csv", ["algorithm", "channel", "n_sc", "seed", "reason"],
              [(s.algorithm, s.channel, s.n_sc, s.seed, s.reason) for s in report.skipped])
    atomic_write_text(out / "config.yaml", dump_config(report.config))
    atomic_write_text(out / "report.md", format_report(report))


def run_experiment(config, out_dir=None, keep_charts=True):
    """Run the full sweep; writes artifacts when ``out_dir`` (or ``config.out_dir``) is set.

    Pass ``out_dir=False`` to skip writing entirely.
    """
    out = None if out_dir is False else Path(out_dir or config.out_dir)
    report = EvalReport(config=config)
    for channel in config.channels:
        for run, seed in enumerate(config.seeds):
            scene, charts = _run_once(config, channel, seed, report)
            if keep_charts:
                for (n_sc, alg), ch in charts.items():
                    report.charts[(channel, seed, n_sc, alg)] = ch
            if out is not None:
                _write_run(out, channel, seed, scene, charts, config.render and run == 0)
    report.rows = _sorted_rows(report.rows)
    if out is not None:
        write_report(report, out)
    return report
