"""Command-line entry point: ``modelchart {simulate,chart,evaluate,run,render}``.

Every subcommand accepts ``--config`` (YAML, see :mod:`.config`) and a few
flags that override single config fields. Failures exit with status 2 and
print one JSON object ``{"error": ..., "message": ...}`` to stderr.
"""
import argparse
import json
import logging
import sys

import numpy as np

from .._io import write_csv
from ..baselines import extract_features, pca_chart, sammon_chart
from ..channel import channel_rays, read_csi_csv, snapshot_csi, write_csi_csv
from ..errors import ChartingError, InvalidConfig
from ..estimators import (Chart, chart, estimate_thetas, log_magnitude, lr_fit, read_chart_csv,
                          write_chart_csv)
from ..metrics import metric_curve
from ..scenario import BS_STANDOFF, generate_scenario, read_scenario_csv, write_scenario_csv
from .config import ALGORITHMS, load_config
from .render import render_chart_svg
from .runner import format_report, run_experiment


def _csv_list(kind):
    def parse(text):
        return [kind(t) for t in text.split(",") if t.strip()]
    return parse


def _add_overrides(p):
    p.add_argument("--config", help="YAML experiment config")
    p.add_argument("--profile", choices=["desk", "full"])
    p.add_argument("--n-ue", type=int)
    p.add_argument("--n-ave", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--snr-db", type=float)
    p.add_argument("--threshold-ratio", type=float)
    p.add_argument("--workers", type=int)


def _config(args, **extra):
    overrides = dict(
        profile=args.profile, n_ue=args.n_ue, n_ave=args.n_ave, seed=args.seed,
        snr_db=args.snr_db, threshold_ratio=args.threshold_ratio, workers=args.workers,
    )
    overrides.update(extra)
    return load_config(args.config, **overrides)


def _bs_position(cfg):
    width, depth = cfg.bounds
    bs_xy = cfg.bs_xy if cfg.bs_xy is not None else (width / 2, -BS_STANDOFF * depth)
    return (bs_xy[0], bs_xy[1], cfg.bs_height)


def _load_scene(path, cfg):
    return read_scenario_csv(path, _bs_position(cfg), cfg.bounds)


def cmd_simulate(args):
    cfg = _config(args)
    seed = cfg.seeds[0]
    scene = generate_scenario(cfg.n_ue, cfg.bounds, cfg.bs_height, seed, cfg.bs_xy)
    n_sc = args.n_sc if args.n_sc is not None else max(cfg.subcarriers)
    system = cfg.system(n_sc)
    rays = channel_rays(args.channel, scene, system, seed, cfg.n_paths, cfg.k_factor_db,
                        cfg.scatter_radius)
    csi = snapshot_csi(rays, system, seed)
    write_csi_csv(csi, args.out)
    if args.scenario_out:
        write_scenario_csv(scene, args.scenario_out)
    return {"csi": args.out, "n_ue": scene.n_ue, "n_sc": n_sc, "seed": seed}


def cmd_chart(args):
    cfg = _config(args)
    csi = read_csi_csv(args.csi)
    charts = []
    theta = None
    for alg in args.algorithm:
        if alg in ("ISQ", "LR") and theta is None:
            theta, _ = estimate_thetas(csi, cfg.threshold_ratio, cfg.workers)
        if alg == "LR":
            if not args.scenario:
                raise InvalidConfig("LR needs --scenario to fit on known positions")
            scene = _load_scene(args.scenario, cfg)
            known = np.arange(min(cfg.lr_train_count, len(csi)))
            model = lr_fit(np.array([log_magnitude(csi[k]) for k in known]),
                           scene.distances()[known])
            charts.append(chart("LR", csi, lr_model=model, theta=theta, workers=cfg.workers))
        elif alg == "PCA":
            charts.append(Chart.from_planar("PCA", pca_chart(extract_features(csi))))
        elif alg == "SM":
            charts.append(Chart.from_planar("SM", sammon_chart(
                extract_features(csi), iters=cfg.sammon_iters, seed=cfg.seeds[0])))
        else:
            charts.append(chart(alg, csi, threshold_ratio=cfg.threshold_ratio,
                                delta_f=cfg.subcarrier_spacing, theta=theta,
                                subarray=cfg.subarray, workers=cfg.workers))
    write_chart_csv(charts, args.out)
    return {"charts": args.out, "algorithms": args.algorithm,
            "failed_ues": {c.algorithm: int((~c.ok).sum()) for c in charts}}


def cmd_evaluate(args):
    cfg = _config(args)
    scene = _load_scene(args.scenario, cfg)
    charts = read_chart_csv(args.charts)
    ks = args.k or list(cfg.k_list)
    rows = []
    for alg, ch in charts.items():
        ok = ch.ok & np.all(np.isfinite(ch.xy), axis=1)
        for r in metric_curve(scene.ground_xy[ok], ch.xy[ok], ks):
            rows.append((alg, r.k, repr(r.tw), repr(r.ct), int(ok.sum())))
    write_csv(args.out, ["algorithm", "K", "TW", "CT", "n_ue"], rows)
    return {"metrics": args.out, "rows": len(rows)}


def cmd_run(args):
    extra = {}
    if args.algorithms:
        extra["algorithms"] = args.algorithms
    if args.subcarriers:
        extra["subcarriers"] = args.subcarriers
    if args.channels:
        extra["channels"] = args.channels
    if args.k:
        extra["k_list"] = args.k
    if args.out:
        extra["out_dir"] = args.out
    if args.no_render:
        extra["render"] = False
    cfg = _config(args, **extra)
    report = run_experiment(cfg, keep_charts=False)
    if not args.quiet:
        print(format_report(report))
    return {"out_dir": str(cfg.out_dir), "cells": len(report.summary()),
            "skipped": len(report.skipped)}


def cmd_render(args):
    cfg = _config(args)
    scene = _load_scene(args.scenario, cfg)
    if args.charts:
        charts = read_chart_csv(args.charts)
        if args.algorithm not in charts:
            raise InvalidConfig(f"{args.charts} has no chart for {args.algorithm!r}; "
                                f"found {sorted(charts)}")
        points, title = charts[args.algorithm].xy, args.algorithm
    else:
        points, title = scene.ground_xy, "scene"
    render_chart_svg(points, scene.vip_indices, args.out, title=title)
    return {"svg": args.out}


def build_parser():
    parser = argparse.ArgumentParser(prog="modelchart", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a scene and write its CSI as CSV")
    _add_overrides(p)
    p.add_argument("--channel", default="vanilla-los")
    p.add_argument("--n-sc", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--scenario-out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("chart", help="chart a CSI CSV with one or more algorithms")
    _add_overrides(p)
    p.add_argument("--csi", required=True)
    p.add_argument("--algorithm", action="append", required=True, choices=ALGORITHMS)
    p.add_argument("--scenario", help="scene CSV; needed by LR for its training positions")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_chart)

    p = sub.add_parser("evaluate", help="score chart CSVs against the scene")
    _add_overrides(p)
    p.add_argument("--charts", required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--k", type=_csv_list(int))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("run", help="full seeded sweep with tables and renders")
    _add_overrides(p)
    p.add_argument("--algorithms", type=_csv_list(str))
    p.add_argument("--subcarriers", type=_csv_list(int))
    p.add_argument("--channels", type=_csv_list(str))
    p.add_argument("--k", type=_csv_list(int))
    p.add_argument("--out")
    p.add_argument("--no-render", action="store_true")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("render", help="SVG scatter of a scene or a chart")
    _add_overrides(p)
    p.add_argument("--scenario", required=True)
    p.add_argument("--charts")
    p.add_argument("--algorithm", default="MM")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        result = args.func(args)
    except (ChartingError, OSError, ValueError, KeyError) as exc:
        reason = exc.reason if isinstance(exc, ChartingError) else type(exc).__name__
        print(json.dumps({"error": reason, "message": str(exc)}), file=sys.stderr)
        return 2
    if args.command != "run" or args.quiet:
        print(json.dumps(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
