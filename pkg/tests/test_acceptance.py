"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The desk-scale profile is used throughout: 512 UEs, 32 antennas, SNR 0 dB,
K = 26 (5% of N) and 4 seeded runs per cell.
"""
import time

import numpy as np
import pytest

from modelchart.estimators import (music_estimate_rho, music_estimate_theta, rs_spectrum_rho,
                                   rs_spectrum_theta)
from modelchart.harness import make_config, run_experiment, with_overrides
from modelchart.numerics import hermitian_eig

from conftest import random_hermitian, single_ray
from metric_oracle import tw_ct_reference
from rs_oracle import rs_rho_reference, rs_theta_reference
from modelchart.metrics import metric_curve

DESK = dict(n_ue=512, n_ave=4, n_rx=32, snr_db=0.0, k_list=[26], render=False)


def _report(record_property, ok, detail):
    record_property("detail", detail)
    print(f"{'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def desk_run(tmp_path_factory):
    cfg = make_config(**DESK, channels=["vanilla-los"], subcarriers=[2, 8, 20, 32],
                      algorithms=["MM", "RS", "ISQ", "LR", "PCA", "SM"],
                      out_dir=str(tmp_path_factory.mktemp("desk")))
    return run_experiment(cfg)


@pytest.mark.criterion(1, "vanilla-LOS MM at 32 subcarriers: TW, CT >= 0.99 within 5 min")
def test_criterion_1_vanilla_los_mm(tmp_path, record_property):
    cfg = make_config(**DESK, channels=["vanilla-los"], subcarriers=[32], algorithms=["MM"],
                      out_dir=str(tmp_path))
    t0 = time.perf_counter()
    report = run_experiment(cfg)
    elapsed = time.perf_counter() - t0
    cell = report.cell("MM", n_sc=32, k=26)
    ok = cell.tw_mean >= 0.99 and cell.ct_mean >= 0.99 and elapsed <= 300 and cell.runs == 4
    _report(record_property, ok,
            f"TW={cell.tw_mean:.4f} CT={cell.ct_mean:.4f} runs={cell.runs} wall={elapsed:.1f}s")


@pytest.mark.criterion(2, "LOS ordering MM >= LR ~ ISQ > max(PCA, SM), gap >= 0.05")
def test_criterion_2_los_ordering(desk_run, record_property):
    tw = {a: desk_run.cell(a, n_sc=n, k=26).tw_mean
          for a, n in (("MM", 32), ("LR", 1), ("ISQ", 1), ("PCA", 1), ("SM", 1))}
    baseline = max(tw["PCA"], tw["SM"])
    model = min(tw["LR"], tw["ISQ"])
    ok = (tw["MM"] >= tw["LR"] and tw["MM"] >= tw["ISQ"]
          and abs(tw["LR"] - tw["ISQ"]) <= 0.01
          and model >= 0.97 and model > baseline and model - baseline >= 0.05)
    _report(record_property, ok,
            " ".join(f"{a}={v:.4f}" for a, v in tw.items()) + f" gap={model - baseline:.4f}")


@pytest.mark.criterion(3, "RS ~ MM within 0.01 TW and CT at 8, 20, 32 subcarriers")
def test_criterion_3_rs_matches_mm(desk_run, record_property):
    parts, ok = [], True
    for n_sc in (8, 20, 32):
        mm = desk_run.cell("MM", n_sc=n_sc, k=26)
        rs = desk_run.cell("RS", n_sc=n_sc, k=26)
        d_tw, d_ct = abs(rs.tw_mean - mm.tw_mean), abs(rs.ct_mean - mm.ct_mean)
        ok &= d_tw <= 0.01 and d_ct <= 0.01
        parts.append(f"sc{n_sc}: dTW={d_tw:.4f} dCT={d_ct:.4f}")
    _report(record_property, ok, "; ".join(parts))


@pytest.mark.criterion(4, "JM ~ MM within 0.01 TW at 8-32 subcarriers, JM time >= 10x MM")
def test_criterion_4_jm_vs_mm(tmp_path, record_property):
    cfg = make_config(**{**DESK, "n_ave": 1}, channels=["vanilla-los"], subcarriers=[8, 20, 32],
                      algorithms=["MM", "JM"], out_dir=str(tmp_path))
    report = run_experiment(cfg)
    parts, ok = [], True
    for n_sc in cfg.subcarriers:
        mm = report.cell("MM", n_sc=n_sc, k=26)
        jm = report.cell("JM", n_sc=n_sc, k=26)
        ratio = report.seconds("JM", n_sc=n_sc) / report.seconds("MM", n_sc=n_sc)
        d_tw = abs(jm.tw_mean - mm.tw_mean)
        ok &= d_tw <= 0.01 and ratio >= 10
        parts.append(f"sc{n_sc}: dTW={d_tw:.4f} time x{ratio:.1f}")
    _report(record_property, ok, "; ".join(parts))


@pytest.mark.criterion(5, "MM TW and CT at 32 subcarriers >= 2 subcarriers within one stddev")
def test_criterion_5_subcarrier_monotonicity(desk_run, record_property):
    def per_seed(n_sc, field):
        rows = sorted((r for r in desk_run.rows if r.algorithm == "MM" and r.n_sc == n_sc
                       and r.k == 26), key=lambda r: r.seed)
        return np.array([getattr(r, field) for r in rows])

    parts, ok = [], True
    for field in ("tw", "ct"):
        diff = per_seed(32, field) - per_seed(2, field)
        margin, sd = diff.mean(), diff.std(ddof=1)
        ok &= margin >= -sd
        parts.append(f"{field.upper()} margin={margin:.4f} sd={sd:.4f}")
    _report(record_property, ok, "; ".join(parts))


@pytest.mark.criterion(6, "multipath stand-in: MM TW LOS >= QLOS-like >= QNLOS-like at 32 sc")
def test_criterion_6_channel_ordering(tmp_path, record_property):
    cfg = make_config(**DESK, channels=["vanilla-los", "multipath-los", "multipath-nlos"],
                      subcarriers=[32], algorithms=["MM"], out_dir=str(tmp_path))
    report = run_experiment(cfg)
    tw = {ch: report.cell("MM", ch, 32, 26).tw_mean for ch in cfg.channels}
    ok = tw["vanilla-los"] >= tw["multipath-los"] >= tw["multipath-nlos"]
    _report(record_property, ok, " ".join(f"{c}={v:.4f}" for c, v in tw.items()))


@pytest.mark.criterion(7, "oracle suites: TW/CT brute force, RS loop nest, MUSIC sweeps, eig")
def test_criterion_7_oracles(record_property):
    rng = np.random.default_rng(77)
    # (a) every valid K for 4 <= N <= 10, 200 random instances
    worst_metric, n_checks = 0.0, 0
    for inst in range(200):
        n = 4 + inst % 7
        orig, emb = rng.standard_normal((n, 2)), rng.standard_normal((n, 2))
        ks = [k for k in range(1, n) if 2 * n - 3 * k - 1 > 0]
        for row in metric_curve(orig, emb, ks):
            tw, ct = tw_ct_reference(orig.tolist(), emb.tolist(), row.k)
            worst_metric = max(worst_metric, abs(row.tw - tw), abs(row.ct - ct))
            n_checks += 1
    ok_a = worst_metric <= 1e-12
    # (b) RS bit for bit on 50 random tensors up to 4 x 8
    rs_mismatch = 0
    for _ in range(50):
        n_sc, n_rx = int(rng.integers(2, 5)), int(rng.integers(2, 9))
        csi = rng.standard_normal((n_sc, n_rx)) + 1j * rng.standard_normal((n_sc, n_rx))
        rs_mismatch += not np.array_equal(rs_spectrum_theta(csi).values, rs_theta_reference(csi))
        rs_mismatch += not np.array_equal(rs_spectrum_rho(csi).values, rs_rho_reference(csi))
    ok_b = rs_mismatch == 0
    # (c) noiseless MUSIC sweeps
    theta_err = max(abs(music_estimate_theta(single_ray(t, 300, 8, 32)) - t)
                    for t in np.arange(5, 176, 5.0))
    rho_err = max(abs(music_estimate_rho(single_ray(60, r, 8, 32)) - r)
                  for r in np.arange(50, 901, 50.0))
    ok_c = theta_err <= 0.5 and rho_err <= 1
    # (d) reconstruction on 500 random Hermitian matrices
    worst_eig = 0.0
    for i in range(500):
        m = random_hermitian(rng, 1 + i % 32, scale=10.0 ** rng.uniform(-3, 3))
        e = hermitian_eig(m)
        worst_eig = max(worst_eig, np.linalg.norm(m - e.reconstruct()) / np.linalg.norm(m))
    ok_d = worst_eig <= 1e-8
    _report(record_property, ok_a and ok_b and ok_c and ok_d,
            f"(a) {n_checks} K-cases max err {worst_metric:.1e}; (b) {rs_mismatch} RS mismatches; "
            f"(c) theta err {theta_err:.2f} deg, rho err {rho_err:.0f} m; "
            f"(d) max rel recon err {worst_eig:.1e}")


@pytest.mark.criterion(8, "determinism: byte-identical metric CSVs across reruns, workers 1/4")
def test_criterion_8_determinism(tmp_path, record_property):
    base = make_config(n_ue=128, n_ave=2, subcarriers=[2, 8], render=False,
                       out_dir=str(tmp_path / "a"))
    runs = [base, with_overrides(base, out_dir=str(tmp_path / "b")),
            with_overrides(base, out_dir=str(tmp_path / "c"), workers=4)]
    blobs = []
    for cfg in runs:
        run_experiment(cfg)
        blobs.append((tmp_path / cfg.out_dir / "metrics.csv").read_bytes())
    ok = blobs[0] == blobs[1] == blobs[2] and len(blobs[0].splitlines()) > 10
    _report(record_property, ok,
            f"{len(blobs[0].splitlines()) - 1} metric rows; rerun identical={blobs[0] == blobs[1]}, "
            f"workers 4 identical={blobs[0] == blobs[2]}")
