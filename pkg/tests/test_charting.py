import numpy as np
import pytest

from modelchart.channel import los_rays, rays_to_csi, repeated_snapshots
from modelchart.errors import InvalidConfig, MissingModel
from modelchart.estimators import (Chart, chart, estimate_thetas, lr_fit, log_magnitude,
                                   read_chart_csv, write_chart_csv)
from modelchart.scenario import SystemConfig


@pytest.fixture(scope="module")
def noiseless(small_scene):
    cfg = SystemConfig(n_sc=8)
    return rays_to_csi(los_rays(small_scene, 0), cfg)


def test_mm_recovers_positions(small_scene, noiseless):
    ch = chart("MM", noiseless)
    assert all(not e for e in ch.errors)
    err = np.linalg.norm(ch.xy - small_scene.polar_frame_xy(), axis=1)
    assert np.sqrt(np.mean(err ** 2)) <= 2.0
    t = np.radians(ch.theta)
    np.testing.assert_allclose(ch.xy, np.column_stack([ch.rho * np.cos(t), ch.rho * np.sin(t)]))


def test_rs_matches_mm_noiseless(noiseless):
    mm = chart("MM", noiseless[:40])
    rs = chart("RS", noiseless[:40])
    assert np.all(np.abs(mm.theta - rs.theta) <= 0.5)
    assert np.all(np.abs(mm.rho - rs.rho) <= 1)


def test_single_subcarrier_paths(small_scene):
    cfg = SystemConfig(n_sc=1)
    csi = rays_to_csi(los_rays(small_scene, 0), cfg)
    isq = chart("ISQ", csi)
    assert isq.ok.all()
    mm = chart("MM", csi)
    assert set(mm.errors) == {"InsufficientSubcarriers"}
    assert np.all(np.isnan(mm.rho))
    assert len(mm.points()) == small_scene.n_ue


def test_lr_needs_model(noiseless):
    with pytest.raises(MissingModel):
        chart("LR", noiseless)
    with pytest.raises(InvalidConfig):
        chart("XX", noiseless)


def test_shared_theta_pass(small_scene):
    cfg = SystemConfig(n_sc=1, n_ave=3)
    snaps = repeated_snapshots(los_rays(small_scene, 0), cfg, seed=0)
    theta, errs = estimate_thetas(snaps)
    model = lr_fit(np.array([log_magnitude(c) for c in snaps[:16]]), small_scene.distances()[:16])
    isq = chart("ISQ", snaps, theta=theta)
    lr = chart("LR", snaps, theta=theta, lr_model=model)
    assert np.array_equal(isq.theta, lr.theta)
    assert np.array_equal(isq.theta, chart("ISQ", snaps).theta)
    bad = theta.copy()
    bad[3] = np.nan
    assert chart("ISQ", snaps, theta=bad).errors[3] == "NoSignal"


def test_zero_ue_flagged_not_dropped(noiseless):
    batch = noiseless[:5].copy()
    batch[2] = 0
    ch = chart("MM", batch)
    assert ch.errors[2] == "NoSignal" and np.isnan(ch.theta[2])
    assert ch.ok.sum() == 4 and ch.n_ue == 5


def test_workers_do_not_change_results(noiseless):
    a = chart("RS", noiseless[:30], workers=1)
    b = chart("RS", noiseless[:30], workers=4)
    assert np.array_equal(a.theta, b.theta) and np.array_equal(a.rho, b.rho)


def test_chart_csv_roundtrip(tmp_path, noiseless):
    mm = chart("MM", noiseless[:6])
    pca = Chart.from_planar("PCA", np.arange(12.0).reshape(6, 2))
    path = tmp_path / "charts.csv"
    write_chart_csv([mm, pca], path)
    back = read_chart_csv(path)
    assert np.array_equal(back["MM"].theta, mm.theta)
    assert np.array_equal(back["MM"].rho, mm.rho)
    assert np.array_equal(back["PCA"].xy, pca.xy)
    header = path.read_text().splitlines()[0]
    assert header == "ue_index,theta_deg,rho_m,x,y,algorithm,error_flag"
