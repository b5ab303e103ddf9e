import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modelchart.channel import los_rays, rays_to_csi
from modelchart.errors import DegenerateInput, SingularFit
from modelchart.estimators import LrModel, isq_rho, log_magnitude, lr_fit, lr_rho
from modelchart.scenario import SystemConfig, generate_scenario


def test_isq_examples():
    assert isq_rho(np.array([1.0])) == 1.0
    assert isq_rho(np.array([0.25])) == 2.0
    h = np.array([0.3, 0.1j, -0.2])
    assert abs(isq_rho(h / 4) - 2 * isq_rho(h)) < 1e-12
    with pytest.raises(DegenerateInput):
        isq_rho(np.zeros(4))
    with pytest.raises(ZeroDivisionError):
        isq_rho(np.zeros((2, 3)))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), scale=st.floats(1e-3, 1e3))
def test_isq_phase_invariance_and_scaling(seed, scale):
    rng = np.random.default_rng(seed)
    h = rng.standard_normal((3, 6)) + 1j * rng.standard_normal((3, 6))
    rotated = h * np.exp(1j * rng.uniform(0, 2 * np.pi, h.shape))
    assert abs(isq_rho(rotated) - isq_rho(h)) <= 1e-12 * isq_rho(h)
    assert abs(isq_rho(scale * h) - isq_rho(h) / np.sqrt(scale)) <= 1e-9 * isq_rho(h) / np.sqrt(scale)
    assert abs(log_magnitude(scale * h) - log_magnitude(h) - np.log(scale)) <= 1e-9


def test_lr_exact_line():
    m = lr_fit([0, 1, 2], [5, 3, 1])
    assert abs(m.a + 2) < 1e-12 and abs(m.b - 5) < 1e-12
    assert m.predict(3) == pytest.approx(-1)


def test_lr_singular():
    with pytest.raises(SingularFit):
        lr_fit([1, 1, 1], [1, 2, 3])
    with pytest.raises(SingularFit):
        lr_fit([1], [1])
    with pytest.raises(ValueError):
        lr_fit([1, 2], [1, 2, 3])


def test_lr_on_vanilla_los_matches_closed_form_oracle():
    scene = generate_scenario(2048, seed=11)
    cfg = SystemConfig(n_sc=1)
    csi = rays_to_csi(los_rays(scene, 11), cfg)
    known = np.arange(256)
    x = np.array([log_magnitude(csi[k]) for k in known])
    rho = scene.distances()[known]
    model = lr_fit(x, rho)
    # normal equations solved independently
    design = np.column_stack([x, np.ones_like(x)])
    a, b = np.linalg.solve(design.T @ design, design.T @ rho)
    assert abs(model.a - a) <= 1e-9 * abs(a) and abs(model.b - b) <= 1e-9 * abs(b)
    assert model.a < 0
    pred = model.predict(x)
    r2 = 1 - np.sum((rho - pred) ** 2) / np.sum((rho - rho.mean()) ** 2)
    assert r2 > 0.9
    assert lr_rho(model, csi[0]) == pytest.approx(model.a * x[0] + model.b)


def test_lr_model_is_plain_data():
    assert LrModel(a=-1.0, b=2.0).predict(np.array([1.0, 2.0])).tolist() == [1.0, 0.0]
