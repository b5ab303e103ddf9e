import numpy as np
import pytest

from modelchart.errors import NoSignal, SubarrayTooLarge
from modelchart.estimators import (jm_estimate, jm_smooth, jm_spectrum, music_estimate_rho,
                                   music_estimate_theta, steering_rho, steering_theta)

from conftest import single_ray


def test_single_window_is_vectorized_tensor(rng):
    csi = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    out = jm_smooth(csi, 4, 4)
    assert out.shape == (16, 1)
    np.testing.assert_array_equal(out[:, 0], csi.reshape(-1))


def test_window_count_and_order(rng):
    csi = rng.standard_normal((8, 32)) + 1j * rng.standard_normal((8, 32))
    out = jm_smooth(csi)
    assert out.shape == (16, 145)
    # column index = subcarrier offset * 29 + antenna offset
    for col, (s0, n0) in ((0, (0, 0)), (1, (0, 1)), (29, (1, 0)), (144, (4, 28))):
        np.testing.assert_array_equal(out[:, col], csi[s0:s0 + 4, n0:n0 + 4].reshape(-1))


def test_subarray_too_large():
    with pytest.raises(SubarrayTooLarge):
        jm_smooth(np.ones((2, 32)), 4, 4)
    with pytest.raises(SubarrayTooLarge):
        jm_estimate(np.ones((8, 3)))


def test_search_vector_matches_window_layout():
    # a noiseless window equals kron(B(rho), A(theta)) up to a common phase
    csi = single_ray(60, 300, 4, 4)
    window = jm_smooth(csi)[:, 0]
    sv = np.kron(steering_rho(300.0, 4), steering_theta(60.0, 4))
    ratio = window / sv
    np.testing.assert_allclose(ratio, ratio[0], atol=1e-12)


def test_noiseless_example():
    theta, rho = jm_estimate(single_ray(60, 300, 8, 32))
    assert abs(theta - 60) <= 0.5 and abs(rho - 300) <= 1
    assert jm_spectrum(single_ray(60, 300, 8, 32)).shape == (1001, 361)


def test_agrees_with_mm_noiseless():
    for theta, rho in ((35.0, 420.0), (110.5, 150.0), (150.0, 800.0)):
        csi = single_ray(theta, rho, 8, 32)
        t, r = jm_estimate(csi)
        assert abs(t - music_estimate_theta(csi)) <= 0.5
        assert abs(r - music_estimate_rho(csi)) <= 1


def test_zero_csi():
    with pytest.raises(NoSignal):
        jm_estimate(np.zeros((8, 8)))
