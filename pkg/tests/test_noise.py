import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from groundtrack.errors import EmptyWindow, InvalidBox
from groundtrack.noise import (
    NoiseWindow,
    extract_homography_block,
    ground_process_q,
    initial_r,
    measurement_noise_sample,
    process_noise_sample,
    psd_repair,
    window_mean,
)


def test_empty_window_raises():
    with pytest.raises(EmptyWindow):
        window_mean(NoiseWindow(2, 5))


def test_window_mean_over_last_m():
    w = NoiseWindow(2, 3)
    for k in range(1, 6):
        w.push(k * np.eye(2))
    # samples 3, 4, 5 remain
    assert np.allclose(window_mean(w), 4 * np.eye(2))


def test_window_rejects_wrong_shape():
    with pytest.raises(ValueError):
        NoiseWindow(2, 5).push(np.eye(3))


@given(arrays(float, (4, 2, 2), elements=st.floats(-10, 10)))
def test_window_mean_is_symmetric(samples):
    w = NoiseWindow(2, 5)
    for s in samples:
        w.push(s)
    m = window_mean(w)
    assert np.array_equal(m, m.T)


def test_initial_r():
    assert np.allclose(initial_r(40.0, 100.0, 0.05), np.diag([4.0, 25.0]))
    with pytest.raises(InvalidBox):
        initial_r(0.0, 10.0)


def test_ground_q_matches_explicit_form():
    dt, sx, sy = 0.05, 5.0, 3.6
    q = ground_process_q(sx, sy, dt)
    cv = np.array([[dt**4 / 4, dt**3 / 2], [dt**3 / 2, dt**2]])
    assert np.allclose(q[:2, :2], sx * cv)
    assert np.allclose(q[2:, 2:], sy * cv)
    assert np.all(q[:2, 2:] == 0)


def test_measurement_sample_components():
    j = np.zeros((2, 13))
    j[0, 0] = 2.0
    j[1, 2] = 3.0
    p = np.eye(13)
    s = measurement_noise_sample([1.0, -1.0], j, p)
    assert np.allclose(s, [[1 + 4, -1], [-1, 1 + 9]])


def test_process_sample_and_homography_block():
    k = np.arange(26.0).reshape(13, 2)
    d = np.array([1.0, 2.0])
    q = process_noise_sample(k, d)
    kd = k @ d
    assert np.allclose(q, np.outer(kd, kd))
    block = extract_homography_block(q)
    assert block.shape == (9, 9)
    assert np.all(block[8] == 0) and np.all(block[:, 8] == 0)
    assert np.allclose(block[:8, :8], np.outer(kd[4:12], kd[4:12]))


@given(arrays(float, (3, 3), elements=st.floats(-5, 5)))
def test_psd_repair(m):
    r = psd_repair(m)
    assert np.allclose(r, r.T)
    assert np.linalg.eigvalsh(r).min() > -1e-9


def test_psd_repair_leaves_psd_alone():
    m = np.array([[2.0, 1.0], [1.0, 2.0]])
    assert np.array_equal(psd_repair(m), m)
