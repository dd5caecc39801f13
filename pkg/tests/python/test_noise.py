"""Tests for the measurement noise model"""
import numpy as np
import pytest

from invobs.framework import MeasuredState
from invobs.lie import random_rotation
from invobs.noise import NoiseSpec, corrupt, sample_noise
from invobs.rigid_body import RigidBodyInput

from .util import assert_rotation


def _clean():
    y = MeasuredState(np.array([1.0, -2.0, 3.0]), random_rotation(0))
    u = RigidBodyInput(np.array([0.1, 0.2, 0.3]), np.array([0.0, 0.0, -9.80665]))
    return y, u


def test_reference_intensities():
    """Per-axis standard deviations are sqrt(PSD * rate) at 1000 Hz"""
    noise = NoiseSpec.paper()
    assert noise.interval == pytest.approx(1e-3)
    np.testing.assert_allclose(
        noise.sigmas(),
        np.sqrt([5e-4 * 1000, 1e-7 * 1000, 1e-5 * 1000, 2e-2 * 1000]),
        rtol=1e-15,
    )


def test_sample_variance():
    """10^6 draws reproduce the configured variance of every channel within 1%"""
    noise = NoiseSpec.paper()
    draws = sample_noise(noise, np.random.default_rng(0), n=1_000_000)
    assert draws.shape == (1_000_000, 4, 3)
    variance = draws.var(axis=0)
    expected = np.broadcast_to((noise.sigmas() ** 2)[:, None], (4, 3))
    np.testing.assert_allclose(variance, expected, rtol=0.01)
    np.testing.assert_allclose(draws.mean(axis=0) / noise.sigmas()[:, None], 0.0, atol=0.01)


def test_zero_intensity_is_identity():
    """With every PSD zero the measurements are passed through unchanged"""
    y, u = _clean()
    y_meas, u_meas = corrupt(y, u, NoiseSpec.off(), np.random.default_rng(1))
    np.testing.assert_array_equal(y_meas.vec, y.vec)
    np.testing.assert_array_equal(y_meas.rot, y.rot)
    np.testing.assert_array_equal(u_meas.omega, u.omega)
    np.testing.assert_array_equal(u_meas.a, u.a)


def test_corrupted_attitude_is_rotation():
    """Attitude noise is applied through the exponential map"""
    y, u = _clean()
    rng = np.random.default_rng(2)
    for _ in range(1000):
        y_meas, _ = corrupt(y, u, NoiseSpec.paper().scaled(100.0), rng)
        assert_rotation(y_meas.rot)
        assert not np.array_equal(y_meas.rot, y.rot)


def test_corruption_is_reproducible():
    """Equal Generator states give equal corruptions"""
    y, u = _clean()
    first = corrupt(y, u, NoiseSpec.paper(), np.random.default_rng(3))
    second = corrupt(y, u, NoiseSpec.paper(), np.random.default_rng(3))
    np.testing.assert_array_equal(first[0].vec, second[0].vec)
    np.testing.assert_array_equal(first[0].rot, second[0].rot)
    np.testing.assert_array_equal(first[1].a, second[1].a)


def test_scaled():
    """Scaling multiplies every PSD and leaves the rate alone"""
    noise = NoiseSpec.paper().scaled(4.0)
    np.testing.assert_allclose(noise.sigmas(), 2.0 * NoiseSpec.paper().sigmas(), rtol=1e-15)
    assert noise.sample_rate == 1000.0
    assert NoiseSpec.paper().scaled(0.0).asdict() == NoiseSpec.off().asdict()


@pytest.mark.parametrize(
    "kwargs",
    [
        {"psd_q": -1.0},
        {"psd_R": float("nan")},
        {"psd_a": float("inf")},
        {"sample_rate": 0.0},
        {"sample_rate": -100.0},
    ],
)
def test_invalid_spec(kwargs):
    """Negative or non-finite intensities and non-positive rates are rejected"""
    with pytest.raises(ValueError):
        NoiseSpec(**kwargs)


def test_asdict():
    """asdict() lists the four PSDs and the rate"""
    assert set(NoiseSpec().asdict()) == {"psd_q", "psd_R", "psd_omega", "psd_a", "sample_rate"}
