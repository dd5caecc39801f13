"""Utility functions for tests"""
import pathlib
from contextlib import contextmanager

import numpy as np

from invobs.lie import orthonormality_error
from invobs.rigid_body import ObserverGains
from invobs.simulation import SimConfig


@contextmanager
def does_not_raise():
    """Placeholder to indicate that a section of code is not expected to raise any exception"""
    yield


def assert_rotation(m: np.ndarray, tol: float = 1e-12):
    """Assert that m is a rotation matrix up to tol"""
    assert m.shape == (3, 3)
    assert orthonormality_error(m) <= tol
    assert abs(np.linalg.det(m) - 1.0) <= tol


def reference_config(**kwargs) -> SimConfig:
    """Reference flight-test scenario (20 m/s, sinusoid inputs, L = 10 I), clean"""
    return SimConfig(**kwargs)


def zero_error_config(**kwargs) -> SimConfig:
    """Reference scenario started on the zero-error manifold"""
    base = SimConfig(**kwargs)
    return SimConfig(**{**kwargs, "xhat0": base.v0})


def scalar_gains(k: float) -> ObserverGains:
    """Gains L = k I with NED gravity"""
    return ObserverGains.scalar(k)


def read_bytes(path) -> bytes:
    """Raw content of a file"""
    return pathlib.Path(path).read_bytes()
