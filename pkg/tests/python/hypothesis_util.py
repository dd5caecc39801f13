"""Utility functions for hypothesis-based testing"""
import numpy as np
from hypothesis.strategies import composite, floats, integers, just

from invobs.framework import MeasuredState
from invobs.lie import random_rotation
from invobs.rigid_body import RigidBodyInput


@composite
def vectors(draw, scale=just(10.0)):
    """Returns a strategy to generate 3-vectors with components in [-scale, scale]"""
    bound = draw(scale)
    elements = floats(min_value=-bound, max_value=bound, allow_nan=False, allow_infinity=False)
    return np.array([draw(elements) for _ in range(3)], dtype=np.float64)


@composite
def rotations(draw):
    """
    Returns a strategy to generate Haar-distributed rotations. Hypothesis picks
    the seed, so failing examples shrink to a reproducible rotation.
    """
    seed = draw(integers(min_value=0, max_value=2**32 - 1))
    return random_rotation(seed)


@composite
def rotation_vectors(draw, max_angle=just(np.pi)):
    """Returns a strategy to generate rotation vectors with norm at most max_angle"""
    bound = draw(max_angle)
    w = draw(vectors(scale=just(bound)))
    norm = np.linalg.norm(w)
    if norm > bound:
        w = w * (bound / norm)
    return w


@composite
def measured_states(draw, scale=just(10.0)):
    """Returns a strategy to generate (position, attitude) measured states"""
    return MeasuredState(draw(vectors(scale=scale)), draw(rotations()))


@composite
def rigid_body_inputs(draw, omega_scale=just(2.0), a_scale=just(20.0)):
    """Returns a strategy to generate (angular velocity, specific force) inputs"""
    return RigidBodyInput(draw(vectors(scale=omega_scale)), draw(vectors(scale=a_scale)))


def standard_settings():
    """Default hypothesis settings. Set a smaller max_examples to reduce runtime"""
    return {
        "deadline": None,
        "max_examples": 100,
        "print_blob": True,
    }
