"""
SO(3) primitives: skew operators, exponential map, group structure, projection
and random sampling.

Rotations are plain ``(3, 3)`` float64 arrays (direction cosine matrices), vectors
are ``(3,)`` arrays. Every function is pure and never mutates its arguments.
"""
from typing import Optional, Union

import numpy as np
from scipy.spatial.transform import Rotation as _ScipyRotation

from .core import Degenerate, NotSkew

# Below this angle exp_so3 switches to the second-order Taylor coefficients.
SMALL_ANGLE = 1e-4
SKEW_TOL = 1e-9
ROTATION_TOL = 1e-12

SeedLike = Union[None, int, np.random.SeedSequence, np.random.Generator]


def hat(w) -> np.ndarray:
    """
    Skew-symmetric cross product matrix, ``hat(w) @ b == np.cross(w, b)``

    Parameters
    ----------
    w :
        3-vector

    Returns
    -------
    m :
        3x3 skew-symmetric matrix
    """
    w0, w1, w2 = w
    return np.array(
        [
            [0.0, -w2, w1],
            [w2, 0.0, -w0],
            [-w1, w0, 0.0],
        ]
    )


def vee(m: np.ndarray) -> np.ndarray:
    """
    Inverse of :py:func:`hat`

    Parameters
    ----------
    m :
        3x3 skew-symmetric matrix

    Returns
    -------
    w :
        3-vector with ``hat(w) == m``
    """
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (3, 3):
        raise ValueError(f"vee() expects a 3x3 matrix, got shape {m.shape}")
    asym = np.linalg.norm(m + m.T)
    if asym > SKEW_TOL:
        raise NotSkew(f"Matrix is not skew-symmetric: |M + M^T|_F = {asym:.3e}")
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def exp_so3(w) -> np.ndarray:
    """
    Exponential map so(3) -> SO(3) (Rodrigues formula)

    Parameters
    ----------
    w :
        Rotation vector (axis times angle, in radians)

    Returns
    -------
    rotation :
        3x3 rotation matrix
    """
    w = np.asarray(w, dtype=np.float64)
    theta = float(np.linalg.norm(w))
    w_hat = hat(w)
    w_hat2 = w_hat @ w_hat
    if theta < SMALL_ANGLE:
        theta2 = theta * theta
        a = 1.0 - theta2 / 6.0
        b = 0.5 - theta2 / 24.0
    else:
        a = np.sin(theta) / theta
        # 1 - cos(theta), without cancellation
        b = 2.0 * np.sin(0.5 * theta) ** 2 / (theta * theta)
    return np.eye(3) + a * w_hat + b * w_hat2


def compose(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Group product g * h"""
    return g @ h


def inverse(g: np.ndarray) -> np.ndarray:
    """Group inverse of a rotation"""
    return g.T.copy()


def act(g: np.ndarray, v) -> np.ndarray:
    """Rotate a vector"""
    return g @ v


def identity() -> np.ndarray:
    """Identity rotation"""
    return np.eye(3)


def orthonormality_error(m: np.ndarray) -> float:
    """Frobenius norm of M^T M - I"""
    return float(np.linalg.norm(m.T @ m - np.eye(3)))


def is_rotation(m: np.ndarray, tol: float = ROTATION_TOL) -> bool:
    """Whether ``m`` is a rotation matrix up to ``tol``"""
    m = np.asarray(m)
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        return False
    return orthonormality_error(m) <= tol and abs(np.linalg.det(m) - 1.0) <= tol


def project_to_so3(m) -> np.ndarray:
    """
    Nearest rotation in Frobenius norm (orthogonal polar factor)

    Parameters
    ----------
    m :
        3x3 matrix with positive determinant

    Returns
    -------
    rotation :
        The orthogonal factor of the polar decomposition of ``m``
    """
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (3, 3):
        raise ValueError(f"project_to_so3() expects a 3x3 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise Degenerate("Matrix has non-finite entries")
    # m = U S V^T has the polar factor U V^T
    u, singular_values, vt = np.linalg.svd(m)
    if singular_values[-1] <= 1e-12 * singular_values[0]:
        raise Degenerate("Matrix is numerically rank-deficient")
    rotation = u @ vt
    if np.linalg.det(rotation) <= 0.0:
        raise Degenerate("Matrix has non-positive determinant")
    return rotation


def as_generator(seed: SeedLike) -> np.random.Generator:
    """Turn a seed (or an existing Generator) into a Generator"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_rotation(rng_seed: SeedLike = None) -> np.ndarray:
    """
    Draw a rotation from the Haar (uniform) measure on SO(3)

    A uniformly random unit quaternion fixes the axis and the Haar-distributed
    angle; the rotation is then built with :py:func:`exp_so3`.

    Parameters
    ----------
    rng_seed :
        Integer seed, SeedSequence or numpy Generator. An integer seed gives the
        same rotation on every call; a Generator advances its stream.

    Returns
    -------
    rotation :
        3x3 rotation matrix
    """
    rng = as_generator(rng_seed)
    quat = rng.standard_normal(4)
    rotvec = _ScipyRotation.from_quat(quat).as_rotvec()
    return exp_so3(rotvec)


def random_rotations(n: int, rng_seed: Optional[SeedLike] = None) -> np.ndarray:
    """Draw ``n`` Haar-distributed rotations, stacked into shape (n, 3, 3)"""
    rng = as_generator(rng_seed)
    return np.stack([random_rotation(rng) for _ in range(n)])
