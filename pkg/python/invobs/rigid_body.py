"""
Rigid-body velocity observer

The unmeasured state is the body velocity ``v``; position ``q`` and attitude
``R_IB`` are measured; body angular velocity ``omega`` and specific force ``a``
are inputs::

    vdot = v x omega + R_IB^T g + a
    qdot = R_IB v
    Rdot = R_IB hat(omega)

The system is invariant under SO(3) acting as ``phi_g(v) = R_g v``,
``rho_g(q, R_IB) = (q, R_IB R_g^T)``, ``psi_g(omega, a) = (R_g omega, R_g a)``.
With the moving frame ``gamma(y) = R_IB`` and ``ell(y) = L q`` the invariant
error obeys ``etadot = -L eta``.
"""
from __future__ import annotations

import dataclasses
from typing import Dict, Iterator, Tuple

import numpy as np
import scipy.linalg

from .core import NotHurwitz, check_finite
from .framework import (
    MeasuredState,
    MeasuredTangent,
    ObserverDesign,
    SystemModel,
    TransformationGroup,
)
from .lie import hat, random_rotation
from .util import as_mat3, as_vec3

STANDARD_GRAVITY = 9.80665
# NED inertial frame: gravity points along +z (down)
GRAVITY_NED = np.array([0.0, 0.0, STANDARD_GRAVITY])


@dataclasses.dataclass(frozen=True)
class RigidBodyState:
    """
    Full plant state

    Parameters
    ----------
    v :
        Body velocity [m/s]
    q :
        Inertial position [m]
    R_IB :
        Attitude, body to inertial
    """

    v: np.ndarray
    q: np.ndarray
    R_IB: np.ndarray  # pylint: disable=invalid-name

    @property
    def y(self) -> MeasuredState:
        """Measured part (q, R_IB)"""
        return MeasuredState(self.q, self.R_IB)


@dataclasses.dataclass(frozen=True)
class RigidBodyInput:
    """
    Observer input

    Parameters
    ----------
    omega :
        Body angular velocity [rad/s]
    a :
        Body-frame specific force [m/s^2]
    """

    omega: np.ndarray
    a: np.ndarray


@dataclasses.dataclass(frozen=True)
class ObserverGains:
    """
    Observer tuning

    Parameters
    ----------
    L :
        Gain matrix [1/s]; -L must be Hurwitz
    gravity :
        Gravity vector in the inertial frame [m/s^2]
    """

    L: np.ndarray  # pylint: disable=invalid-name
    gravity: np.ndarray = dataclasses.field(default_factory=GRAVITY_NED.copy)

    def __post_init__(self):
        gain = as_mat3(self.L, name="L")
        gravity = as_vec3(self.gravity, name="gravity")
        check_finite("gain matrix L", gain)
        check_finite("gravity", gravity)
        eigenvalues = scipy.linalg.eigvals(-gain)
        if np.any(eigenvalues.real >= 0.0):
            raise NotHurwitz(
                f"-L is not Hurwitz; eigenvalues of -L: {np.round(eigenvalues, 6)}"
            )
        object.__setattr__(self, "L", gain)
        object.__setattr__(self, "gravity", gravity)

    @classmethod
    def scalar(cls, k: float, gravity=None) -> ObserverGains:
        """Gains ``L = k I``"""
        if gravity is None:
            return cls(L=k * np.eye(3))
        return cls(L=k * np.eye(3), gravity=gravity)

    def asdict(self) -> Dict[str, list]:
        """Convert to dictionary"""
        return {"L": self.L.tolist(), "gravity": self.gravity.tolist()}


def f_rb(v: np.ndarray, y: MeasuredState, u: RigidBodyInput, gains: ObserverGains) -> np.ndarray:
    """
    Translational dynamics in the body frame, ``v x omega + R_IB^T g + a``

    Parameters
    ----------
    v :
        Body velocity [m/s]
    y :
        Measured state (q, R_IB)
    u :
        Input (omega, a)
    gains :
        Supplies the gravity vector

    Returns
    -------
    vdot :
        Body acceleration [m/s^2]
    """
    return hat(v) @ u.omega + y.rot.T @ gains.gravity + u.a


def h_rb(v: np.ndarray, y: MeasuredState, u: RigidBodyInput) -> MeasuredTangent:
    """Kinematics of the measured state, ``(R_IB v, R_IB hat(omega))``"""
    return MeasuredTangent(y.rot @ v, y.rot @ hat(u.omega))


def rb_system_model(gains: ObserverGains) -> SystemModel:
    """Rigid-body dynamics as a :py:class:`~invobs.framework.SystemModel`"""
    return SystemModel(
        f=lambda v, y, u: f_rb(v, y, u, gains),
        h=h_rb,
        dim_x=3,
        dim_y=6,
        dim_group=3,
    )


def _rho(g: np.ndarray, y: MeasuredState) -> MeasuredState:
    return MeasuredState(y.vec, y.rot @ g.T)


def _psi(g: np.ndarray, u: RigidBodyInput) -> RigidBodyInput:
    return RigidBodyInput(g @ u.omega, g @ u.a)


def _tangent_rho(g: np.ndarray, y: MeasuredState, ydot: MeasuredTangent) -> MeasuredTangent:
    # pylint: disable=unused-argument
    return MeasuredTangent(ydot.vec, ydot.rot @ g.T)


def so3_group() -> TransformationGroup:
    """SO(3) acting on body velocity, attitude and body-frame inputs"""
    return TransformationGroup(
        phi=lambda g, v: g @ v,
        rho=_rho,
        psi=_psi,
        tangent_rho=_tangent_rho,
        compose=lambda g, h: g @ h,
        inverse=lambda g: g.T,
        identity=lambda: np.eye(3),
        dim=3,
    )


def rb_observer_design(gains: ObserverGains) -> ObserverDesign:
    """
    Moving frame ``gamma(y) = R_IB`` with ``ell(y) = L q``, so that
    ``beta(y) = R_IB^T L q``

    The tangent of beta is registered in closed form,
    ``T_y beta(qdot, Rdot) = R_IB^T L qdot + Rdot^T L q``, and so is the tangent
    of ``lambda(y; xi) = R_IB xi``, which is ``Rdot xi``.
    """
    gain = gains.L

    def tangent_beta(y: MeasuredState, ydot: MeasuredTangent) -> np.ndarray:
        return y.rot.T @ (gain @ ydot.vec) + ydot.rot.T @ (gain @ y.vec)

    def tangent_lambda(y: MeasuredState, xi: np.ndarray, ydot: MeasuredTangent) -> np.ndarray:
        # pylint: disable=unused-argument
        return ydot.rot @ xi

    return ObserverDesign(
        gamma=lambda y: y.rot,
        ell=lambda y: gain @ y.vec,
        tangent_beta=tangent_beta,
        tangent_lambda=tangent_lambda,
    )


def rb_alpha_closed_form(
    z: np.ndarray, y: MeasuredState, u: RigidBodyInput, gains: ObserverGains
) -> np.ndarray:
    """
    Observer field written out for the rigid body::

        (z + R^T L q) x omega + R^T g + a + hat(omega) R^T L q - R^T L R (z + R^T L q)
    """
    rot, gain = y.rot, gains.L
    offset = rot.T @ gain @ y.vec
    vhat = z + offset
    return (
        np.cross(vhat, u.omega)
        + rot.T @ gains.gravity
        + u.a
        + hat(u.omega) @ offset
        - rot.T @ gain @ rot @ vhat
    )


def rb_error_rhs(eta: np.ndarray, gains: ObserverGains) -> np.ndarray:
    """Invariant error dynamics, ``-L eta``"""
    return -gains.L @ eta


def rb_error_solution(eta0: np.ndarray, gains: ObserverGains, t: float) -> np.ndarray:
    """Closed-form invariant error at time ``t``, ``expm(-L t) eta0``"""
    return scipy.linalg.expm(-gains.L * t) @ eta0


# ---------------------------------------------------------------------------
# Samplers for verification sweeps
# ---------------------------------------------------------------------------


def sample_group(rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed group element"""
    return random_rotation(rng)


def sample_velocity(rng: np.random.Generator, scale: float = 30.0) -> np.ndarray:
    """Body velocity with components in [-scale, scale] m/s"""
    return rng.uniform(-scale, scale, 3)


def sample_measured(rng: np.random.Generator, scale: float = 10.0) -> MeasuredState:
    """Position with components in [-scale, scale] m and a random attitude"""
    return MeasuredState(rng.uniform(-scale, scale, 3), random_rotation(rng))


def sample_input(rng: np.random.Generator) -> RigidBodyInput:
    """Angular velocity up to 2 rad/s per axis, specific force up to 20 m/s^2"""
    return RigidBodyInput(rng.uniform(-2.0, 2.0, 3), rng.uniform(-20.0, 20.0, 3))


class Sampler:
    """
    Draws verification samples for the rigid-body instance

    Parameters
    ----------
    seed :
        Seed of the underlying numpy Generator
    """

    def __init__(self, seed: int = 0):
        self._rng = np.random.default_rng(seed)

    def group(self, n: int) -> Iterator[np.ndarray]:
        """Group elements alone"""
        for _ in range(n):
            yield sample_group(self._rng)

    def frame(self, n: int) -> Iterator[Tuple[np.ndarray, MeasuredState]]:
        """``(g, y)`` pairs"""
        for _ in range(n):
            yield sample_group(self._rng), sample_measured(self._rng)

    def system(
        self, n: int
    ) -> Iterator[Tuple[np.ndarray, np.ndarray, MeasuredState, RigidBodyInput]]:
        """``(g, x, y, u)`` tuples"""
        for _ in range(n):
            yield (
                sample_group(self._rng),
                sample_velocity(self._rng),
                sample_measured(self._rng),
                sample_input(self._rng),
            )

    def beta(self, n: int) -> Iterator[Tuple[np.ndarray, MeasuredState, MeasuredTangent]]:
        """``(g, y, ydot)`` with ydot drawn from the rigid-body kinematics"""
        for _ in range(n):
            g = sample_group(self._rng)
            y = sample_measured(self._rng)
            ydot = h_rb(sample_velocity(self._rng), y, sample_input(self._rng))
            yield g, y, ydot

    def lam(
        self, n: int
    ) -> Iterator[Tuple[np.ndarray, np.ndarray, np.ndarray, MeasuredState, RigidBodyInput]]:
        """``(g, zeta, x, y, u)`` tuples"""
        for _ in range(n):
            yield (
                sample_group(self._rng),
                sample_velocity(self._rng, scale=10.0),
                sample_velocity(self._rng),
                sample_measured(self._rng),
                sample_input(self._rng),
            )

    def estimate(
        self, n: int
    ) -> Iterator[Tuple[np.ndarray, np.ndarray, np.ndarray, MeasuredState, RigidBodyInput]]:
        """``(g, xhat, x, y, u)`` tuples"""
        yield from self.lam(n)

    def error(
        self, n: int
    ) -> Iterator[Tuple[np.ndarray, np.ndarray, np.ndarray, MeasuredState]]:
        """``(g, z, x, y)`` tuples"""
        for _ in range(n):
            yield (
                sample_group(self._rng),
                sample_velocity(self._rng),
                sample_velocity(self._rng),
                sample_measured(self._rng),
            )

    def trajectory_point(
        self, n: int
    ) -> Iterator[Tuple[np.ndarray, MeasuredState, RigidBodyInput]]:
        """``(x, y, u)`` tuples"""
        for _ in range(n):
            yield (
                sample_velocity(self._rng),
                sample_measured(self._rng),
                sample_input(self._rng),
            )

    def error_system(
        self, n: int
    ) -> Iterator[Tuple[np.ndarray, np.ndarray, MeasuredState, RigidBodyInput]]:
        """``(eta, x, y, u)`` tuples, to be normalized with the moving frame"""
        for _ in range(n):
            yield (
                sample_velocity(self._rng, scale=10.0),
                sample_velocity(self._rng),
                sample_measured(self._rng),
                sample_input(self._rng),
            )
