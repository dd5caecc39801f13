"""
Coupled plant/observer simulation of the rigid-body velocity observer

The plant always integrates the true signals. The observer either consumes the
same signals or, when noise is enabled, corrupted copies that are sampled at the
noise rate and held constant in between.
"""
from __future__ import annotations

import dataclasses
import functools
import logging
import math
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .core import NonFinite, UnknownProfile, check_finite
from .framework import (
    MeasuredState,
    alpha,
    beta,
    estimate,
    invariant_error,
)
from .lie import is_rotation, project_to_so3
from .noise import NoiseSpec, corrupt
from .rigid_body import (
    GRAVITY_NED,
    STANDARD_GRAVITY,
    ObserverGains,
    RigidBodyInput,
    RigidBodyState,
    f_rb,
    h_rb,
    rb_observer_design,
    rb_system_model,
    so3_group,
)
from .util import FLOAT_FORMAT, as_mat3, as_vec3, check_seed

logger = logging.getLogger(__name__)

InputFn = Callable[[float, np.ndarray], RigidBodyInput]

# ---------------------------------------------------------------------------
# Input profiles
# ---------------------------------------------------------------------------

PROFILE_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "level": {},
    "sinusoid": {
        "amplitude": [0.5, 0.5, 0.5],
        "frequency": 0.2,
        "phase": [0.0, 0.0, 0.0],
        "a0": [0.0, 0.0, -STANDARD_GRAVITY],
        "a_amplitude": [1.0, 0.5, 0.5],
    },
    "doublet": {
        "axis": [1.0, 0.0, 0.0],
        "rate": 0.5,
        "start": 1.0,
        "width": 1.0,
    },
    "orbit": {
        "turn_rate": 1.0,
        "v_ref": [20.0, 0.0, 0.0],
    },
}


def _level(params, gravity) -> InputFn:
    # pylint: disable=unused-argument
    def u(t, rot):
        return RigidBodyInput(np.zeros(3), -(rot.T @ gravity))

    return u


def _sinusoid(params, gravity) -> InputFn:
    # pylint: disable=unused-argument
    angular = 2.0 * np.pi * np.asarray(params["frequency"], dtype=np.float64)
    phase = np.asarray(params["phase"], dtype=np.float64)
    amplitude = as_vec3(params["amplitude"], name="amplitude")
    a0 = as_vec3(params["a0"], name="a0")
    a_amplitude = as_vec3(params["a_amplitude"], name="a_amplitude")

    def u(t, rot):
        wave = np.sin(angular * t + phase) * np.ones(3)
        return RigidBodyInput(amplitude * wave, a0 + a_amplitude * wave)

    return u


def _doublet(params, gravity) -> InputFn:
    axis = as_vec3(params["axis"], name="axis")
    axis = axis / np.linalg.norm(axis)
    start, width, rate = float(params["start"]), float(params["width"]), float(params["rate"])

    def u(t, rot):
        if start <= t < start + width:
            omega = rate * axis
        elif start + width <= t < start + 2.0 * width:
            omega = -rate * axis
        else:
            omega = np.zeros(3)
        return RigidBodyInput(omega, -(rot.T @ gravity))

    return u


def _orbit(params, gravity) -> InputFn:
    # pylint: disable=unused-argument
    omega = np.array([0.0, 0.0, float(params["turn_rate"])])
    centripetal = -np.cross(as_vec3(params["v_ref"], name="v_ref"), omega)

    def u(t, rot):
        return RigidBodyInput(omega.copy(), centripetal - rot.T @ gravity)

    return u


_PROFILES = {
    "level": _level,
    "sinusoid": _sinusoid,
    "doublet": _doublet,
    "orbit": _orbit,
}


def profile_params(kind: str, params: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Defaults of profile ``kind`` updated with ``params``"""
    if kind not in _PROFILES:
        raise UnknownProfile(
            f"Unknown input profile {kind!r}; expected one of {sorted(_PROFILES)}"
        )
    merged = dict(PROFILE_DEFAULTS[kind])
    if params:
        unknown = set(params) - set(merged)
        if unknown:
            raise ValueError(f"Unknown parameters for profile {kind!r}: {sorted(unknown)}")
        merged.update(params)
    return merged


def profile_function(
    kind: str, params: Optional[Dict[str, Any]] = None, gravity: Optional[np.ndarray] = None
) -> InputFn:
    """
    Resolve an input profile once into a callable ``(t, R_IB) -> RigidBodyInput``

    Parameters are merged with the defaults and converted to arrays here, so the
    returned function does no lookups when the integrator calls it at every stage.
    """
    merged = profile_params(kind, params)
    gravity = GRAVITY_NED if gravity is None else as_vec3(gravity, name="gravity")
    evaluate = _PROFILES[kind](merged, gravity)

    def u(t: float, rot: np.ndarray) -> RigidBodyInput:
        if t < 0.0:
            raise ValueError(f"Profile time must be non-negative, got {t}")
        return evaluate(t, rot)

    return u


def input_profile(
    kind: str,
    params: Optional[Dict[str, Any]],
    t: float,
    rot: Optional[np.ndarray] = None,
    gravity: Optional[np.ndarray] = None,
) -> RigidBodyInput:
    """
    Evaluate a synthetic input profile

    Parameters
    ----------
    kind :
        One of ``level`` (no rotation, specific force cancels gravity),
        ``sinusoid`` (sinusoidal body rates and specific force), ``doublet``
        (a positive then a negative body-rate pulse about a fixed axis) or
        ``orbit`` (steady level turn at a constant yaw rate)
    params :
        Profile parameters; missing ones take the values in ``PROFILE_DEFAULTS``
    t :
        Time [s], non-negative
    rot :
        Current attitude; the gravity-compensating profiles need it
    gravity :
        Gravity vector, NED standard gravity by default

    Returns
    -------
    u :
        Angular velocity and specific force at time ``t``
    """
    return profile_function(kind, params, gravity)(t, np.eye(3) if rot is None else rot)


@dataclasses.dataclass(frozen=True)
class ProfileSpec:
    """Input profile kind plus its parameters"""

    kind: str = "sinusoid"
    params: Dict[str, Any] = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        profile_params(self.kind, self.params)

    def resolved(self) -> Dict[str, Any]:
        """Parameters with defaults filled in"""
        return profile_params(self.kind, self.params)


# ---------------------------------------------------------------------------
# Configuration and results
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class SimConfig:
    # pylint: disable=too-many-instance-attributes
    """
    Scenario definition. Defaults reproduce the reference flight test:
    straight-and-level at 20 m/s, ``R_IB = I``, zero initial estimate and
    ``L = 10 I``.

    Parameters
    ----------
    t_end :
        Final time [s]
    dt :
        Integration step [s]
    gains :
        Observer gains (L, gravity)
    v0, q0, R0 :
        Initial plant state
    xhat0 :
        Initial velocity estimate; ignored when ``z0`` is given
    z0 :
        Initial observer state
    profile :
        Input profile
    noise :
        Measurement/input noise; None disables it
    seed :
        Seed of the noise generator
    frame :
        Fixed rotation applied to the whole scenario (symmetry transformation)
    """

    t_end: float = 10.0
    dt: float = 1e-3
    gains: ObserverGains = dataclasses.field(default_factory=lambda: ObserverGains.scalar(10.0))
    v0: np.ndarray = dataclasses.field(default_factory=lambda: np.array([20.0, 0.0, 0.0]))
    q0: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(3))
    R0: np.ndarray = dataclasses.field(  # pylint: disable=invalid-name
        default_factory=lambda: np.eye(3)
    )
    xhat0: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(3))
    z0: Optional[np.ndarray] = None
    profile: ProfileSpec = dataclasses.field(default_factory=ProfileSpec)
    noise: Optional[NoiseSpec] = None
    seed: int = 0
    frame: np.ndarray = dataclasses.field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= self.dt:
            raise ValueError(f"t_end ({self.t_end}) must be at least dt ({self.dt})")
        object.__setattr__(self, "seed", check_seed(self.seed))
        for name in ("v0", "q0", "xhat0"):
            object.__setattr__(self, name, as_vec3(getattr(self, name), name=name))
        if self.z0 is not None:
            object.__setattr__(self, "z0", as_vec3(self.z0, name="z0"))
        for name in ("R0", "frame"):
            value = as_mat3(getattr(self, name), name=name)
            if not is_rotation(value, tol=1e-9):
                raise ValueError(f"{name} is not a rotation matrix")
            object.__setattr__(self, name, value)
        if self.noise is not None:
            self.steps_per_noise_sample()

    @property
    def n_steps(self) -> int:
        """Number of integration steps"""
        return int(round(self.t_end / self.dt))

    def steps_per_noise_sample(self) -> int:
        """Integration steps per noise sample; the noise interval must be a multiple of dt"""
        if self.noise is None:
            return 1
        ratio = self.noise.interval / self.dt
        steps = int(round(ratio))
        if steps < 1 or abs(ratio - steps) > 1e-9 * max(1.0, ratio):
            raise ValueError(
                f"Noise interval {self.noise.interval} s is not an integer multiple "
                f"of dt = {self.dt} s"
            )
        return steps

    def asdict(self) -> Dict[str, Any]:
        """Convert to a JSON-friendly dictionary"""
        return {
            "t_end": self.t_end,
            "dt": self.dt,
            "gains": self.gains.asdict(),
            "v0": self.v0.tolist(),
            "q0": self.q0.tolist(),
            "R0": self.R0.tolist(),
            "xhat0": self.xhat0.tolist(),
            "z0": None if self.z0 is None else self.z0.tolist(),
            "profile": {"kind": self.profile.kind, "params": self.profile.resolved()},
            "noise": None if self.noise is None else self.noise.asdict(),
            "seed": self.seed,
            "frame": self.frame.tolist(),
        }


def transform_config(config: SimConfig, g: np.ndarray) -> SimConfig:
    """
    Apply the symmetry ``g`` to a whole scenario: initial conditions through
    phi and rho, inputs through psi
    """
    return dataclasses.replace(
        config,
        v0=g @ config.v0,
        R0=config.R0 @ g.T,
        xhat0=g @ config.xhat0,
        z0=None if config.z0 is None else g @ config.z0,
        frame=g @ config.frame,
    )


_XYZ = ("x", "y", "z")
_RIJ = tuple(f"{i}{j}" for i in range(1, 4) for j in range(1, 4))


@dataclasses.dataclass
class TrajectoryRecord:
    # pylint: disable=too-many-instance-attributes
    """
    Sampled trajectory, one row per integration step including t = 0

    The noisy fields hold what the observer consumed and are None for clean runs.
    """

    t: np.ndarray
    v: np.ndarray
    q: np.ndarray
    R: np.ndarray  # pylint: disable=invalid-name
    z: np.ndarray
    vhat: np.ndarray
    eta: np.ndarray
    y_q: Optional[np.ndarray] = None
    y_R: Optional[np.ndarray] = None  # pylint: disable=invalid-name
    u_omega: Optional[np.ndarray] = None
    u_a: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.t)

    @property
    def noisy(self) -> bool:
        """Whether the observer consumed corrupted signals"""
        return self.y_q is not None

    def to_dataframe(self) -> pd.DataFrame:
        """Tabulate the record with one column per scalar component"""
        columns: Dict[str, np.ndarray] = {"t": self.t}

        def add_vec(prefix, arr):
            for k, axis in enumerate(_XYZ):
                columns[f"{prefix}_{axis}"] = arr[:, k]

        def add_mat(prefix, arr):
            flat = arr.reshape(len(arr), 9)
            for k, ij in enumerate(_RIJ):
                columns[f"{prefix}_{ij}"] = flat[:, k]

        add_vec("v", self.v)
        add_vec("q", self.q)
        add_mat("R", self.R)
        add_vec("z", self.z)
        add_vec("vhat", self.vhat)
        add_vec("eta", self.eta)
        if self.noisy:
            add_vec("yq", self.y_q)
            add_mat("yR", self.y_R)
            add_vec("uomega", self.u_omega)
            add_vec("ua", self.u_a)
        return pd.DataFrame(columns)

    def to_csv(self, path) -> None:
        """Write the record as CSV with 17 significant digits"""
        self.to_dataframe().to_csv(path, index=False, float_format=FLOAT_FORMAT)


# ---------------------------------------------------------------------------
# Integration
# ---------------------------------------------------------------------------

Held = Tuple[MeasuredState, RigidBodyInput]


class CoupledSystem:
    """
    Plant and observer integrated together

    Parameters
    ----------
    gains :
        Observer gains; the gravity vector is shared with the plant
    """

    def __init__(self, gains: ObserverGains):
        self.gains = gains
        self.model = rb_system_model(gains)
        self.design = rb_observer_design(gains)
        self.group = so3_group()
        self._alpha = functools.partial(alpha, self.model, self.design, self.group)

    def derivative(
        self,
        t: float,
        v: np.ndarray,
        q: np.ndarray,
        rot: np.ndarray,
        z: np.ndarray,
        u: InputFn,
        held: Optional[Held],
    ):
        # pylint: disable=too-many-arguments
        """Time derivatives of (v, q, R, z)"""
        u_true = u(t, rot)
        y = MeasuredState(q, rot)
        vdot = f_rb(v, y, u_true, self.gains)
        ydot = h_rb(v, y, u_true)
        y_obs, u_obs = (y, u_true) if held is None else held
        zdot = self._alpha(z, y_obs, u_obs)
        return vdot, ydot.vec, ydot.rot, zdot

    def step(
        self,
        state: RigidBodyState,
        z: np.ndarray,
        u: InputFn,
        dt: float,
        *,
        t: float = 0.0,
        held: Optional[Held] = None,
    ) -> Tuple[RigidBodyState, np.ndarray]:
        # pylint: disable=too-many-locals
        """One classical Runge-Kutta step followed by projection of R onto SO(3)"""
        v, q, rot = state.v, state.q, state.R_IB
        half = 0.5 * dt
        k1 = self.derivative(t, v, q, rot, z, u, held)
        k2 = self.derivative(
            t + half,
            v + half * k1[0],
            q + half * k1[1],
            rot + half * k1[2],
            z + half * k1[3],
            u,
            held,
        )
        k3 = self.derivative(
            t + half,
            v + half * k2[0],
            q + half * k2[1],
            rot + half * k2[2],
            z + half * k2[3],
            u,
            held,
        )
        k4 = self.derivative(
            t + dt, v + dt * k3[0], q + dt * k3[1], rot + dt * k3[2], z + dt * k3[3], u, held
        )
        sixth = dt / 6.0
        increments = [
            sixth * (a + 2.0 * b + 2.0 * c + d) for a, b, c, d in zip(k1, k2, k3, k4)
        ]
        v_next = v + increments[0]
        q_next = q + increments[1]
        rot_next = rot + increments[2]
        z_next = z + increments[3]
        check_finite("state", v_next, q_next, rot_next, z_next)
        return RigidBodyState(v_next, q_next, project_to_so3(rot_next)), z_next


def _as_input_fn(u: Union[RigidBodyInput, InputFn]) -> InputFn:
    if isinstance(u, RigidBodyInput):
        return lambda t, rot: u
    return u


def step(
    state: RigidBodyState,
    z: np.ndarray,
    u: Union[RigidBodyInput, InputFn],
    gains: ObserverGains,
    dt: float,
    *,
    t: float = 0.0,
    held: Optional[Held] = None,
) -> Tuple[RigidBodyState, np.ndarray]:
    """
    Advance plant and observer by one step

    Parameters
    ----------
    state :
        Plant state
    z :
        Observer state
    u :
        Constant input, or a callable ``(t, R_IB) -> RigidBodyInput`` sampled at
        every stage time
    gains :
        Observer gains
    dt :
        Step size [s]
    t :
        Time at the start of the step
    held :
        Corrupted ``(y, u)`` the observer consumes for the whole step; None
        means the observer sees the true signals

    Returns
    -------
    state, z :
        Plant and observer state after the step
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    return CoupledSystem(gains).step(state, z, _as_input_fn(u), dt, t=t, held=held)


def scenario_input(config: SimConfig) -> InputFn:
    """Input of the (possibly transformed) scenario as a function of (t, R_IB)"""
    base_input = profile_function(config.profile.kind, config.profile.params, config.gains.gravity)
    frame = config.frame

    def u(t: float, rot: np.ndarray) -> RigidBodyInput:
        base = base_input(t, rot @ frame)
        return RigidBodyInput(frame @ base.omega, frame @ base.a)

    return u


def simulate(config: SimConfig) -> TrajectoryRecord:
    # pylint: disable=too-many-locals
    """
    Run plant and observer from the initial conditions of ``config``

    Parameters
    ----------
    config :
        Scenario

    Returns
    -------
    record :
        One row per step, ``round(t_end / dt) + 1`` rows in total
    """
    system = CoupledSystem(config.gains)
    u = scenario_input(config)
    rng = np.random.default_rng(config.seed)
    noise = config.noise
    steps_per_sample = config.steps_per_noise_sample()
    n = config.n_steps
    dt = config.dt

    t_rec = np.empty(n + 1)
    v_rec, q_rec, z_rec = np.empty((n + 1, 3)), np.empty((n + 1, 3)), np.empty((n + 1, 3))
    r_rec = np.empty((n + 1, 3, 3))
    vhat_rec, eta_rec = np.empty((n + 1, 3)), np.empty((n + 1, 3))
    noisy = None
    if noise is not None:
        noisy = {
            "y_q": np.empty((n + 1, 3)),
            "y_R": np.empty((n + 1, 3, 3)),
            "u_omega": np.empty((n + 1, 3)),
            "u_a": np.empty((n + 1, 3)),
        }

    state = RigidBodyState(config.v0, config.q0, config.R0)
    held: Optional[Held] = None
    if noise is not None:
        held = corrupt(state.y, u(0.0, state.R_IB), noise, rng)
    y_obs = state.y if held is None else held[0]
    if config.z0 is not None:
        z = config.z0.copy()
    else:
        z = config.xhat0 - beta(system.design, system.group, y_obs)

    logger.debug("simulating %d steps of %.3g s (noise %s)", n, dt, "on" if noise else "off")
    for k in range(n + 1):
        t = k * dt
        if noise is not None and k > 0 and k % steps_per_sample == 0:
            held = corrupt(state.y, u(t, state.R_IB), noise, rng)
        y_obs = state.y if held is None else held[0]

        t_rec[k] = t
        v_rec[k], q_rec[k], r_rec[k], z_rec[k] = state.v, state.q, state.R_IB, z
        vhat_rec[k] = estimate(system.design, system.group, z, y_obs)
        eta_rec[k] = invariant_error(system.design, system.group, z, state.v, y_obs).eta
        if noisy is not None:
            noisy["y_q"][k], noisy["y_R"][k] = held[0].vec, held[0].rot
            noisy["u_omega"][k], noisy["u_a"][k] = held[1].omega, held[1].a
        if k == n:
            break
        try:
            state, z = system.step(state, z, u, dt, t=t, held=held)
        except NonFinite as e:
            raise NonFinite(f"{e} at t = {t + dt:.6g} s") from e

    return TrajectoryRecord(
        t=t_rec,
        v=v_rec,
        q=q_rec,
        R=r_rec,
        z=z_rec,
        vhat=vhat_rec,
        eta=eta_rec,
        **(noisy or {}),
    )


def reference_orbit_config(**overrides) -> SimConfig:
    """
    Steady level turn centred on the origin, so that the position (and with it
    the noise amplification of ``ell(y) = L q``) stays bounded
    """
    turn_rate = overrides.pop("turn_rate", PROFILE_DEFAULTS["orbit"]["turn_rate"])
    speed = 20.0
    radius = speed / abs(turn_rate)
    base = SimConfig(
        v0=np.array([speed, 0.0, 0.0]),
        q0=np.array([0.0, -math.copysign(radius, turn_rate), 0.0]),
        profile=ProfileSpec("orbit", {"turn_rate": turn_rate, "v_ref": [speed, 0.0, 0.0]}),
    )
    return dataclasses.replace(base, **overrides)
