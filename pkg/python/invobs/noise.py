"""
Band-limited approximation of continuous-time white measurement noise

Each channel is corrupted with zero-mean Gaussian samples whose variance is
``PSD * sample_rate`` per axis, held constant over one sample interval::

    y_q = q + w_q          u_omega = omega + w_omega
    y_R = R exp(w_R)       u_a     = a + w_a
"""
from __future__ import annotations

import dataclasses
from typing import Dict, Optional, Tuple

import numpy as np

from .framework import MeasuredState
from .lie import exp_so3
from .rigid_body import RigidBodyInput

# Power spectral densities of the reference flight test, per axis
REFERENCE_PSD_Q = 5e-4  # m^2/Hz
REFERENCE_PSD_R = 1e-7  # 1/Hz
REFERENCE_PSD_OMEGA = 1e-5  # (rad/s)^2/Hz
REFERENCE_PSD_A = 2e-2  # (m/s^2)^2/Hz
REFERENCE_SAMPLE_RATE = 1000.0  # Hz


@dataclasses.dataclass(frozen=True)
class NoiseSpec:
    """
    Noise intensities of the four corrupted channels

    Parameters
    ----------
    psd_q :
        Position noise PSD [m^2/Hz]
    psd_R :
        Attitude noise PSD [1/Hz]
    psd_omega :
        Angular velocity noise PSD [(rad/s)^2/Hz]
    psd_a :
        Specific force noise PSD [(m/s^2)^2/Hz]
    sample_rate :
        Noise sampling rate [Hz]
    """

    psd_q: float = REFERENCE_PSD_Q
    psd_R: float = REFERENCE_PSD_R  # pylint: disable=invalid-name
    psd_omega: float = REFERENCE_PSD_OMEGA
    psd_a: float = REFERENCE_PSD_A
    sample_rate: float = REFERENCE_SAMPLE_RATE

    def __post_init__(self):
        for name in ("psd_q", "psd_R", "psd_omega", "psd_a"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0.0:
                raise ValueError(f"{name} must be a non-negative number, got {value}")
        if not np.isfinite(self.sample_rate) or self.sample_rate <= 0.0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")

    @classmethod
    def paper(cls) -> NoiseSpec:
        """Reference flight-test intensities at 1000 Hz, selected by noise mode ``paper``"""
        return cls()

    @classmethod
    def off(cls, sample_rate: float = REFERENCE_SAMPLE_RATE) -> NoiseSpec:
        """All intensities zero"""
        return cls(0.0, 0.0, 0.0, 0.0, sample_rate)

    @property
    def interval(self) -> float:
        """Time between noise samples [s]"""
        return 1.0 / self.sample_rate

    def scaled(self, factor: float) -> NoiseSpec:
        """Copy with every PSD multiplied by ``factor``"""
        return dataclasses.replace(
            self,
            psd_q=self.psd_q * factor,
            psd_R=self.psd_R * factor,
            psd_omega=self.psd_omega * factor,
            psd_a=self.psd_a * factor,
        )

    def sigmas(self) -> np.ndarray:
        """Per-axis standard deviations ``sqrt(PSD * rate)`` of the (q, R, omega, a) channels"""
        return np.sqrt(
            np.array([self.psd_q, self.psd_R, self.psd_omega, self.psd_a]) * self.sample_rate
        )

    def asdict(self) -> Dict[str, float]:
        """Convert to dictionary"""
        return dataclasses.asdict(self)


def sample_noise(
    noise: NoiseSpec, rng: np.random.Generator, n: Optional[int] = None
) -> np.ndarray:
    """
    Draw noise samples, shape ``(4, 3)`` or ``(n, 4, 3)`` with the channels
    ordered (q, R, omega, a)
    """
    shape = (4, 3) if n is None else (n, 4, 3)
    return rng.standard_normal(shape) * noise.sigmas()[:, None]


def corrupt(
    y: MeasuredState,
    u: RigidBodyInput,
    noise: NoiseSpec,
    rng: np.random.Generator,
) -> Tuple[MeasuredState, RigidBodyInput]:
    """
    Draw one noise sample and apply it to the measured state and the input

    Samples come from :py:func:`sample_noise`, so a given Generator state always
    produces the same corruption.

    Parameters
    ----------
    y :
        True measured state
    u :
        True input
    noise :
        Noise intensities
    rng :
        Random number generator

    Returns
    -------
    y_meas, u_meas :
        Corrupted measured state and input
    """
    w_q, w_r, w_omega, w_a = sample_noise(noise, rng)
    y_meas = MeasuredState(y.vec + w_q, y.rot @ exp_so3(w_r))
    u_meas = RigidBodyInput(u.omega + w_omega, u.a + w_a)
    return y_meas, u_meas
