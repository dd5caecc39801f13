"""invobs module"""
import pathlib

from packaging.version import Version

from . import framework, lie, rigid_body, simulation
from .core import InvObsError
from .framework import MeasuredState, MeasuredTangent
from .noise import NoiseSpec
from .rigid_body import ObserverGains, RigidBodyInput, RigidBodyState
from .simulation import SimConfig, TrajectoryRecord, simulate

VERSION_FILE = pathlib.Path(__file__).parent / "VERSION"
with open(VERSION_FILE, "r", encoding="UTF-8") as _f:
    __version__ = str(Version(_f.read().strip()))

__all__ = [
    "InvObsError",
    "MeasuredState",
    "MeasuredTangent",
    "NoiseSpec",
    "ObserverGains",
    "RigidBodyInput",
    "RigidBodyState",
    "SimConfig",
    "TrajectoryRecord",
    "framework",
    "lie",
    "rigid_body",
    "simulate",
    "simulation",
    "__version__",
]
