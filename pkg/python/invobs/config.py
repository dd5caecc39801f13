"""
YAML run configuration

The file has up to six sections, every key optional::

    plant:    {v0, q0, R0, gravity}
    observer: {L, xhat0, z0}
    sim:      {t_end, dt, seed, window_start, frame}
    noise:    {mode: off|paper|custom, psd_q, psd_R, psd_omega, psd_a, sample_rate}
    profile:  {kind, params: {...}}
    verify:   {n_samples, n_error_rhs, n_transforms, seed, tolerances: {...}}

An empty (or absent) file reproduces the reference flight-test scenario.
"""
import dataclasses
import json
import logging
import os
from typing import Any, Dict, Mapping, Optional

import numpy as np
import yaml

from .core import ConfigError, InvObsError
from .framework import Tolerances
from .noise import NoiseSpec
from .rigid_body import GRAVITY_NED, ObserverGains
from .simulation import ProfileSpec, SimConfig
from .util import check_seed

logger = logging.getLogger(__name__)

NOISE_MODES = ("off", "paper", "custom")

_SECTIONS = {
    "plant": {"v0", "q0", "R0", "gravity"},
    "observer": {"L", "xhat0", "z0"},
    "sim": {"t_end", "dt", "seed", "window_start", "frame"},
    "noise": {"mode", "psd_q", "psd_R", "psd_omega", "psd_a", "sample_rate"},
    "profile": {"kind", "params"},
    "verify": {"n_samples", "n_error_rhs", "n_transforms", "seed", "tolerances"},
}


@dataclasses.dataclass(frozen=True)
class VerifyConfig:
    """Sample counts and tolerances of the verification suite"""

    n_samples: int = 1000
    n_error_rhs: int = 500
    n_transforms: int = 10
    seed: int = 0
    tolerances: Tolerances = dataclasses.field(default_factory=Tolerances)

    def __post_init__(self):
        for name in ("n_samples", "n_error_rhs", "n_transforms"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        object.__setattr__(self, "seed", check_seed(self.seed))

    def asdict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Object holding a fully resolved run configuration"""

    sim: SimConfig = dataclasses.field(default_factory=SimConfig)
    noise_mode: str = "off"
    window_start: Optional[float] = None
    verify: VerifyConfig = dataclasses.field(default_factory=VerifyConfig)
    path: Optional[str] = None

    def asdict(self) -> Dict[str, Any]:
        """Convert to a JSON-friendly dictionary"""
        return {
            "sim": self.sim.asdict(),
            "noise_mode": self.noise_mode,
            "window_start": self.window_start,
            "verify": self.verify.asdict(),
        }

    def to_json(self) -> str:
        """Convert configuration object into a JSON string"""
        return json.dumps(self.asdict(), sort_keys=True)


def _section(raw: Mapping[str, Any], name: str) -> Dict[str, Any]:
    section = raw.get(name) or {}
    if not isinstance(section, dict):
        raise ConfigError(f"Section '{name}' must be a mapping, got {type(section).__name__}")
    unknown = set(section) - _SECTIONS[name]
    if unknown:
        raise ConfigError(f"Unknown key(s) in section '{name}': {sorted(unknown)}")
    return section


def _array(section: Mapping[str, Any], key: str, shape, default):
    if key not in section or section[key] is None:
        return default
    try:
        value = np.asarray(section[key], dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Key '{key}' must be numeric: {e}") from e
    if shape == (3, 3) and value.ndim == 0:
        value = float(value) * np.eye(3)
    elif shape == (3, 3) and value.shape == (9,):
        value = value.reshape(3, 3)
    if value.shape != shape:
        raise ConfigError(f"Key '{key}' must have shape {shape}, got {value.shape}")
    if not np.all(np.isfinite(value)):
        raise ConfigError(f"Key '{key}' has non-finite entries")
    return value


def _number(section: Mapping[str, Any], key: str, default, kind=float):
    if key not in section or section[key] is None:
        return default
    value = section[key]
    if isinstance(value, str):
        # YAML 1.1 reads exponent literals without a dot (1e-3) as strings
        try:
            value = float(value)
        except ValueError:
            pass
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"Key '{key}' must be a number, got {value!r}")
    if kind is int:
        # Exact for ints beyond 2**53, such as 64-bit seeds
        if isinstance(value, int):
            return value
        if not value.is_integer():
            raise ConfigError(f"Key '{key}' must be an integer, got {value!r}")
    return kind(value)


def _noise(section: Mapping[str, Any], mode: str) -> Optional[NoiseSpec]:
    if mode not in NOISE_MODES:
        raise ConfigError(f"noise mode must be one of {NOISE_MODES}, got {mode!r}")
    if mode == "off":
        return None
    if mode == "paper":
        return NoiseSpec.paper()
    fields = {
        key: _number(section, key, getattr(NoiseSpec, key))
        for key in ("psd_q", "psd_R", "psd_omega", "psd_a", "sample_rate")
    }
    return NoiseSpec(**fields)


def parse_config(raw: Optional[Mapping[str, Any]], path: Optional[str] = None) -> RunConfig:
    # pylint: disable=too-many-locals
    """
    Build a :py:class:`RunConfig` from the parsed YAML document

    Parameters
    ----------
    raw :
        Parsed document; None or empty gives the defaults
    path :
        Origin of the document, recorded for the run manifest

    Returns
    -------
    config :
        Resolved configuration
    """
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigError("Top level of the config file must be a mapping")
    unknown = set(raw) - set(_SECTIONS)
    if unknown:
        raise ConfigError(
            f"Unknown section(s) {sorted(unknown)}; expected {sorted(_SECTIONS)}"
        )
    plant, observer, sim = _section(raw, "plant"), _section(raw, "observer"), _section(raw, "sim")
    noise, profile = _section(raw, "noise"), _section(raw, "profile")
    verify = _section(raw, "verify")

    defaults = SimConfig()
    try:
        gains = ObserverGains(
            L=_array(observer, "L", (3, 3), 10.0 * np.eye(3)),
            gravity=_array(plant, "gravity", (3,), GRAVITY_NED.copy()),
        )
        params = profile.get("params") or {}
        if not isinstance(params, dict):
            raise ConfigError("profile.params must be a mapping")
        noise_mode = str(noise.get("mode", "off"))
        z0 = _array(observer, "z0", (3,), None)
        sim_config = SimConfig(
            t_end=_number(sim, "t_end", defaults.t_end),
            dt=_number(sim, "dt", defaults.dt),
            gains=gains,
            v0=_array(plant, "v0", (3,), defaults.v0),
            q0=_array(plant, "q0", (3,), defaults.q0),
            R0=_array(plant, "R0", (3, 3), defaults.R0),
            xhat0=_array(observer, "xhat0", (3,), defaults.xhat0),
            z0=z0,
            profile=ProfileSpec(str(profile.get("kind", defaults.profile.kind)), params),
            noise=_noise(noise, noise_mode),
            seed=_number(sim, "seed", defaults.seed, int),
            frame=_array(sim, "frame", (3, 3), defaults.frame),
        )
        tolerances = verify.get("tolerances") or {}
        unknown_tol = set(tolerances) - set(Tolerances().asdict())
        if unknown_tol:
            raise ConfigError(f"Unknown tolerance(s): {sorted(unknown_tol)}")
        verify_config = VerifyConfig(
            n_samples=_number(verify, "n_samples", 1000, int),
            n_error_rhs=_number(verify, "n_error_rhs", 500, int),
            n_transforms=_number(verify, "n_transforms", 10, int),
            seed=_number(verify, "seed", 0, int),
            tolerances=Tolerances(**{k: float(v) for k, v in tolerances.items()}),
        )
    except ConfigError:
        raise
    except (InvObsError, ValueError, TypeError) as e:
        raise ConfigError(f"Invalid configuration: {e}") from e

    if z0 is not None and "xhat0" in observer:
        logger.warning("Both observer.z0 and observer.xhat0 given; z0 takes precedence")
    return RunConfig(
        sim=sim_config,
        noise_mode=noise_mode,
        window_start=_number(sim, "window_start", None),
        verify=verify_config,
        path=path,
    )


def load_config(path: Optional[str]) -> RunConfig:
    """
    Load a YAML configuration file

    Parameters
    ----------
    path :
        Path to the file; None gives the defaults

    Returns
    -------
    config :
        Resolved configuration
    """
    if path is None:
        return parse_config(None)
    if not os.path.isfile(path):
        raise ConfigError(f"Config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Failed to parse {path}: {e}") from e
    except OSError as e:
        raise ConfigError(f"Failed to read {path}: {e}") from e
    logger.debug("loaded configuration from %s", path)
    return parse_config(raw, path=path)


def apply_overrides(
    config: RunConfig,
    *,
    seed: Optional[int] = None,
    noise: Optional[str] = None,
    dt: Optional[float] = None,
    t_end: Optional[float] = None,
    profile: Optional[str] = None,
) -> RunConfig:
    # pylint: disable=too-many-arguments
    """
    Apply command-line overrides on top of a loaded configuration

    ``noise="custom"`` keeps the PSDs of the file (reference values when the file
    has none); ``profile`` switches the kind and resets its parameters.
    """
    changes: Dict[str, Any] = {}
    if seed is not None:
        try:
            changes["seed"] = check_seed(seed, name="--seed")
        except ValueError as e:
            raise ConfigError(str(e)) from e
    if dt is not None:
        changes["dt"] = dt
    if t_end is not None:
        changes["t_end"] = t_end
    if profile is not None and profile != config.sim.profile.kind:
        changes["profile"] = ProfileSpec(profile)
    noise_mode = config.noise_mode
    if noise is not None:
        if noise not in NOISE_MODES:
            raise ConfigError(f"--noise must be one of {NOISE_MODES}, got {noise!r}")
        noise_mode = noise
        if noise == "custom":
            changes["noise"] = config.sim.noise or NoiseSpec.paper()
        else:
            changes["noise"] = _noise({}, noise)
    try:
        sim = dataclasses.replace(config.sim, **changes)
    except (InvObsError, ValueError) as e:
        raise ConfigError(f"Invalid override: {e}") from e
    return dataclasses.replace(config, sim=sim, noise_mode=noise_mode)
