"""
Miscellaneous utilities
"""
import numpy as np

# Floats are written with 17 significant digits so CSV artifacts round-trip exactly.
FLOAT_FORMAT = "%.17g"
MAX_SEED = 2**64 - 1


def as_vec3(values, *, name: str = "vector") -> np.ndarray:
    """Convert a sequence into a float64 3-vector"""
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != (3,):
        raise ValueError(f"{name} must have shape (3,), got {arr.shape}")
    return arr


def as_mat3(values, *, name: str = "matrix") -> np.ndarray:
    """Convert a nested sequence (or a scalar multiple of I) into a 3x3 float64 matrix"""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 0:
        return float(arr) * np.eye(3)
    if arr.shape == (9,):
        return arr.reshape(3, 3)
    if arr.shape != (3, 3):
        raise ValueError(f"{name} must have shape (3, 3), got {arr.shape}")
    return arr


def check_seed(seed, *, name: str = "seed") -> int:
    """Validate a seed as accepted by numpy.random.default_rng: an integer in [0, 2**64)"""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ValueError(f"{name} must be an integer, got {seed!r}")
    if not 0 <= int(seed) <= MAX_SEED:
        raise ValueError(f"{name} must be in [0, 2**64 - 1], got {seed}")
    return int(seed)


def derive_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    """Independent RNG stream for run ``index`` under ``master_seed``"""
    return np.random.SeedSequence([int(master_seed), int(index)])


def parse_float_list(text: str) -> list:
    """Parse a comma-separated list of floats, as given on the command line"""
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise ValueError("Expected a comma-separated list of numbers")
    return [float(s) for s in items]
