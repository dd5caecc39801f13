"""Error types and finiteness checks shared by every invobs module"""
import logging

import numpy as np

logger = logging.getLogger(__name__)


class InvObsError(Exception):
    """Error thrown by invobs"""


class NotSkew(InvObsError):
    """Matrix handed to vee() is not skew-symmetric"""


class Degenerate(InvObsError):
    """Matrix cannot be projected onto SO(3)"""


class FrameUndefined(InvObsError):
    """Moving frame could not be evaluated at the given measured state"""


class NonFinite(InvObsError):
    """A state component left the finite range"""


class UnknownProfile(InvObsError):
    """Requested input profile is not registered"""


class EmptyWindow(InvObsError):
    """Metrics window contains no samples"""


class NotHurwitz(InvObsError):
    """Observer gain fails the stability gate: -L must be Hurwitz"""


class ConfigError(InvObsError):
    """Configuration file could not be read or validated"""


def check_finite(name: str, *arrays) -> None:
    """Check that every array is finite

    This function will raise exception when a NaN or infinity is found.
    Wrap every state update with this function.

    Parameters
    ----------
    name :
        Name of the quantity, used in the error message
    arrays :
        Arrays (or scalars) to check
    """
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            logger.debug("non-finite value in %s: %r", name, arr)
            raise NonFinite(f"{name} contains non-finite values")
