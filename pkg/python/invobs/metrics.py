"""
Summary statistics of a simulated trajectory
"""
import dataclasses
import json
import logging
from typing import Any, Dict, Optional

import numpy as np
import scipy.stats

from .core import EmptyWindow
from .simulation import TrajectoryRecord

logger = logging.getLogger(__name__)

DEFAULT_TRANSIENT = 1.0  # s
# Relative floor below which ||eta|| is dominated by integration error; with
# dt = 1e-3 the clean error stalls near 1e-10 ||eta(0)||
RELATIVE_FLOOR = 1e-7
MIN_FIT_POINTS = 3


@dataclasses.dataclass
class MetricsSummary:
    # pylint: disable=too-many-instance-attributes
    """Object holding trajectory metrics"""

    window_start: float
    window_end: float
    n_window: int
    # Per-axis RMSE of vhat - v over the window [m/s]
    rmse: np.ndarray
    rmse_norm: float
    # Fitted exponential decay rate of ||eta|| [1/s]; None when not estimable
    decay_rate: Optional[float]
    decay_rate_stderr: Optional[float]
    decay_fit_end: Optional[float]
    max_eta_after_transient: float
    # Linear-fit slope of ||vhat - v|| over the window [m/s^2]
    error_slope: Optional[float]
    error_slope_stderr: Optional[float]

    def asdict(self) -> Dict[str, Any]:
        """Convert to a JSON-friendly dictionary"""
        out = dataclasses.asdict(self)
        out["rmse"] = self.rmse.tolist()
        return out

    def to_json(self) -> str:
        """Convert metrics into a JSON string"""
        return json.dumps(self.asdict(), indent=2)

    @property
    def finite(self) -> bool:
        """Whether every reported number is finite"""
        values = [*self.rmse, self.rmse_norm, self.max_eta_after_transient]
        values += [
            x
            for x in (self.decay_rate, self.error_slope)
            if x is not None
        ]
        return bool(np.all(np.isfinite(values)))


def fit_decay_rate(t: np.ndarray, eta_norm: np.ndarray):
    """
    Least-squares fit of ``log ||eta||`` against time over the leading part of
    the record that lies above the noise floor

    The floor is the larger of ``RELATIVE_FLOOR * ||eta(0)||`` and three times
    the median of ``||eta||`` over the final fifth of the record.

    Returns
    -------
    rate, stderr, t_end :
        Decay rate [1/s], its standard error and the last fitted time; all None
        when fewer than ``MIN_FIT_POINTS`` samples lie above the floor
    """
    if len(t) == 0 or eta_norm[0] <= 0.0:
        return None, None, None
    tail = eta_norm[int(0.8 * len(eta_norm)):]
    floor = max(RELATIVE_FLOOR * eta_norm[0], 3.0 * float(np.median(tail)))
    below = np.flatnonzero(eta_norm <= floor)
    n_fit = int(below[0]) if below.size else len(eta_norm)
    if n_fit < MIN_FIT_POINTS:
        logger.warning(
            "Decay rate not estimable: only %d samples above the floor %.3g", n_fit, floor
        )
        return None, None, None
    fit = scipy.stats.linregress(t[:n_fit], np.log(eta_norm[:n_fit]))
    return -float(fit.slope), float(fit.stderr), float(t[n_fit - 1])


def metrics(
    record: TrajectoryRecord,
    *,
    window_start: Optional[float] = None,
    window_end: Optional[float] = None,
) -> MetricsSummary:
    """
    Compute the metrics of a trajectory

    Parameters
    ----------
    record :
        Simulated trajectory
    window_start :
        Start of the RMSE/trend window [s]. Defaults to the transient length,
        ``min(1 s, t_end / 2)``
    window_end :
        End of the window [s], defaults to the end of the record

    Returns
    -------
    summary :
        :py:class:`MetricsSummary`
    """
    if len(record) == 0:
        raise EmptyWindow("Trajectory record is empty")
    t = record.t
    if window_start is None:
        window_start = min(DEFAULT_TRANSIENT, 0.5 * float(t[-1]))
    if window_end is None:
        window_end = float(t[-1])
    mask = (t >= window_start) & (t <= window_end)
    n_window = int(np.count_nonzero(mask))
    if n_window == 0:
        raise EmptyWindow(
            f"No samples in window [{window_start}, {window_end}] s "
            f"(record covers [{t[0]}, {t[-1]}] s)"
        )

    err = record.vhat[mask] - record.v[mask]
    rmse = np.sqrt(np.mean(err**2, axis=0))
    err_norm = np.linalg.norm(err, axis=1)
    eta_norm = np.linalg.norm(record.eta, axis=1)

    decay_rate, decay_stderr, fit_end = fit_decay_rate(t, eta_norm)

    error_slope = error_slope_stderr = None
    if n_window >= 3:
        trend = scipy.stats.linregress(t[mask], err_norm)
        error_slope, error_slope_stderr = float(trend.slope), float(trend.stderr)

    return MetricsSummary(
        window_start=float(window_start),
        window_end=float(window_end),
        n_window=n_window,
        rmse=rmse,
        rmse_norm=float(np.sqrt(np.mean(err_norm**2))),
        decay_rate=decay_rate,
        decay_rate_stderr=decay_stderr,
        decay_fit_end=fit_end,
        max_eta_after_transient=float(np.max(eta_norm[t >= window_start], initial=0.0)),
        error_slope=error_slope,
        error_slope_stderr=error_slope_stderr,
    )
