"""
Static plot artifacts
"""
import logging

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # pylint: disable=wrong-import-position

from .simulation import TrajectoryRecord  # pylint: disable=wrong-import-position

logger = logging.getLogger(__name__)

_AXES = ("x", "y", "z")


def plot_velocity(record: TrajectoryRecord, path, *, title: str = "") -> None:
    """
    Plot the body velocity components against time, truth and estimate

    The SVG carries no date and uses a fixed hash salt, so identical records
    produce identical files.

    Parameters
    ----------
    record :
        Simulated trajectory
    path :
        Output file (SVG)
    title :
        Figure title
    """
    with matplotlib.rc_context({"svg.hashsalt": "invobs", "svg.fonttype": "path"}):
        fig, axes = plt.subplots(3, 1, sharex=True, figsize=(7.0, 6.0))
        for k, ax in enumerate(axes):
            ax.plot(record.t, record.v[:, k], color="k", label="true")
            ax.plot(record.t, record.vhat[:, k], color="tab:red", linestyle="--", label="estimate")
            ax.set_ylabel(f"$v_{_AXES[k]}$ [m/s]")
            ax.grid(True, alpha=0.3)
        axes[0].legend(loc="upper right")
        axes[-1].set_xlabel("t [s]")
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    logger.debug("wrote %s", path)
