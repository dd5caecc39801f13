"""
Command-line front end: ``invobs simulate|verify|sweep``

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 failed verification.
"""
import argparse
import dataclasses
import json
import logging
import pathlib
import sys
from typing import Any, Dict, List, Optional, Sequence

from .config import RunConfig, apply_overrides, load_config
from .core import ConfigError, EmptyWindow, InvObsError, NonFinite
from .framework import summarize, write_reports_csv
from .metrics import metrics
from .plotting import plot_velocity
from .simulation import simulate
from .sweep import DEFAULT_GAIN_SCALES, DEFAULT_NOISE_SCALES, run_sweep, write_sweep_csv
from .util import parse_float_list
from .verify import run_checks

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4

TRAJECTORY_FILE = "trajectory.csv"
METRICS_FILE = "metrics.json"
PLOT_FILE = "velocity.svg"
VERIFY_FILE = "verification.csv"
SWEEP_FILE = "sweep.csv"
MANIFEST_FILE = "manifest.json"


@dataclasses.dataclass
class RunManifest:
    # pylint: disable=too-many-instance-attributes
    """Object describing one CLI run and the artifacts it produced"""

    command: str
    config_path: Optional[str]
    config: Dict[str, Any]
    out_dir: str
    seed: int
    artifacts: List[str]
    summary: Dict[str, Any]
    version: str

    def to_json(self) -> str:
        """Convert manifest into a JSON string"""
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)

    def write(self) -> pathlib.Path:
        """Write ``manifest.json`` into the output directory"""
        missing = [a for a in self.artifacts if not (pathlib.Path(self.out_dir) / a).is_file()]
        if missing:
            raise RuntimeError(f"Listed artifacts were not written: {missing}")
        path = pathlib.Path(self.out_dir) / MANIFEST_FILE
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        return path


def _version() -> str:
    from . import __version__  # pylint: disable=import-outside-toplevel

    return __version__


def _prepare(config_path: Optional[str], out_dir, overrides: Dict[str, Any]):
    config = apply_overrides(load_config(config_path), **overrides)
    out = pathlib.Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"Cannot create output directory {out}: {e}") from e
    return config, out


def _manifest(
    command: str, config: RunConfig, out: pathlib.Path, artifacts: List[str], summary
) -> RunManifest:
    return RunManifest(
        command=command,
        config_path=config.path,
        config=config.asdict(),
        out_dir=str(out),
        seed=config.sim.seed,
        artifacts=artifacts,
        summary=summary,
        version=_version(),
    )


def cmd_simulate(
    config_path: Optional[str], out_dir, overrides: Optional[Dict[str, Any]] = None
) -> int:
    """
    Simulate plant and observer; write the trajectory CSV, the metrics and the
    velocity plot

    Parameters
    ----------
    config_path :
        YAML configuration, None for the defaults
    out_dir :
        Output directory, created if needed
    overrides :
        Keyword arguments of :py:func:`invobs.config.apply_overrides`

    Returns
    -------
    exit_code :
        0, 2 or 3
    """
    try:
        config, out = _prepare(config_path, out_dir, overrides or {})
        record = simulate(config.sim)
        summary = metrics(record, window_start=config.window_start)
    except (ConfigError, EmptyWindow) as e:
        logger.error("%s", e)
        return EXIT_CONFIG
    except InvObsError as e:
        logger.error("Simulation failed: %s", e)
        return EXIT_NUMERIC

    record.to_csv(out / TRAJECTORY_FILE)
    (out / METRICS_FILE).write_text(summary.to_json() + "\n", encoding="utf-8")
    plot_velocity(
        record,
        out / PLOT_FILE,
        title=f"Velocity estimates ({'noisy' if record.noisy else 'clean'} measurements)",
    )
    _manifest(
        "simulate",
        config,
        out,
        [TRAJECTORY_FILE, METRICS_FILE, PLOT_FILE],
        {"passed": True, "metrics": summary.asdict()},
    ).write()
    if summary.decay_rate is not None:
        logger.info(
            "fitted decay rate %.4g 1/s, RMSE %.4g m/s", summary.decay_rate, summary.rmse_norm
        )
    return EXIT_OK


def cmd_verify(
    config_path: Optional[str],
    out_dir,
    overrides: Optional[Dict[str, Any]] = None,
    *,
    inject_bad_frame: bool = False,
) -> int:
    """
    Run the registered checks and write the verification report

    Returns
    -------
    exit_code :
        0 when every check passes, 4 otherwise (2 on configuration errors, 3 when
        a simulation leaves the finite range)
    """
    try:
        config, out = _prepare(config_path, out_dir, overrides or {})
    except ConfigError as e:
        logger.error("%s", e)
        return EXIT_CONFIG
    try:
        reports = run_checks(
            config.sim.gains,
            config.verify,
            scenario=config.sim,
            inject_bad_frame=inject_bad_frame,
        )
    except NonFinite as e:
        logger.error("Verification aborted: %s", e)
        return EXIT_NUMERIC
    except InvObsError as e:
        logger.error("Verification aborted: %s", e)
        return EXIT_VERIFY
    write_reports_csv(reports, out / VERIFY_FILE)
    failing = summarize(reports)
    _manifest(
        "verify",
        config,
        out,
        [VERIFY_FILE],
        {
            "passed": failing is None,
            "n_checks": len(reports),
            "first_failure": None if failing is None else failing.name,
        },
    ).write()
    if failing is not None:
        logger.error("Verification failed: %s", failing)
        return EXIT_VERIFY
    logger.info("all %d checks passed", len(reports))
    return EXIT_OK


def cmd_sweep(
    config_path: Optional[str],
    out_dir,
    gain_scales: Sequence[float] = DEFAULT_GAIN_SCALES,
    noise_scales: Sequence[float] = DEFAULT_NOISE_SCALES,
    overrides: Optional[Dict[str, Any]] = None,
    *,
    workers: Optional[int] = None,
) -> int:
    # pylint: disable=too-many-arguments
    """
    Run a grid of independent simulations and write the aggregate table

    Returns
    -------
    exit_code :
        0 when at least one grid point succeeds, 3 when none does, 2 on
        configuration errors
    """
    try:
        config, out = _prepare(config_path, out_dir, overrides or {})
    except ConfigError as e:
        logger.error("%s", e)
        return EXIT_CONFIG
    rows = run_sweep(
        config.sim,
        gain_scales,
        noise_scales,
        workers=workers,
        window_start=config.window_start,
    )
    write_sweep_csv(rows, out / SWEEP_FILE)
    n_ok = int((rows["status"] == "ok").sum())
    _manifest(
        "sweep",
        config,
        out,
        [SWEEP_FILE],
        {
            "passed": n_ok > 0,
            "n_points": len(rows),
            "n_ok": n_ok,
            "gain_scales": [float(k) for k in gain_scales],
            "noise_scales": [float(m) for m in noise_scales],
        },
    ).write()
    if n_ok == 0:
        logger.error("No sweep point succeeded")
        return EXIT_NUMERIC
    return EXIT_OK


def _float_list(text: str) -> List[float]:
    try:
        return parse_float_list(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def build_parser() -> argparse.ArgumentParser:
    """Argument parser of the ``invobs`` command"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="YAML configuration file")
    common.add_argument("--out", type=str, default="out", help="Output directory")
    common.add_argument("--seed", type=int, default=None, help="Master random seed")
    common.add_argument("--noise", type=str, choices=["off", "paper", "custom"], default=None)
    common.add_argument("--dt", type=float, default=None, help="Integration step [s]")
    common.add_argument("--t-end", type=float, default=None, help="Final time [s]")
    common.add_argument(
        "--profile",
        type=str,
        choices=["level", "sinusoid", "doublet", "orbit"],
        default=None,
    )
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")

    parser = argparse.ArgumentParser(
        prog="invobs", description="Symmetry-preserving reduced-order velocity observer"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("simulate", parents=[common], help="Simulate plant and observer")
    verify = subparsers.add_parser("verify", parents=[common], help="Run the verification suite")
    verify.add_argument(
        "--inject-bad-frame",
        action="store_true",
        help="Replace the moving frame by the identity (negative control)",
    )
    sweep = subparsers.add_parser("sweep", parents=[common], help="Sweep gain and noise scales")
    sweep.add_argument(
        "--gain-scales",
        type=_float_list,
        default=list(DEFAULT_GAIN_SCALES),
        help="Comma-separated k values of L = k I",
    )
    sweep.add_argument(
        "--noise-scales",
        type=_float_list,
        default=list(DEFAULT_NOISE_SCALES),
        help="Comma-separated noise PSD multipliers",
    )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the ``invobs`` command"""
    args = build_parser().parse_args(argv)
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    overrides = {
        "seed": args.seed,
        "noise": args.noise,
        "dt": args.dt,
        "t_end": args.t_end,
        "profile": args.profile,
    }
    if args.command == "simulate":
        return cmd_simulate(args.config, args.out, overrides)
    if args.command == "verify":
        return cmd_verify(
            args.config, args.out, overrides, inject_bad_frame=args.inject_bad_frame
        )
    return cmd_sweep(args.config, args.out, args.gain_scales, args.noise_scales, overrides)


if __name__ == "__main__":
    sys.exit(main())
