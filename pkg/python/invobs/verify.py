"""
Verification suite of the rigid-body observer

Each registered check draws its own samples from a stream derived from the
suite seed and the check's position in the registry, so a single check can be
re-run in isolation with identical samples.
"""
import dataclasses
import logging
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from .config import VerifyConfig
from .framework import (
    CheckReport,
    ObserverDesign,
    SystemModel,
    Tolerances,
    TransformationGroup,
    alpha,
    check_beta_commutation,
    check_error_invariance,
    check_estimate_invariance,
    check_frame_equivariance,
    check_lambda_identity,
    check_system_invariance,
    check_zero_error_invariance,
    invariant_error_rhs,
    make_report,
    normalize,
)
from .rigid_body import (
    ObserverGains,
    Sampler,
    rb_alpha_closed_form,
    rb_error_rhs,
    rb_observer_design,
    rb_system_model,
    so3_group,
)
from .simulation import SimConfig, simulate, transform_config
from .util import derive_seed

logger = logging.getLogger(__name__)


@dataclasses.dataclass
class VerifyContext:
    """Objects shared by the checks"""

    gains: ObserverGains
    design: ObserverDesign
    settings: VerifyConfig
    scenario: SimConfig
    model: SystemModel = dataclasses.field(init=False)
    group: TransformationGroup = dataclasses.field(init=False)

    def __post_init__(self):
        self.model = rb_system_model(self.gains)
        self.group = so3_group()

    @property
    def tolerances(self) -> Tolerances:
        """Pass thresholds"""
        return self.settings.tolerances


CheckFn = Callable[[VerifyContext, Sampler], CheckReport]


def _frame_equivariance(ctx: VerifyContext, sampler: Sampler) -> CheckReport:
    return check_frame_equivariance(
        ctx.design,
        ctx.group,
        sampler.frame(ctx.settings.n_samples),
        tolerance=ctx.tolerances.frame_equivariance,
    )


def _system_invariance(ctx: VerifyContext, sampler: Sampler) -> CheckReport:
    return check_system_invariance(
        ctx.model,
        ctx.group,
        sampler.system(ctx.settings.n_samples),
        tolerance=ctx.tolerances.system_invariance,
    )


def _beta_reports(ctx: VerifyContext, sampler: Sampler) -> Tuple[CheckReport, CheckReport]:
    return check_beta_commutation(
        ctx.design,
        ctx.group,
        sampler.beta(ctx.settings.n_samples),
        tolerance=ctx.tolerances.beta_commutation,
        tangent_tolerance=ctx.tolerances.beta_tangent_commutation,
    )


def _beta_commutation(ctx: VerifyContext, sampler: Sampler) -> CheckReport:
    return _beta_reports(ctx, sampler)[0]


def _beta_tangent_commutation(ctx: VerifyContext, sampler: Sampler) -> CheckReport:
    return _beta_reports(ctx, sampler)[1]


def _lambda_identity(ctx: VerifyContext, sampler: Sampler) -> CheckReport:
    return check_lambda_identity(
        ctx.design,
        ctx.group,
        ctx.model,
        sampler.lam(ctx.settings.n_samples),
        tolerance=ctx.tolerances.lambda_identity,
    )


def _estimate_invariance(ctx: VerifyContext, sampler: Sampler) -> CheckReport:
    return check_estimate_invariance(
        ctx.model,
        ctx.design,
        ctx.group,
        sampler.estimate(ctx.settings.n_samples),
        tolerance=ctx.tolerances.estimate_invariance,
    )


def _error_invariance(ctx: VerifyContext, sampler: Sampler) -> CheckReport:
    return check_error_invariance(
        ctx.design,
        ctx.group,
        sampler.error(ctx.settings.n_samples),
        tolerance=ctx.tolerances.error_invariance,
    )


def _zero_error_manifold(ctx: VerifyContext, sampler: Sampler) -> CheckReport:
    return check_zero_error_invariance(
        ctx.model,
        ctx.design,
        ctx.group,
        sampler.trajectory_point(ctx.settings.n_samples),
        tolerance=ctx.tolerances.zero_error_manifold,
    )


def _alpha_closed_form(ctx: VerifyContext, sampler: Sampler) -> CheckReport:
    residuals = []
    for z, y, u in sampler.trajectory_point(ctx.settings.n_samples):
        generic = alpha(ctx.model, ctx.design, ctx.group, z, y, u)
        closed = rb_alpha_closed_form(z, y, u, ctx.gains)
        residuals.append(np.linalg.norm(generic - closed))
    return make_report("alpha_closed_form", residuals, ctx.tolerances.alpha_closed_form)


def _error_rhs_closed_form(ctx: VerifyContext, sampler: Sampler) -> CheckReport:
    fd_design = ctx.design.without_analytic_tangents()
    residuals = []
    for eta, x, y, u in sampler.error_system(ctx.settings.n_error_rhs):
        big_x, big_y, big_u = normalize(ctx.design, ctx.group, x, y, u)
        generic = invariant_error_rhs(
            ctx.model, fd_design, ctx.group, eta, big_x, big_y, big_u
        )
        residuals.append(np.linalg.norm(generic - rb_error_rhs(eta, ctx.gains)))
    return make_report(
        "error_rhs_closed_form", residuals, ctx.tolerances.error_rhs_closed_form
    )


# Horizon of the end-to-end equivariance runs [s]
TRAJECTORY_HORIZON = 1.0


def trajectory_equivariance_residuals(
    config: SimConfig, rotations: Iterable[np.ndarray]
) -> List[float]:
    """
    Largest deviation ``max |vhat' - R_g vhat|`` between the estimates of each
    transformed scenario and the rotated estimates of the original

    Parameters
    ----------
    config :
        Clean scenario
    rotations :
        Group elements applied to the whole scenario

    Returns
    -------
    residuals :
        One value per rotation
    """
    if config.noise is not None:
        raise ValueError("Trajectory equivariance is only defined for clean scenarios")
    base = simulate(config)
    residuals = []
    for g in rotations:
        moved = simulate(transform_config(config, g))
        residuals.append(float(np.max(np.abs(moved.vhat - base.vhat @ g.T))))
    return residuals


def _trajectory_equivariance(ctx: VerifyContext, sampler: Sampler) -> CheckReport:
    scenario = ctx.scenario
    horizon = max(scenario.dt, min(scenario.t_end, TRAJECTORY_HORIZON))
    clean = dataclasses.replace(scenario, gains=ctx.gains, noise=None, t_end=horizon)
    residuals = trajectory_equivariance_residuals(
        clean, sampler.group(ctx.settings.n_transforms)
    )
    return make_report(
        "trajectory_equivariance", residuals, ctx.tolerances.trajectory_equivariance
    )


CHECKS: Dict[str, CheckFn] = {
    "frame_equivariance": _frame_equivariance,
    "system_invariance": _system_invariance,
    "beta_commutation": _beta_commutation,
    "beta_tangent_commutation": _beta_tangent_commutation,
    "lambda_identity": _lambda_identity,
    "estimate_invariance": _estimate_invariance,
    "error_invariance": _error_invariance,
    "zero_error_manifold": _zero_error_manifold,
    "alpha_closed_form": _alpha_closed_form,
    "error_rhs_closed_form": _error_rhs_closed_form,
    "trajectory_equivariance": _trajectory_equivariance,
}


def bad_frame_design(gains: ObserverGains) -> ObserverDesign:
    """Observer with a constant (non-equivariant) moving frame, for negative tests"""
    gain = gains.L
    return ObserverDesign(gamma=lambda y: np.eye(3), ell=lambda y: gain @ y.vec)


def run_checks(
    gains: ObserverGains,
    settings: Optional[VerifyConfig] = None,
    *,
    scenario: Optional[SimConfig] = None,
    names: Optional[List[str]] = None,
    inject_bad_frame: bool = False,
) -> List[CheckReport]:
    """
    Run the registered checks

    Parameters
    ----------
    gains :
        Observer gains of the instance under test
    settings :
        Sample counts, seed and tolerances
    scenario :
        Scenario of the end-to-end equivariance check; the reference flight
        test by default. It is run clean and cut to ``TRAJECTORY_HORIZON``.
    names :
        Subset of :py:data:`CHECKS` to run, all by default
    inject_bad_frame :
        Replace the moving frame by the identity

    Returns
    -------
    reports :
        One report per check, in registry order
    """
    settings = settings or VerifyConfig()
    design = bad_frame_design(gains) if inject_bad_frame else rb_observer_design(gains)
    ctx = VerifyContext(
        gains=gains,
        design=design,
        settings=settings,
        scenario=scenario if scenario is not None else SimConfig(gains=gains),
    )
    selected = list(CHECKS) if names is None else names
    unknown = set(selected) - set(CHECKS)
    if unknown:
        raise ValueError(f"Unknown check(s): {sorted(unknown)}")
    reports = []
    for index, name in enumerate(CHECKS):
        if name not in selected:
            continue
        sampler = Sampler(derive_seed(settings.seed, index))
        report = CHECKS[name](ctx, sampler)
        logger.info("%s", report)
        reports.append(report)
    return reports
