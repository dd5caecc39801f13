"""
Symmetry-preserving reduced-order observers for G-invariant systems.

A system with unmeasured state ``x`` (a real n-vector), measured state ``y`` and
input ``u`` is described by a :py:class:`SystemModel`. Its symmetry is a
:py:class:`TransformationGroup` acting on all three, and an
:py:class:`ObserverDesign` picks a moving frame ``gamma`` together with the free
map ``ell``. From these the observer map ``beta``, the pre-observer field
``alpha`` and the invariant error ``eta`` follow.

Measured states are composites of a vector block and a rotation block
(:py:class:`MeasuredState`). Tangent vectors to ``y`` are
:py:class:`MeasuredTangent` objects; the rotation part is the ambient matrix
derivative, so ``rot.T @ rot_dot`` is skew-symmetric.

The ``check_*`` functions evaluate every identity the construction relies on
over a collection of samples and return a :py:class:`CheckReport`.
"""
from __future__ import annotations

import dataclasses
import logging
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .core import FrameUndefined, InvObsError
from .lie import exp_so3, vee
from .util import FLOAT_FORMAT

logger = logging.getLogger(__name__)

DEFAULT_FD_STEP = 1e-6


@dataclasses.dataclass(frozen=True)
class MeasuredState:
    """
    Measured part of the state: a vector block and a rotation block

    Parameters
    ----------
    vec :
        Vector block (for the rigid body: position q [m])
    rot :
        Rotation block (for the rigid body: attitude R_IB)
    """

    vec: np.ndarray
    rot: np.ndarray

    def norm(self) -> float:
        """Magnitude of the vector block (the rotation block has unit scale)"""
        return float(np.linalg.norm(self.vec))


@dataclasses.dataclass(frozen=True)
class MeasuredTangent:
    """
    Tangent vector to a :py:class:`MeasuredState`

    Parameters
    ----------
    vec :
        Derivative of the vector block
    rot :
        Derivative of the rotation block, as an ambient 3x3 matrix
    """

    vec: np.ndarray
    rot: np.ndarray

    def __add__(self, other: MeasuredTangent) -> MeasuredTangent:
        return MeasuredTangent(self.vec + other.vec, self.rot + other.rot)

    def __sub__(self, other: MeasuredTangent) -> MeasuredTangent:
        return MeasuredTangent(self.vec - other.vec, self.rot - other.rot)

    def __mul__(self, scale: float) -> MeasuredTangent:
        return MeasuredTangent(scale * self.vec, scale * self.rot)

    __rmul__ = __mul__

    def __neg__(self) -> MeasuredTangent:
        return MeasuredTangent(-self.vec, -self.rot)

    def norm(self) -> float:
        """Size of the tangent vector; the rotation part counts as its body rate"""
        return float(
            np.sqrt(np.sum(self.vec**2) + 0.5 * np.sum(self.rot**2))
        )


def measured_distance(a, b) -> float:
    """Distance between two measured states or two measured tangents"""
    return float(
        np.sqrt(np.sum((a.vec - b.vec) ** 2) + np.sum((a.rot - b.rot) ** 2))
    )


@dataclasses.dataclass(frozen=True)
class TransformationGroup:
    # pylint: disable=too-many-instance-attributes
    """
    Transformation group acting on (x, y, u)

    Parameters
    ----------
    phi :
        Action on the unmeasured state, ``(g, x) -> x'``. Must be linear in x.
    rho :
        Action on the measured state, ``(g, y) -> y'``
    psi :
        Action on the input, ``(g, u) -> u'``
    tangent_rho :
        Tangent map of rho, ``(g, y, ydot) -> ydot'`` at ``y``
    compose :
        Group product ``(g, h) -> g * h``
    inverse :
        Group inverse
    identity :
        Returns the identity element
    dim :
        Dimension of the group
    """

    phi: Callable[[Any, np.ndarray], np.ndarray]
    rho: Callable[[Any, MeasuredState], MeasuredState]
    psi: Callable[[Any, Any], Any]
    tangent_rho: Callable[[Any, MeasuredState, MeasuredTangent], MeasuredTangent]
    compose: Callable[[Any, Any], Any]
    inverse: Callable[[Any], Any]
    identity: Callable[[], Any]
    dim: int

    def distance(self, g: Any, h: Any) -> float:
        """Frobenius distance between two (matrix) group elements"""
        return float(np.linalg.norm(np.asarray(g) - np.asarray(h)))


@dataclasses.dataclass(frozen=True)
class SystemModel:
    """
    Dynamics ``xdot = f(x, y, u)``, ``ydot = h(x, y, u)``

    Parameters
    ----------
    f :
        Vector field of the unmeasured state
    h :
        Vector field of the measured state, returning a :py:class:`MeasuredTangent`
    dim_x :
        Dimension of x
    dim_y :
        Dimension of y
    dim_group :
        Dimension of the symmetry group
    """

    f: Callable[[np.ndarray, MeasuredState, Any], np.ndarray]
    h: Callable[[np.ndarray, MeasuredState, Any], MeasuredTangent]
    dim_x: int
    dim_y: int
    dim_group: int


@dataclasses.dataclass(frozen=True)
class ObserverDesign:
    """
    Observer design: moving frame plus the tuning map ``ell``

    Parameters
    ----------
    gamma :
        Moving frame ``y -> g``, equivariant: ``gamma(rho(g, y)) * g == gamma(y)``
    ell :
        Smooth map ``y -> x``; the design freedom of the observer
    tangent_beta :
        Optional analytic tangent map of beta, ``(y, ydot) -> x``. Finite
        differences are used when it is not given.
    tangent_lambda :
        Optional analytic tangent of ``lambda(y; xi) = phi(gamma(y), xi)`` in its
        y-slot, ``(y, xi, ydot) -> x``
    fd_step :
        Relative step of the central finite differences
    """

    gamma: Callable[[MeasuredState], Any]
    ell: Callable[[MeasuredState], np.ndarray]
    tangent_beta: Optional[Callable[[MeasuredState, MeasuredTangent], np.ndarray]] = None
    tangent_lambda: Optional[
        Callable[[MeasuredState, np.ndarray, MeasuredTangent], np.ndarray]
    ] = None
    fd_step: float = DEFAULT_FD_STEP

    def without_analytic_tangents(self) -> ObserverDesign:
        """Copy of this design that falls back to finite differences everywhere"""
        return dataclasses.replace(self, tangent_beta=None, tangent_lambda=None)


@dataclasses.dataclass(frozen=True)
class InvariantError:
    """
    Invariant estimation error; zero exactly on the zero-error manifold

    Parameters
    ----------
    eta :
        Error coordinates, in units of x
    """

    eta: np.ndarray

    def norm(self) -> float:
        """Euclidean norm of eta"""
        return float(np.linalg.norm(self.eta))


@dataclasses.dataclass
class CheckReport:
    """
    Outcome of one numerical verification

    Parameters
    ----------
    name :
        Name of the check
    n_samples :
        Number of samples evaluated
    max_residual :
        Largest residual over all samples
    tolerance :
        Pass threshold
    passed :
        Whether ``max_residual <= tolerance``
    """

    name: str
    n_samples: int
    max_residual: float
    tolerance: float
    passed: bool

    def asdict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return dataclasses.asdict(self)

    def __str__(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{self.name}: {verdict} ({self.n_samples} samples, "
            f"max residual {self.max_residual:.3e} <= {self.tolerance:.1e})"
        )


def make_report(name: str, residuals: Sequence[float], tolerance: float) -> CheckReport:
    """Summarize a list of residuals into a :py:class:`CheckReport`"""
    residuals = np.asarray(residuals, dtype=np.float64)
    max_residual = float(np.max(residuals)) if residuals.size else 0.0
    # NaN compares false, so a NaN residual never passes
    passed = residuals.size == 0 or bool(max_residual <= tolerance)
    report = CheckReport(
        name=name,
        n_samples=int(residuals.size),
        max_residual=max_residual,
        tolerance=float(tolerance),
        passed=passed,
    )
    logger.debug("%s", report)
    return report


def reports_to_dataframe(reports: Iterable[CheckReport]) -> pd.DataFrame:
    """Tabulate reports as ``check, n_samples, max_residual, tolerance, passed``"""
    rows = [r.asdict() for r in reports]
    frame = pd.DataFrame(
        rows, columns=["name", "n_samples", "max_residual", "tolerance", "passed"]
    )
    return frame.rename(columns={"name": "check"})


def write_reports_csv(reports: Iterable[CheckReport], path) -> None:
    """Write verification reports to a CSV file"""
    reports_to_dataframe(reports).to_csv(path, index=False, float_format=FLOAT_FORMAT)


# ---------------------------------------------------------------------------
# Finite differences on the measured manifold
# ---------------------------------------------------------------------------


def retract(y: MeasuredState, ydot: MeasuredTangent, eps: float) -> MeasuredState:
    """Move ``eps`` along ``ydot`` while staying on the rotation manifold"""
    body_rate = vee(y.rot.T @ ydot.rot)
    return MeasuredState(y.vec + eps * ydot.vec, y.rot @ exp_so3(eps * body_rate))


def directional_derivative(
    fn: Callable[[MeasuredState], np.ndarray],
    y: MeasuredState,
    ydot: MeasuredTangent,
    *,
    step: float = DEFAULT_FD_STEP,
) -> np.ndarray:
    """
    Central finite-difference derivative of ``fn`` at ``y`` along ``ydot``

    The perturbation has length ``step * max(1, |y|)`` along the unit
    direction of ``ydot``.

    Parameters
    ----------
    fn :
        Function of the measured state
    y :
        Base point
    ydot :
        Tangent direction
    step :
        Relative step size

    Returns
    -------
    derivative :
        Approximation of ``T_y fn (ydot)``
    """
    size = ydot.norm()
    if size == 0.0:
        return np.zeros_like(np.asarray(fn(y), dtype=np.float64))
    eps = step * max(1.0, y.norm()) / size
    forward = np.asarray(fn(retract(y, ydot, eps)), dtype=np.float64)
    backward = np.asarray(fn(retract(y, ydot, -eps)), dtype=np.float64)
    return (forward - backward) / (2.0 * eps)


# ---------------------------------------------------------------------------
# Observer construction
# ---------------------------------------------------------------------------


def moving_frame(design: ObserverDesign, y: MeasuredState) -> Any:
    """Evaluate the moving frame, raising FrameUndefined when it cannot be"""
    try:
        frame = design.gamma(y)
    except InvObsError as e:
        raise FrameUndefined(f"Moving frame undefined: {e}") from e
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
        raise FrameUndefined(f"Moving frame undefined: {e}") from e
    if frame is None or not np.all(np.isfinite(np.asarray(frame, dtype=np.float64))):
        raise FrameUndefined("Moving frame returned a non-finite group element")
    return frame


def beta(
    design: ObserverDesign, group: TransformationGroup, y: MeasuredState
) -> np.ndarray:
    """
    Observer map ``beta(y) = phi(gamma(y)^-1, ell(rho(gamma(y), y)))``

    Parameters
    ----------
    design :
        Observer design
    group :
        Transformation group
    y :
        Measured state

    Returns
    -------
    offset :
        x-space vector such that the estimate is ``z + beta(y)``
    """
    frame = moving_frame(design, y)
    normalized = group.rho(frame, y)
    return group.phi(group.inverse(frame), design.ell(normalized))


def tangent_beta(
    design: ObserverDesign,
    group: TransformationGroup,
    y: MeasuredState,
    ydot: MeasuredTangent,
) -> np.ndarray:
    """Tangent map of beta at ``y`` applied to ``ydot``"""
    if design.tangent_beta is not None:
        return design.tangent_beta(y, ydot)
    return directional_derivative(
        lambda p: beta(design, group, p), y, ydot, step=design.fd_step
    )


def lambda_map(
    design: ObserverDesign, group: TransformationGroup, y: MeasuredState, xi
) -> np.ndarray:
    """``lambda(y; xi) = phi(gamma(y), xi)``"""
    return group.phi(moving_frame(design, y), xi)


def tangent_lambda(
    design: ObserverDesign,
    group: TransformationGroup,
    y: MeasuredState,
    xi: np.ndarray,
    ydot: MeasuredTangent,
) -> np.ndarray:
    """Tangent of lambda in its y-slot at ``(y; xi)``, applied to ``ydot``"""
    if design.tangent_lambda is not None:
        return design.tangent_lambda(y, xi, ydot)
    return directional_derivative(
        lambda p: lambda_map(design, group, p, xi), y, ydot, step=design.fd_step
    )


def alpha(
    model: SystemModel,
    design: ObserverDesign,
    group: TransformationGroup,
    z: np.ndarray,
    y: MeasuredState,
    u: Any,
) -> np.ndarray:
    """
    Pre-observer vector field

    ``alpha(z, y, u) = f(z + beta(y), y, u) - T_y beta(h(z + beta(y), y, u))``

    Parameters
    ----------
    model :
        System dynamics
    design :
        Observer design
    group :
        Transformation group
    z :
        Observer state
    y :
        Measured state
    u :
        Input

    Returns
    -------
    zdot :
        Time derivative of the observer state
    """
    xhat = z + beta(design, group, y)
    return model.f(xhat, y, u) - tangent_beta(design, group, y, model.h(xhat, y, u))


def estimate(
    design: ObserverDesign, group: TransformationGroup, z: np.ndarray, y: MeasuredState
) -> np.ndarray:
    """Estimate of the unmeasured state, ``xhat = z + beta(y)``"""
    return z + beta(design, group, y)


def estimate_rhs(
    model: SystemModel,
    design: ObserverDesign,
    group: TransformationGroup,
    xhat: np.ndarray,
    x: np.ndarray,
    y: MeasuredState,
    u: Any,
) -> np.ndarray:
    """
    Dynamics of the estimate, ``alpha(xhat - beta(y), y, u) + T_y beta(h(x, y, u))``
    """
    z = xhat - beta(design, group, y)
    return alpha(model, design, group, z, y, u) + tangent_beta(
        design, group, y, model.h(x, y, u)
    )


def invariant_error(
    design: ObserverDesign,
    group: TransformationGroup,
    z: np.ndarray,
    x: np.ndarray,
    y: MeasuredState,
) -> InvariantError:
    """
    Invariant error ``eta = phi(gamma(y), z) + ell(rho(gamma(y), y)) - phi(gamma(y), x)``

    Parameters
    ----------
    design :
        Observer design
    group :
        Transformation group
    z :
        Observer state
    x :
        True unmeasured state
    y :
        Measured state

    Returns
    -------
    error :
        :py:class:`InvariantError`, zero exactly when ``z == x - beta(y)``
    """
    frame = moving_frame(design, y)
    eta = (
        group.phi(frame, z)
        + design.ell(group.rho(frame, y))
        - group.phi(frame, x)
    )
    return InvariantError(eta=np.asarray(eta, dtype=np.float64))


def normalize(
    design: ObserverDesign,
    group: TransformationGroup,
    x: np.ndarray,
    y: MeasuredState,
    u: Any,
) -> Tuple[np.ndarray, MeasuredState, Any]:
    """Complete set of invariants ``(X, Y, U)`` obtained with the moving frame"""
    frame = moving_frame(design, y)
    return group.phi(frame, x), group.rho(frame, y), group.psi(frame, u)


def invariant_error_rhs(
    model: SystemModel,
    design: ObserverDesign,
    group: TransformationGroup,
    eta: np.ndarray,
    X: np.ndarray,
    Y: MeasuredState,
    U: Any,
) -> np.ndarray:
    # pylint: disable=invalid-name,too-many-arguments
    """
    Right-hand side of the invariant error system

    ``f(X+eta, Y, U) - f(X, Y, U) - T_Y beta(h(X+eta, Y, U) - h(X, Y, U))
    + T_(Y; eta) lambda(h(X, Y, U))``

    Parameters
    ----------
    model :
        System dynamics
    design :
        Observer design
    group :
        Transformation group
    eta :
        Invariant error
    X, Y, U :
        Moving-frame-normalized invariants (see :py:func:`normalize`)

    Returns
    -------
    etadot :
        Time derivative of eta
    """
    h_est = model.h(X + eta, Y, U)
    h_true = model.h(X, Y, U)
    return (
        model.f(X + eta, Y, U)
        - model.f(X, Y, U)
        - tangent_beta(design, group, Y, h_est - h_true)
        + tangent_lambda(design, group, Y, eta, h_true)
    )


# ---------------------------------------------------------------------------
# Verifiers
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class Tolerances:
    # pylint: disable=too-many-instance-attributes
    """Pass thresholds of the verifiers"""

    frame_equivariance: float = 1e-12
    system_invariance: float = 1e-11
    beta_commutation: float = 1e-12
    beta_tangent_commutation: float = 1e-6
    lambda_identity: float = 1e-6
    estimate_invariance: float = 1e-11
    error_invariance: float = 1e-11
    zero_error_manifold: float = 1e-12
    alpha_closed_form: float = 1e-11
    error_rhs_closed_form: float = 1e-6
    trajectory_equivariance: float = 1e-8
    linearity: float = 1e-12

    def asdict(self) -> Dict[str, float]:
        """Convert to dictionary"""
        return dataclasses.asdict(self)


DEFAULT_TOLERANCES = Tolerances()


def check_frame_equivariance(
    design: ObserverDesign,
    group: TransformationGroup,
    samples: Iterable[Tuple[Any, MeasuredState]],
    *,
    tolerance: float = DEFAULT_TOLERANCES.frame_equivariance,
) -> CheckReport:
    """
    Equivariance of the moving frame, ``gamma(rho(g, y)) * g == gamma(y)``

    Parameters
    ----------
    design :
        Observer design whose frame is checked
    group :
        Transformation group
    samples :
        Iterable of ``(g, y)`` pairs

    Returns
    -------
    report :
        Largest Frobenius distance over the samples
    """
    residuals = []
    for g, y in samples:
        lhs = group.compose(moving_frame(design, group.rho(g, y)), g)
        residuals.append(group.distance(lhs, moving_frame(design, y)))
    return make_report("frame_equivariance", residuals, tolerance)


def check_system_invariance(
    model: SystemModel,
    group: TransformationGroup,
    samples: Iterable[Tuple[Any, np.ndarray, MeasuredState, Any]],
    *,
    tolerance: float = DEFAULT_TOLERANCES.system_invariance,
) -> CheckReport:
    """
    G-invariance of both vector fields

    ``phi_g(f(x, y, u)) == f(phi_g(x), rho_g(y), psi_g(u))`` and
    ``T rho_g(h(x, y, u)) == h(phi_g(x), rho_g(y), psi_g(u))``. The tangent map
    of phi is phi itself, since phi is linear.

    Parameters
    ----------
    model :
        System dynamics
    group :
        Transformation group
    samples :
        Iterable of ``(g, x, y, u)``

    Returns
    -------
    report :
        Largest of the f- and h-residuals
    """
    residuals = []
    for g, x, y, u in samples:
        x_g, y_g, u_g = group.phi(g, x), group.rho(g, y), group.psi(g, u)
        f_res = np.linalg.norm(group.phi(g, model.f(x, y, u)) - model.f(x_g, y_g, u_g))
        h_res = measured_distance(
            group.tangent_rho(g, y, model.h(x, y, u)), model.h(x_g, y_g, u_g)
        )
        residuals.append(max(f_res, h_res))
    return make_report("system_invariance", residuals, tolerance)


def check_phi_linearity(
    group: TransformationGroup,
    samples: Iterable[Tuple[Any, np.ndarray, np.ndarray, float, float]],
    *,
    tolerance: float = DEFAULT_TOLERANCES.linearity,
) -> CheckReport:
    """Linearity of phi in x, over samples ``(g, x1, x2, a, b)``"""
    residuals = []
    for g, x1, x2, a, b in samples:
        lhs = group.phi(g, a * x1 + b * x2)
        rhs = a * group.phi(g, x1) + b * group.phi(g, x2)
        residuals.append(np.linalg.norm(lhs - rhs))
    return make_report("phi_linearity", residuals, tolerance)


def check_beta_commutation(
    design: ObserverDesign,
    group: TransformationGroup,
    samples: Iterable[Tuple[Any, MeasuredState, MeasuredTangent]],
    *,
    tolerance: float = DEFAULT_TOLERANCES.beta_commutation,
    tangent_tolerance: float = DEFAULT_TOLERANCES.beta_tangent_commutation,
) -> Tuple[CheckReport, CheckReport]:
    """
    Commutation of beta with the transformation group

    Checks ``beta(rho_g(y)) == phi_g(beta(y))`` and the tangent identity
    ``T_(rho_g y) beta (T rho_g (ydot)) == phi_g(T_y beta(ydot))``. Both tangent
    maps are evaluated with finite differences.

    Parameters
    ----------
    design :
        Observer design
    group :
        Transformation group
    samples :
        Iterable of ``(g, y, ydot)``

    Returns
    -------
    reports :
        Value report and tangent report
    """
    fd_design = design.without_analytic_tangents()
    value_res, tangent_res = [], []
    for g, y, ydot in samples:
        y_g = group.rho(g, y)
        value_res.append(
            np.linalg.norm(beta(design, group, y_g) - group.phi(g, beta(design, group, y)))
        )
        lhs = tangent_beta(fd_design, group, y_g, group.tangent_rho(g, y, ydot))
        rhs = group.phi(g, tangent_beta(fd_design, group, y, ydot))
        tangent_res.append(np.linalg.norm(lhs - rhs))
    return (
        make_report("beta_commutation", value_res, tolerance),
        make_report("beta_tangent_commutation", tangent_res, tangent_tolerance),
    )


def check_lambda_identity(
    design: ObserverDesign,
    group: TransformationGroup,
    model: SystemModel,
    samples: Iterable[Tuple[Any, np.ndarray, np.ndarray, MeasuredState, Any]],
    *,
    tolerance: float = DEFAULT_TOLERANCES.lambda_identity,
) -> CheckReport:
    """
    Invariance of the tangent of lambda

    ``T_(y; phi_g^-1(zeta)) lambda(h(x, y, u))
    == T_(rho_g y; zeta) lambda(h(phi_g x, rho_g y, psi_g u))``, with both sides
    evaluated by central finite differences.

    Parameters
    ----------
    design :
        Observer design
    group :
        Transformation group
    model :
        System dynamics
    samples :
        Iterable of ``(g, zeta, x, y, u)``

    Returns
    -------
    report :
        Largest residual over the samples
    """
    fd_design = design.without_analytic_tangents()
    residuals = []
    for g, zeta, x, y, u in samples:
        lhs = tangent_lambda(
            fd_design, group, y, group.phi(group.inverse(g), zeta), model.h(x, y, u)
        )
        x_g, y_g, u_g = group.phi(g, x), group.rho(g, y), group.psi(g, u)
        rhs = tangent_lambda(fd_design, group, y_g, zeta, model.h(x_g, y_g, u_g))
        residuals.append(np.linalg.norm(lhs - rhs))
    return make_report("lambda_identity", residuals, tolerance)


def check_estimate_invariance(
    model: SystemModel,
    design: ObserverDesign,
    group: TransformationGroup,
    samples: Iterable[Tuple[Any, np.ndarray, np.ndarray, MeasuredState, Any]],
    *,
    tolerance: float = DEFAULT_TOLERANCES.estimate_invariance,
) -> CheckReport:
    """
    G-invariance of the estimate dynamics over samples ``(g, xhat, x, y, u)``
    """
    residuals = []
    for g, xhat, x, y, u in samples:
        lhs = group.phi(g, estimate_rhs(model, design, group, xhat, x, y, u))
        rhs = estimate_rhs(
            model,
            design,
            group,
            group.phi(g, xhat),
            group.phi(g, x),
            group.rho(g, y),
            group.psi(g, u),
        )
        residuals.append(np.linalg.norm(lhs - rhs))
    return make_report("estimate_invariance", residuals, tolerance)


def check_error_invariance(
    design: ObserverDesign,
    group: TransformationGroup,
    samples: Iterable[Tuple[Any, np.ndarray, np.ndarray, MeasuredState]],
    *,
    tolerance: float = DEFAULT_TOLERANCES.error_invariance,
) -> CheckReport:
    """
    G-invariance of eta over samples ``(g, z, x, y)``
    """
    residuals = []
    for g, z, x, y in samples:
        before = invariant_error(design, group, z, x, y).eta
        after = invariant_error(
            design, group, group.phi(g, z), group.phi(g, x), group.rho(g, y)
        ).eta
        residuals.append(np.linalg.norm(after - before))
    return make_report("error_invariance", residuals, tolerance)


def check_zero_error_invariance(
    model: SystemModel,
    design: ObserverDesign,
    group: TransformationGroup,
    samples: Iterable[Tuple[np.ndarray, MeasuredState, Any]],
    *,
    tolerance: float = DEFAULT_TOLERANCES.zero_error_manifold,
) -> CheckReport:
    """
    Positive invariance of the zero-error manifold ``z = x - beta(y)``

    For each sample ``(x, y, u)`` the observer starts on the manifold and the
    assembled right-hand side ``zdot - xdot + T_y beta(ydot)`` must vanish. The
    residual is relative to the magnitude of the terms that cancel.
    """
    residuals = []
    for x, y, u in samples:
        z = x - beta(design, group, y)
        zdot = alpha(model, design, group, z, y, u)
        xdot = model.f(x, y, u)
        beta_dot = tangent_beta(design, group, y, model.h(x, y, u))
        scale = max(1.0, np.linalg.norm(zdot), np.linalg.norm(xdot), np.linalg.norm(beta_dot))
        residuals.append(np.linalg.norm(zdot - xdot + beta_dot) / scale)
    return make_report("zero_error_manifold", residuals, tolerance)


def summarize(reports: List[CheckReport]) -> Optional[CheckReport]:
    """First failing report, or None when every report passed"""
    for report in reports:
        if not report.passed:
            return report
    return None
