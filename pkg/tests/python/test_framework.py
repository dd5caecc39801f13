"""
Tests for the generic observer construction and its verifiers, exercised on the
rigid-body instance
"""
import dataclasses

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis.strategies import just

from invobs.core import FrameUndefined
from invobs.framework import (
    CheckReport,
    MeasuredState,
    MeasuredTangent,
    ObserverDesign,
    SystemModel,
    alpha,
    beta,
    check_beta_commutation,
    check_error_invariance,
    check_estimate_invariance,
    check_frame_equivariance,
    check_lambda_identity,
    check_phi_linearity,
    check_system_invariance,
    check_zero_error_invariance,
    directional_derivative,
    estimate,
    invariant_error,
    invariant_error_rhs,
    make_report,
    moving_frame,
    normalize,
    reports_to_dataframe,
    retract,
    summarize,
    tangent_beta,
    tangent_lambda,
    write_reports_csv,
)
from invobs.lie import exp_so3, random_rotation
from invobs.rigid_body import (
    GRAVITY_NED,
    ObserverGains,
    RigidBodyInput,
    Sampler,
    h_rb,
    rb_observer_design,
    rb_system_model,
    so3_group,
)

from .hypothesis_util import measured_states, rigid_body_inputs, standard_settings, vectors

GAINS = ObserverGains.scalar(10.0)
MODEL = rb_system_model(GAINS)
DESIGN = rb_observer_design(GAINS)
FD_DESIGN = DESIGN.without_analytic_tangents()
GROUP = so3_group()


def _y(q, rot=None):
    return MeasuredState(np.asarray(q, dtype=np.float64), np.eye(3) if rot is None else rot)


def test_beta_examples():
    """beta(y) = R^T L q for the rigid body"""
    np.testing.assert_allclose(beta(DESIGN, GROUP, _y([1.0, 2.0, 3.0])), [10.0, 20.0, 30.0])
    np.testing.assert_array_equal(
        beta(DESIGN, GROUP, _y(np.zeros(3), random_rotation(5))), np.zeros(3)
    )


def test_beta_commutes_with_group():
    """beta(rho_g y) == phi_g(beta(y)) and the tangent identity over 100 samples"""
    value, tangent = check_beta_commutation(DESIGN, GROUP, Sampler(0).beta(100))
    assert value.passed, value
    assert value.max_residual <= 1e-12
    assert tangent.passed, tangent
    assert tangent.n_samples == 100


def test_alpha_examples():
    """alpha reduces to gravity at rest and to g - L L q at a displaced position"""
    u = RigidBodyInput(np.zeros(3), np.zeros(3))
    np.testing.assert_allclose(
        alpha(MODEL, DESIGN, GROUP, np.zeros(3), _y(np.zeros(3)), u),
        [0.0, 0.0, 9.80665],
        rtol=0,
        atol=1e-12,
    )
    np.testing.assert_allclose(
        alpha(MODEL, DESIGN, GROUP, np.zeros(3), _y([1.0, 0.0, 0.0]), u),
        [-100.0, 0.0, 9.80665],
        rtol=0,
        atol=1e-12,
    )


def test_zero_error_manifold_invariance():
    """d/dt (z - x + beta(y)) vanishes on the zero-error manifold"""
    report = check_zero_error_invariance(MODEL, DESIGN, GROUP, Sampler(1).trajectory_point(1000))
    assert report.passed, report


@given(x=vectors(scale=just(30.0)), y=measured_states())
@settings(**standard_settings())
def test_estimate_on_manifold(x, y):
    """z = x - beta(y) gives xhat = x and eta = 0"""
    z = x - beta(DESIGN, GROUP, y)
    np.testing.assert_allclose(estimate(DESIGN, GROUP, z, y), x, rtol=0, atol=1e-12)
    np.testing.assert_allclose(
        invariant_error(DESIGN, GROUP, z, x, y).eta, np.zeros(3), rtol=0, atol=1e-12
    )


def test_reference_initial_estimate():
    """Level flight at 20 m/s with a zero initial estimate"""
    y0 = _y(np.zeros(3))
    x0 = np.array([20.0, 0.0, 0.0])
    z0 = np.zeros(3) - beta(DESIGN, GROUP, y0)
    np.testing.assert_array_equal(estimate(DESIGN, GROUP, z0, y0), np.zeros(3))
    error = invariant_error(DESIGN, GROUP, z0, x0, y0)
    np.testing.assert_array_equal(error.eta, [-20.0, 0.0, 0.0])
    assert error.norm() == 20.0


def test_error_invariance():
    """eta is unchanged when (z, x, y) are transformed together"""
    report = check_error_invariance(DESIGN, GROUP, Sampler(2).error(100))
    assert report.passed, report


def test_estimate_invariance():
    """The estimate dynamics are G-invariant"""
    report = check_estimate_invariance(MODEL, DESIGN, GROUP, Sampler(3).estimate(1000))
    assert report.passed, report


def test_error_rhs_at_origin():
    """The invariant error system has an equilibrium at eta = 0"""
    for design in (DESIGN, FD_DESIGN):
        for x, y, u in Sampler(4).trajectory_point(20):
            big_x, big_y, big_u = normalize(design, GROUP, x, y, u)
            np.testing.assert_array_equal(
                invariant_error_rhs(MODEL, design, GROUP, np.zeros(3), big_x, big_y, big_u),
                np.zeros(3),
            )


def test_error_rhs_example():
    """eta = e1 with L = 10 I decays at -10 e1 for any invariants"""
    eta = np.array([1.0, 0.0, 0.0])
    for x, y, u in Sampler(5).trajectory_point(50):
        big_x, big_y, big_u = normalize(DESIGN, GROUP, x, y, u)
        np.testing.assert_allclose(
            invariant_error_rhs(MODEL, DESIGN, GROUP, eta, big_x, big_y, big_u),
            [-10.0, 0.0, 0.0],
            rtol=0,
            atol=1e-8,
        )


def test_error_rhs_matches_closed_form_with_finite_differences():
    """The generic error system, tangents by finite differences, equals -L eta"""
    worst = 0.0
    for eta, x, y, u in Sampler(6).error_system(500):
        big_x, big_y, big_u = normalize(DESIGN, GROUP, x, y, u)
        rhs = invariant_error_rhs(MODEL, FD_DESIGN, GROUP, eta, big_x, big_y, big_u)
        worst = max(worst, np.linalg.norm(rhs + GAINS.L @ eta))
    assert worst <= 1e-6


@given(y=measured_states(), w=vectors(scale=just(1.0)))
@settings(**standard_settings())
def test_normalize_is_idempotent(y, w):
    """Normalizing already-normalized invariants changes nothing"""
    x = np.array([20.0, -3.0, 1.0])
    u = RigidBodyInput(w, 2.0 * w)
    big_x, big_y, big_u = normalize(DESIGN, GROUP, x, y, u)
    again_x, again_y, again_u = normalize(DESIGN, GROUP, big_x, big_y, big_u)
    np.testing.assert_allclose(again_x, big_x, rtol=0, atol=1e-12)
    np.testing.assert_allclose(again_y.rot, np.eye(3), rtol=0, atol=1e-14)
    np.testing.assert_allclose(again_u.omega, big_u.omega, rtol=0, atol=1e-12)


def test_frame_equivariance():
    """gamma(rho_g y) g == gamma(y); the identity element gives exactly zero"""
    report = check_frame_equivariance(DESIGN, GROUP, Sampler(7).frame(1000))
    assert report.passed and report.max_residual <= 1e-13, report
    y = _y([1.0, 2.0, 3.0], random_rotation(8))
    identity = check_frame_equivariance(DESIGN, GROUP, [(np.eye(3), y)])
    assert identity.max_residual == 0.0


def test_bad_frame_fails_equivariance():
    """A constant frame is not equivariant; the residual is |g - I|"""
    bad = dataclasses.replace(DESIGN, gamma=lambda y: np.eye(3))
    g = exp_so3([0.0, 0.0, 0.5])
    report = check_frame_equivariance(bad, GROUP, [(g, _y(np.ones(3)))])
    assert not report.passed
    assert report.max_residual == pytest.approx(np.linalg.norm(g - np.eye(3)))


def test_system_invariance():
    """The rigid body is SO(3)-invariant; the identity element gives zero residual"""
    report = check_system_invariance(MODEL, GROUP, Sampler(9).system(1000))
    assert report.passed, report
    x, y, u = next(Sampler(10).trajectory_point(1))
    identity = check_system_invariance(MODEL, GROUP, [(np.eye(3), x, y, u)])
    assert identity.max_residual <= 1e-15


def test_mutated_dynamics_fail_invariance():
    """Adding a constant inertial-frame vector to f breaks the symmetry"""
    push = np.array([1.0, 0.0, 0.0])
    mutated = dataclasses.replace(MODEL, f=lambda x, y, u: MODEL.f(x, y, u) + push)
    report = check_system_invariance(mutated, GROUP, Sampler(11).system(50))
    assert not report.passed


def test_phi_linearity():
    """phi_g is linear in x"""
    rng = np.random.default_rng(12)
    samples = [
        (
            random_rotation(rng),
            rng.uniform(-30, 30, 3),
            rng.uniform(-30, 30, 3),
            rng.uniform(-3, 3),
            rng.uniform(-3, 3),
        )
        for _ in range(200)
    ]
    report = check_phi_linearity(GROUP, samples)
    assert report.passed, report


def test_lambda_identity():
    """The tangent of lambda is invariant (finite differences on both sides)"""
    report = check_lambda_identity(DESIGN, GROUP, MODEL, Sampler(13).lam(200))
    assert report.passed, report
    samples = [
        (np.eye(3), zeta, x, y, u) for _, zeta, x, y, u in Sampler(14).lam(20)
    ]
    assert check_lambda_identity(DESIGN, GROUP, MODEL, samples).max_residual <= 1e-6
    zero = [(g, np.zeros(3), x, y, u) for g, _, x, y, u in Sampler(15).lam(20)]
    assert check_lambda_identity(DESIGN, GROUP, MODEL, zero).max_residual <= 1e-12


@given(y=measured_states(), x=vectors(), u=rigid_body_inputs())
@settings(**standard_settings())
def test_analytic_tangents_match_finite_differences(y, x, u):
    """The registered tangents of beta and lambda agree with finite differences"""
    ydot = h_rb(x, y, u)
    np.testing.assert_allclose(
        tangent_beta(DESIGN, GROUP, y, ydot),
        tangent_beta(FD_DESIGN, GROUP, y, ydot),
        rtol=0,
        atol=1e-6,
    )
    xi = np.array([1.0, -2.0, 0.5])
    np.testing.assert_allclose(
        tangent_lambda(DESIGN, GROUP, y, xi, ydot),
        tangent_lambda(FD_DESIGN, GROUP, y, xi, ydot),
        rtol=0,
        atol=1e-6,
    )


@given(y=measured_states(), x=vectors(), u=rigid_body_inputs())
@settings(**standard_settings())
def test_tangent_beta_along_trajectories(y, x, u):
    """Along trajectories T beta = R^T L qdot - hat(omega) R^T L q"""
    ydot = h_rb(x, y, u)
    gain = GAINS.L
    expected = y.rot.T @ gain @ ydot.vec + np.cross(-u.omega, y.rot.T @ gain @ y.vec)
    np.testing.assert_allclose(
        tangent_beta(DESIGN, GROUP, y, ydot), expected, rtol=0, atol=1e-10
    )


def test_retraction_stays_on_manifold():
    """retract() keeps the rotation block orthonormal"""
    for x, y, u in Sampler(16).trajectory_point(20):
        moved = retract(y, h_rb(x, y, u), 0.1)
        np.testing.assert_allclose(moved.rot.T @ moved.rot, np.eye(3), rtol=0, atol=1e-13)


def test_directional_derivative_of_zero_tangent():
    """A zero tangent gives a zero derivative without evaluating a step"""
    y = _y([1.0, 2.0, 3.0])
    zero = MeasuredTangent(np.zeros(3), np.zeros((3, 3)))
    np.testing.assert_array_equal(
        directional_derivative(lambda p: p.vec * 2.0, y, zero), np.zeros(3)
    )


def test_directional_derivative_linear():
    """Central differences are exact for functions linear in the vector block"""
    y = _y([1.0, 2.0, 3.0], random_rotation(17))
    ydot = MeasuredTangent(np.array([0.5, -1.0, 2.0]), np.zeros((3, 3)))
    np.testing.assert_allclose(
        directional_derivative(lambda p: 3.0 * p.vec, y, ydot),
        3.0 * ydot.vec,
        rtol=1e-8,
    )


def test_moving_frame_failures():
    """Failures and non-finite output of gamma are reported as FrameUndefined"""

    def broken(y):
        raise ValueError("no frame here")

    for gamma in (broken, lambda y: np.full((3, 3), np.nan)):
        design = ObserverDesign(gamma=gamma, ell=lambda y: y.vec)
        with pytest.raises(FrameUndefined):
            moving_frame(design, _y(np.zeros(3)))
        with pytest.raises(FrameUndefined):
            beta(design, GROUP, _y(np.zeros(3)))


def test_make_report():
    """Reports pass iff the largest residual is within tolerance; NaN fails"""
    assert make_report("a", [1e-13, 2e-13], 1e-12).passed
    assert not make_report("b", [1e-13, 2e-11], 1e-12).passed
    assert not make_report("c", [np.nan], 1e-12).passed
    empty = make_report("d", [], 1e-12)
    assert empty.passed and empty.n_samples == 0
    assert "FAIL" in str(make_report("e", [1.0], 0.5))


def test_reports_table(tmp_path):
    """Reports tabulate as check, n_samples, max_residual, tolerance, passed"""
    reports = [
        CheckReport("first", 10, 1e-13, 1e-12, True),
        CheckReport("second", 5, 1.0, 1e-6, False),
    ]
    frame = reports_to_dataframe(reports)
    assert list(frame.columns) == ["check", "n_samples", "max_residual", "tolerance", "passed"]
    path = tmp_path / "report.csv"
    write_reports_csv(reports, path)
    loaded = pd.read_csv(path)
    assert list(loaded["check"]) == ["first", "second"]
    assert list(loaded["passed"]) == [True, False]
    assert summarize(reports).name == "second"
    assert summarize(reports[:1]) is None


def test_system_model_fields():
    """The rigid-body model has x in R^3, y in R^3 x SO(3) and a 3-dim group"""
    assert isinstance(MODEL, SystemModel)
    assert (MODEL.dim_x, MODEL.dim_y, MODEL.dim_group) == (3, 6, 3)
    assert GROUP.dim == 3
    y = _y(np.zeros(3))
    np.testing.assert_allclose(
        MODEL.f(np.zeros(3), y, RigidBodyInput(np.zeros(3), np.zeros(3))), GRAVITY_NED
    )
