"""Tests for the verification suite"""
import dataclasses

import numpy as np
import pytest

from invobs.config import VerifyConfig
from invobs.framework import reports_to_dataframe
from invobs.lie import random_rotation
from invobs.noise import NoiseSpec
from invobs.rigid_body import ObserverGains
from invobs.verify import CHECKS, run_checks, trajectory_equivariance_residuals

from .util import reference_config, scalar_gains

SMALL = VerifyConfig(n_samples=50, n_error_rhs=50, n_transforms=2, seed=1)


def test_all_checks_pass():
    """Every check passes for the reference observer, in registry order"""
    reports = run_checks(scalar_gains(10.0), SMALL)
    assert [r.name for r in reports] == list(CHECKS)
    assert len(reports) == 11
    failed = [str(r) for r in reports if not r.passed]
    assert not failed, failed
    assert all(r.n_samples > 0 for r in reports)


def test_general_gain_passes():
    """A non-symmetric Hurwitz gain passes as well"""
    gains = ObserverGains(L=np.array([[4.0, 1.0, 0.0], [-1.0, 6.0, 0.5], [0.0, 0.0, 8.0]]))
    reports = run_checks(gains, SMALL, names=["alpha_closed_form", "error_rhs_closed_form"])
    assert all(r.passed for r in reports)


def test_alpha_closed_form_absolute():
    """The generic alpha matches the closed form to 1e-11 absolute over 1000 samples"""
    (report,) = run_checks(scalar_gains(10.0), VerifyConfig(), names=["alpha_closed_form"])
    assert report.n_samples == 1000
    assert report.tolerance == 1e-11
    assert report.passed, str(report)


def test_bad_frame_fails():
    """A constant moving frame breaks equivariance"""
    reports = run_checks(scalar_gains(10.0), SMALL, inject_bad_frame=True)
    first_failure = next(r for r in reports if not r.passed)
    assert first_failure.name == "frame_equivariance"
    assert first_failure.max_residual > 1e-3


def test_subset_and_reproducibility():
    """A check re-run alone draws the same samples as in the full suite"""
    full = {r.name: r for r in run_checks(scalar_gains(10.0), SMALL)}
    alone = run_checks(scalar_gains(10.0), SMALL, names=["error_invariance", "beta_commutation"])
    assert [r.name for r in alone] == ["beta_commutation", "error_invariance"]
    for report in alone:
        assert report.max_residual == full[report.name].max_residual


def test_unknown_check():
    """Unknown names are rejected before anything runs"""
    with pytest.raises(ValueError, match="no_such_check"):
        run_checks(scalar_gains(10.0), SMALL, names=["frame_equivariance", "no_such_check"])


def test_tolerance_override():
    """An impossible tolerance turns a passing check into a failure"""
    strict = dataclasses.replace(
        SMALL, tolerances=dataclasses.replace(SMALL.tolerances, lambda_identity=0.0)
    )
    (report,) = run_checks(scalar_gains(10.0), strict, names=["lambda_identity"])
    assert not report.passed
    assert report.tolerance == 0.0


def test_trajectory_equivariance():
    """Rotating a clean scenario rotates the estimates"""
    config = reference_config(t_end=0.5)
    residuals = trajectory_equivariance_residuals(config, [random_rotation(s) for s in range(3)])
    assert len(residuals) == 3
    assert max(residuals) <= 1e-8


def test_trajectory_equivariance_rejects_noise():
    """Noisy scenarios are not equivariant sample by sample"""
    with pytest.raises(ValueError, match="clean"):
        trajectory_equivariance_residuals(
            reference_config(t_end=0.1, noise=NoiseSpec.paper()), [np.eye(3)]
        )


def test_reports_table():
    """Reports tabulate with one row per check"""
    names = ["frame_equivariance", "system_invariance"]
    table = reports_to_dataframe(run_checks(scalar_gains(10.0), SMALL, names=names))
    assert list(table.columns) == ["check", "n_samples", "max_residual", "tolerance", "passed"]
    assert bool(table["passed"].all())
