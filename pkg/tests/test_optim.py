# tests/test_optim.py
"""
Tests for the Gauss-Newton driver and the matrix inverses.
"""
import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from levy_sysid.exceptions import NumericalInstabilityError
from levy_sysid.optim import (
    Evaluation,
    StopReason,
    gauss_newton,
    hermitian_pd_inverse,
    newton_decrement,
    relative_decrement_test,
    robust_inverse,
)


def exponential_fit(t: np.ndarray, y: np.ndarray):
    """Least squares for y ≈ x0·exp(x1·t)."""

    def residual(x):
        return x[0] * np.exp(x[1] * t) - y

    def evaluate(x):
        r = residual(x)
        jac = np.column_stack((np.exp(x[1] * t), x[0] * t * np.exp(x[1] * t)))
        return Evaluation(
            value=0.5 * float(r @ r),
            grad=jac.T @ r,
            curvature=jac.T @ jac,
            objective=lambda trial: 0.5 * float(residual(trial) @ residual(trial)),
        )

    return evaluate


class TestGaussNewton:

    @pytest.fixture
    def data(self):
        t = np.linspace(0.0, 1.0, 50)
        return t, 2.0 * np.exp(-1.5 * t)

    def test_converges_on_exact_fit(self, data):
        t, y = data
        run = gauss_newton(
            exponential_fit(t, y),
            np.array([1.0, 0.0]),
            is_converged=lambda ev: float(np.max(np.abs(ev.grad))) < 1e-8,
        )
        assert run.converged
        assert_allclose(run.x, [2.0, -1.5], rtol=1e-8)
        assert run.reason in (StopReason.SMALL_STEP, StopReason.STATIONARY, StopReason.LINE_SEARCH)

    def test_stopping_is_scale_free(self, data):
        t, y = data
        small = gauss_newton(
            exponential_fit(t, 1e-6 * y), np.array([1e-6, 0.0]),
            is_converged=relative_decrement_test(),
        )
        large = gauss_newton(
            exponential_fit(t, 1e6 * y), np.array([1e6, 0.0]),
            is_converged=relative_decrement_test(),
        )
        assert_allclose(small.x[1], -1.5, rtol=1e-6)
        assert_allclose(large.x[1], -1.5, rtol=1e-6)

    def test_iteration_limit(self, data):
        t, y = data
        run = gauss_newton(
            exponential_fit(t, y),
            np.array([1.0, 0.0]),
            is_converged=lambda ev: False,
            max_iter=1,
        )
        assert run.iterations == 1
        assert run.reason is StopReason.MAX_ITER
        assert not run.converged

    def test_boundary_ends_unconverged(self, data):
        t, y = data
        run = gauss_newton(
            exponential_fit(t, y),
            np.array([1.0, 0.0]),
            is_converged=lambda ev: True,
            boundary=lambda x: x[1] < 0.0,
        )
        assert run.reason is StopReason.BOUNDARY
        assert not run.converged

    def test_projection_is_applied(self, data):
        t, y = data
        run = gauss_newton(
            exponential_fit(t, y),
            np.array([1.0, 0.0]),
            is_converged=lambda ev: True,
            project=lambda x: np.array([x[0], max(x[1], -1.0)]),
        )
        assert run.x[1] >= -1.0

    def test_zero_gradient_is_stationary(self):
        ev = Evaluation(0.0, np.zeros(2), np.eye(2), lambda x: 0.0)
        run = gauss_newton(lambda x: ev, np.zeros(2), is_converged=lambda e: True)
        assert run.reason is StopReason.STATIONARY
        assert run.iterations == 0
        assert run.converged

    def test_newton_decrement(self):
        ev = Evaluation(1.0, np.array([2.0, 0.0]), np.diag([4.0, 1.0]), lambda x: 0.0)
        assert newton_decrement(ev) == pytest.approx(1.0)


class TestInverses:

    def test_robust_inverse_regular(self):
        m = np.array([[2.0, 1.0], [1.0, 3.0]])
        assert_allclose(robust_inverse(m) @ m, np.eye(2), atol=1e-14)

    def test_robust_inverse_singular_warns(self, caplog):
        m = np.array([[1.0, 1.0], [1.0, 1.0]])
        with caplog.at_level(logging.WARNING):
            inverse = robust_inverse(m, "test matrix")
        assert_allclose(inverse, np.linalg.pinv(m))
        assert "test matrix is singular" in caplog.text

    def test_hermitian_pd_inverse(self):
        m = np.array([[2.0, 1j], [-1j, 2.0]])
        inverse = hermitian_pd_inverse(m, "C")
        assert_allclose(inverse @ m, np.eye(2), atol=1e-14)
        assert_allclose(inverse, inverse.conj().T)

    def test_hermitian_pd_inverse_rejects_indefinite(self):
        with pytest.raises(NumericalInstabilityError) as info:
            hermitian_pd_inverse(np.diag([1.0, -1.0]), "C")
        assert info.value.quantity == "C"
