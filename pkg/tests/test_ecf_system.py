# tests/test_ecf_system.py
"""
Tests for the sensitivity-weighted ECF re-estimation of θ (stage 3).
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from levy_sysid import noise
from levy_sysid.ecf_iid import c_matrix, default_grid, regularize, symmetric_points
from levy_sysid.ecf_system import (
    continuum_limit_kappa,
    fisher_location,
    kappa_value,
    kronecker_weight,
    linearized_error,
    psi_vector,
    stage3_estimate,
    stage3_moments,
    stage3_scores,
)
from levy_sysid.exceptions import ConfigurationError, UnsupportedOperationError
from levy_sysid.linear_system import sensitivity_covariance, simulate
from levy_sysid.models.frequency_grid import FrequencyGrid
from levy_sysid.models.noise_params import NoiseKind, NoiseParams
from levy_sysid.models.stage3_result import ScoreKind
from levy_sysid.models.system_params import SystemParams
from levy_sysid.optim import hermitian_pd_inverse


def _data(system, model, n, seed):
    return simulate(system, noise.sample_increments(model, n, seed=seed))


def _random_hermitian_pd(rng, m):
    a = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return a @ a.conj().T + m * np.eye(m)


# ---- weight ---- #

class TestKroneckerWeight:

    def test_factorwise_inverse_matches_dense(self):
        rng = np.random.default_rng(5)
        for m in range(1, 5):
            for p in range(1, 5):
                c = _random_hermitian_pd(rng, m)
                b = rng.standard_normal((p, p))
                r = b @ b.T + p * np.eye(p)
                weight = kronecker_weight(c, r)
                h = rng.standard_normal(m * p) + 1j * rng.standard_normal(m * p)
                dense = np.linalg.solve(weight.dense(), h)
                assert_allclose(weight.apply_inverse(h), dense, rtol=1e-8, atol=1e-12)
                assert weight.quadratic(h) == pytest.approx(
                    float(np.vdot(h, dense).real), rel=1e-8
                )

    def test_matrix_and_vector_forms_agree(self):
        rng = np.random.default_rng(6)
        weight = kronecker_weight(_random_hermitian_pd(rng, 3), np.diag([1.0, 2.0]))
        h = rng.standard_normal((3, 2)) + 0j
        assert_allclose(weight.apply_inverse(h).ravel(), weight.apply_inverse(h.ravel()))

    def test_shape_checks(self):
        with pytest.raises(ConfigurationError):
            kronecker_weight(np.eye(2), np.zeros((0, 0)))
        weight = kronecker_weight(np.eye(2), np.eye(2))
        with pytest.raises(ConfigurationError):
            weight.apply_inverse(np.ones(5))
        with pytest.raises(ConfigurationError):
            weight.apply_inverse(np.ones((2, 3)))
        with pytest.raises(ConfigurationError):
            weight.quadratic(np.ones(3))

    def test_eigenvalues_are_factor_products(self):
        rng = np.random.default_rng(7)
        c = _random_hermitian_pd(rng, 4)
        b = rng.standard_normal((3, 3))
        r = b @ b.T + np.eye(3)
        weight = kronecker_weight(c, r)
        products = np.outer(np.linalg.eigvalsh(c), np.linalg.eigvalsh(r)).ravel()
        assert_allclose(np.linalg.eigvalsh(weight.dense()), np.sort(products), rtol=1e-9)


# ---- scores and moments ---- #

class TestScores:

    @pytest.fixture
    def dy(self, arma11, variance_gamma):
        return _data(arma11, variance_gamma, 3000, seed=12)

    def test_score_layout_and_mean(self, dy, arma11, variance_gamma):
        grid = FrequencyGrid(u=(0.5, 1.0, 2.0))
        out = stage3_scores(dy, arma11, variance_gamma, grid)
        assert out.scores.shape == (2500, 3 * arma11.p)
        mom = stage3_moments(dy, arma11, variance_gamma, grid, order=0)
        assert_allclose(out.mean.reshape(3, arma11.p), mom.mean, atol=1e-12)

    def test_jacobian_matches_finite_differences(self, dy, arma11, variance_gamma):
        points = np.array([0.5, -0.5, 1.5])
        mom = stage3_moments(dy, arma11, variance_gamma, points, order=2)
        step = 1e-6
        for l, e in enumerate(np.eye(arma11.p)):
            plus = stage3_moments(
                dy, arma11.with_theta(arma11.theta + step * e), variance_gamma, points, order=0
            ).mean
            minus = stage3_moments(
                dy, arma11.with_theta(arma11.theta - step * e), variance_gamma, points, order=0
            ).mean
            assert_allclose(mom.jac_full[:, :, l], (plus - minus) / (2 * step), atol=1e-6)

    def test_needs_system_parameters(self, variance_gamma):
        with pytest.raises(ConfigurationError):
            stage3_scores(np.ones(1000), SystemParams(), variance_gamma, FrequencyGrid(u=(1.0,)))


# ---- κ and μ ---- #

class TestKappa:

    def test_fisher_location_gaussian(self):
        for sigma in (0.5, 1.0, 2.0):
            model = NoiseParams(kind=NoiseKind.GAUSSIAN, eta=(sigma,))
            assert fisher_location(model) == pytest.approx(1.0 / sigma**2, rel=1e-6)

    def test_fisher_location_needs_density(self, variance_gamma):
        with pytest.raises(UnsupportedOperationError):
            fisher_location(variance_gamma)

    def test_kappa_is_real_positive(self, mixture):
        s = symmetric_points(default_grid(mixture, size=6))
        c_inv = hermitian_pd_inverse(regularize(c_matrix(mixture, s)), "C")
        assert kappa_value(mixture, s, c_inv) > 0
        assert psi_vector(mixture, s).shape == (12,)

    def test_continuum_limit_gaussian(self, gaussian):
        study = continuum_limit_kappa(gaussian, [5, 10, 20, 40])
        assert study.conditioning_ok
        assert study.mu == pytest.approx(1.0, rel=1e-6)
        assert 0.9 <= study.limit <= 1.0 + 1e-6

    def test_continuum_limit_mixture(self, mixture):
        study = continuum_limit_kappa(mixture, [5, 10, 20, 40])
        kappa = np.asarray(study.kappa)
        assert np.all(np.diff(kappa) >= -1e-7 * kappa[1:])
        assert 0.8 * study.mu <= study.limit <= study.mu * (1 + 1e-6)

    def test_continuum_needs_grid_sizes(self, gaussian):
        with pytest.raises(ConfigurationError):
            continuum_limit_kappa(gaussian, [])


# ---- estimation ---- #

class TestStage3Estimate:

    def test_mixture(self, arma11, mixture):
        dy = _data(arma11, mixture, 20_000, seed=21)
        r_p = sensitivity_covariance(arma11, noise.moments(mixture).variance)
        start = arma11.with_theta(arma11.theta + 0.05)
        result = stage3_estimate(dy, start, mixture, default_grid(mixture, size=20), r_p)
        assert result.converged
        assert_allclose(result.theta_hat2, arma11.theta, atol=0.03)
        assert result.efficiency_ratio_vs_pe > 2.0
        assert_allclose(result.avar_stage3, np.linalg.inv(r_p) / result.kappa, rtol=1e-8)
        assert result.kappa <= result.mu * (1 + 1e-6)

    def test_gaussian_matches_prediction_error(self, arma11, gaussian):
        dy = _data(arma11, gaussian, 20_000, seed=22)
        r_p = sensitivity_covariance(arma11, 1.0)
        result = stage3_estimate(dy, arma11, gaussian, default_grid(gaussian), r_p)
        assert result.converged
        assert 0.8 <= result.efficiency_ratio_vs_pe <= 1.0 + 1e-6
        assert_allclose(result.theta_hat2, arma11.theta, atol=0.05)

    def test_plain_baseline(self, arma11, mixture):
        dy = _data(arma11, mixture, 20_000, seed=23)
        r_p = sensitivity_covariance(arma11, noise.moments(mixture).variance)
        result = stage3_estimate(
            dy, arma11, mixture, default_grid(mixture, size=10), r_p, score_kind=ScoreKind.PLAIN
        )
        assert result.score_kind is ScoreKind.PLAIN
        assert np.all(np.isfinite(result.theta_hat2))
        assert np.all(np.linalg.eigvalsh(result.avar_stage3) > 0)

    def test_r_p_shape_must_match(self, arma11, gaussian):
        dy = _data(arma11, gaussian, 2000, seed=1)
        with pytest.raises(ConfigurationError):
            stage3_estimate(dy, arma11, gaussian, default_grid(gaussian), np.eye(3))

    def test_needs_system_parameters(self, gaussian):
        with pytest.raises(ConfigurationError):
            stage3_estimate(np.ones(1000), SystemParams(), gaussian, default_grid(gaussian),
                            np.zeros((0, 0)))


@pytest.mark.slow
def test_linearized_error_tracks_estimation_error(arma11, mixture):
    grid = default_grid(mixture, size=20)
    r_p = sensitivity_covariance(arma11, noise.moments(mixture).variance)
    actual, predicted = [], []
    for seed in range(30):
        dy = _data(arma11, mixture, 20_000, seed=400 + seed)
        result = stage3_estimate(dy, arma11, mixture, grid, r_p)
        actual.append(result.theta_hat2 - arma11.theta)
        predicted.append(linearized_error(dy, arma11, mixture, grid, r_p))
    actual, predicted = np.array(actual), np.array(predicted)
    for j in range(arma11.p):
        assert np.corrcoef(actual[:, j], predicted[:, j])[0, 1] > 0.9
