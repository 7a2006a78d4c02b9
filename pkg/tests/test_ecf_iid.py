# tests/test_ecf_iid.py
"""
Tests for ECF estimation of the noise parameters (stage 2).
"""
import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from levy_sysid import noise
from levy_sysid.ecf_iid import (
    c_matrix,
    default_grid,
    ecf_iid_estimate,
    ecf_on_residuals,
    empirical_cf,
    geometric_grid,
    optimal_covariance,
    sandwich_covariance,
    score_mean,
    symmetric_points,
)
from levy_sysid.exceptions import ConfigurationError
from levy_sysid.linear_system import simulate
from levy_sysid.models.ecf_result import Weighting
from levy_sysid.models.frequency_grid import FrequencyGrid
from levy_sysid.models.noise_params import NoiseKind, NoiseParams
from levy_sysid.models.system_params import SystemParams


# ---- moments and matrices ---- #

class TestScores:

    def test_empirical_cf_chunks_agree(self, rng):
        samples = rng.standard_normal(10_001)
        u = np.array([0.3, 1.0, 2.0])
        assert_allclose(empirical_cf(samples, u, chunk=97), empirical_cf(samples, u), atol=1e-13)

    def test_score_mean(self, gaussian, rng):
        samples = rng.standard_normal(5)
        grid = FrequencyGrid(u=(0.5, 1.0))
        expected = np.exp(1j * np.outer(grid.values, samples)).mean(axis=1) - noise.cf(
            gaussian, grid.values
        )
        assert_allclose(score_mean(samples, grid, gaussian), expected)

    def test_score_mean_needs_samples(self, gaussian):
        with pytest.raises(ConfigurationError):
            score_mean(np.zeros(0), FrequencyGrid(u=(1.0,)), gaussian)

    def test_raw_grid_is_validated(self, gaussian):
        with pytest.raises(ConfigurationError):
            score_mean(np.ones(3), np.array([0.0, 1.0]), gaussian)


class TestCMatrix:

    def test_diagonal(self, variance_gamma):
        u = np.array([0.5, 1.0, 2.0])
        c = c_matrix(variance_gamma, u)
        assert_allclose(np.diag(c).real, 1.0 - np.abs(noise.cf(variance_gamma, u)) ** 2)

    def test_hermitian_psd_on_random_grids(self, mixture):
        rng = np.random.default_rng(17)
        skewed = NoiseParams(kind=NoiseKind.VARIANCE_GAMMA, eta=(0.8, 0.5, 0.4))
        for i in range(100):
            model = mixture if i % 2 else skewed
            u = rng.uniform(-6.0, 6.0, size=int(rng.integers(1, 12)))
            c = c_matrix(model, u)
            assert_allclose(c, c.conj().T, atol=1e-15)
            assert np.linalg.eigvalsh(c).min() > -1e-12

    def test_matches_sample_covariance_of_scores(self, variance_gamma):
        u = np.array([0.5, 1.5])
        samples = noise.sample_increments(variance_gamma, 200_000, seed=8)
        e = np.exp(1j * np.outer(samples, u)) - noise.cf(variance_gamma, u)
        sample_cov = e.T @ e.conj() / len(samples)
        assert_allclose(sample_cov, c_matrix(variance_gamma, u), atol=0.01)


class TestCovariances:

    def test_sandwich_with_optimal_weight_is_optimal(self, mixture):
        s = symmetric_points(FrequencyGrid.equally_spaced(6.0, 6))
        g = -noise.cf_grad_eta(mixture, s)
        c = c_matrix(mixture, s) + 1e-10 * np.eye(len(s))
        w = np.linalg.inv(c)
        assert_allclose(sandwich_covariance(g, w, c), optimal_covariance(g, c), rtol=1e-5)

    def test_identity_weight_is_not_better(self, mixture):
        s = symmetric_points(FrequencyGrid.equally_spaced(6.0, 6))
        g = -noise.cf_grad_eta(mixture, s)
        c = c_matrix(mixture, s)
        sandwich = sandwich_covariance(g, np.eye(len(s)), c)
        optimal = optimal_covariance(g, c)
        assert np.linalg.eigvalsh(sandwich - optimal).min() > -1e-8 * np.abs(sandwich).max()


class TestDefaultGrid:

    def test_gaussian_threshold(self, gaussian):
        grid = default_grid(gaussian, size=10)
        assert grid.size == 10
        assert grid.u[-1] == pytest.approx(np.sqrt(2.0 * np.log(20.0)), rel=1e-9)
        assert grid.u[0] == pytest.approx(grid.u[-1] / 10)

    def test_atom_falls_back_with_warning(self, caplog):
        model = NoiseParams(kind=NoiseKind.COMPOUND_POISSON_GAUSSIAN, eta=(1.0, 0.0, 1.0))
        with caplog.at_level(logging.WARNING):
            grid = default_grid(model, size=5)
        assert grid.u[-1] == pytest.approx(50.0 / noise.std(model))
        assert "stays above" in caplog.text


class TestGeometricGrid:

    def test_spans_low_frequencies_up_to_the_threshold(self, mixture):
        grid = geometric_grid(mixture, size=8)
        auto = default_grid(mixture, size=8)
        assert grid.size == 8
        assert grid.u[0] == pytest.approx(0.1 / noise.std(mixture))
        assert grid.u[-1] == pytest.approx(auto.u[-1])
        assert np.all(np.diff(grid.values) > 0)
        ratios = grid.values[1:] / grid.values[:-1]
        assert_allclose(ratios, ratios[0])

    def test_single_point_falls_back_to_threshold(self, gaussian):
        assert geometric_grid(gaussian, size=1).u == default_grid(gaussian, size=1).u


# ---- estimation ---- #

class TestEcfIidEstimate:

    def test_gaussian(self, gaussian):
        samples = noise.sample_increments(gaussian, 20_000, seed=1)
        start = gaussian.with_eta([1.4])
        result = ecf_iid_estimate(samples, default_grid(start), start)
        assert result.converged
        assert result.noise.kind is NoiseKind.GAUSSIAN
        assert result.eta_hat[0] == pytest.approx(1.0, abs=0.03)
        # the ML bound for σ is σ²/2, evaluated at σ̂
        bound = result.eta_hat[0] ** 2 / 2
        assert bound * (1 - 1e-6) <= result.avar_optimal[0, 0] < 1.5 * bound
        assert result.c_matrix.shape == (10, 10)
        assert result.g_matrix.shape == (10, 1)

    def test_mixture(self, mixture):
        samples = noise.sample_increments(mixture, 50_000, seed=4)
        result = ecf_iid_estimate(samples, geometric_grid(mixture, size=8), mixture)
        assert result.converged
        assert_allclose(result.eta_hat, mixture.eta, rtol=0.1)

    @pytest.mark.parametrize("seed", [11, 12, 13, 14, 15])
    def test_mixture_wide_scale_is_recovered(self, mixture, seed):
        samples = noise.sample_increments(mixture, 50_000, seed=seed)
        result = ecf_iid_estimate(samples, geometric_grid(mixture, size=8), mixture)
        assert result.converged
        assert result.eta_hat[2] == pytest.approx(3.0, abs=0.3)
        assert np.all(np.isfinite(result.avar_optimal))

    @pytest.mark.parametrize("seed", [11, 12, 13, 14, 15])
    def test_unidentified_scale_is_not_reported_converged(self, mixture, seed):
        # every equally spaced point lies above 1/σ₂
        samples = noise.sample_increments(mixture, 50_000, seed=seed)
        result = ecf_iid_estimate(samples, default_grid(mixture, size=8), mixture)
        assert not result.converged or abs(result.eta_hat[2] - 3.0) < 0.3

    def test_singular_information_marks_unconverged(self, mixture, caplog):
        samples = noise.sample_increments(mixture, 20_000, seed=7)
        grid = FrequencyGrid(u=(20.0, 30.0, 40.0, 50.0))
        with caplog.at_level(logging.WARNING):
            result = ecf_iid_estimate(samples, grid, mixture)
        assert not result.converged
        assert "not identified" in caplog.text

    def test_variance_gamma_identity_weighting(self, variance_gamma):
        samples = noise.sample_increments(variance_gamma, 50_000, seed=2)
        result = ecf_iid_estimate(
            samples, default_grid(variance_gamma), variance_gamma, weighting=Weighting.IDENTITY
        )
        assert result.weighting is Weighting.IDENTITY
        assert_allclose(result.eta_hat, variance_gamma.eta, atol=0.1)
        assert np.all(np.diag(result.avar_sandwich) >= np.diag(result.avar_optimal) * (1 - 1e-6))

    def test_raw_points_are_sorted_into_grid(self, gaussian, rng):
        samples = rng.standard_normal(2000)
        result = ecf_iid_estimate(samples, np.array([2.0, 0.5, 1.0]), gaussian)
        assert result.grid.u == (0.5, 1.0, 2.0)

    def test_grid_order_does_not_change_the_estimate(self, variance_gamma):
        samples = noise.sample_increments(variance_gamma, 20_000, seed=8)
        grid = default_grid(variance_gamma, size=8)
        shuffled = np.random.default_rng(0).permutation(grid.values)
        ordered = ecf_iid_estimate(samples, grid, variance_gamma)
        permuted = ecf_iid_estimate(samples, shuffled, variance_gamma)
        assert_allclose(permuted.eta_hat, ordered.eta_hat, rtol=0, atol=1e-10)

    def test_repeated_points_are_rejected(self, gaussian):
        with pytest.raises(ConfigurationError):
            ecf_iid_estimate(np.ones(100), np.array([1.0, 0.5, 1.0]), gaussian)

    def test_too_few_points(self, variance_gamma):
        with pytest.raises(ConfigurationError):
            ecf_iid_estimate(np.ones(10), FrequencyGrid(u=(0.5, 1.0)), variance_gamma)

    def test_degenerate_sample_does_not_converge(self, gaussian):
        result = ecf_iid_estimate(np.zeros(1000), default_grid(gaussian), gaussian)
        assert not result.converged


class TestEcfOnResiduals:

    def test_recovers_noise_through_the_system(self, variance_gamma, arma11):
        z = noise.sample_increments(variance_gamma, 30_000, seed=6)
        dy = simulate(arma11, z)
        result = ecf_on_residuals(dy, arma11, default_grid(variance_gamma), variance_gamma)
        assert result.converged
        assert_allclose(result.eta_hat, variance_gamma.eta, atol=0.1)

    def test_burn_in_must_leave_samples(self, variance_gamma, arma11):
        with pytest.raises(ConfigurationError):
            ecf_on_residuals(np.ones(100), arma11, FrequencyGrid(u=(1.0, 2.0, 3.0)), variance_gamma)

    def test_follows_the_system_parameters(self, gaussian, arma11):
        dy = simulate(arma11, noise.sample_increments(gaussian, 30_000, seed=9))
        grid = default_grid(gaussian)

        def sigma_hat(system: SystemParams) -> float:
            return float(ecf_on_residuals(dy, system, grid, gaussian).eta_hat[0])

        at_truth = sigma_hat(arma11)
        assert at_truth == pytest.approx(1.0, abs=0.03)
        # AR pole moved from 0.5 to 0.2: residual variance 1 + 0.3²/(1 − 0.5²)
        moved = sigma_hat(SystemParams(ar=(-0.2,), ma=arma11.ma))
        assert moved / at_truth == pytest.approx(np.sqrt(1.12), abs=0.02)
        nudged = sigma_hat(SystemParams(ar=(-0.501,), ma=arma11.ma))
        assert abs(nudged - at_truth) < 0.005


@pytest.mark.slow
def test_mixture_covariance_matches_formula(mixture):
    grid = geometric_grid(mixture, size=8)
    n, replications = 50_000, 500
    estimates = []
    for seed in range(replications):
        samples = noise.sample_increments(mixture, n, seed=1000 + seed)
        result = ecf_iid_estimate(samples, grid, mixture)
        if result.converged:
            estimates.append(result.eta_hat)
    estimates = np.array(estimates)
    assert len(estimates) >= 0.9 * replications

    s = symmetric_points(grid)
    theory = optimal_covariance(-noise.cf_grad_eta(mixture, s), c_matrix(mixture, s))
    empirical = n * np.cov(estimates, rowvar=False)
    assert_allclose(np.diag(empirical), np.diag(theory), rtol=0.25)


@pytest.mark.slow
def test_median_error_halves_when_n_quadruples(variance_gamma):
    grid = default_grid(variance_gamma)
    medians = []
    for n in (4_000, 16_000, 64_000):
        errors = []
        for seed in range(100):
            samples = noise.sample_increments(variance_gamma, n, seed=700 + seed)
            result = ecf_iid_estimate(samples, grid, variance_gamma)
            errors.append(np.linalg.norm(result.eta_hat - variance_gamma.as_array()))
        medians.append(np.median(errors))
    for coarse, fine in zip(medians, medians[1:]):
        assert fine / coarse == pytest.approx(0.5, rel=0.3)
