# tests/test_monte_carlo.py
"""
Tests for Monte Carlo replication of the pipeline.
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from levy_sysid.exceptions import InsufficientReplicationsError
from levy_sysid.models.experiment_config import ExperimentConfig
from levy_sysid.models.replication_run import ReplicationRun, RunStatus
from levy_sysid.monte_carlo import (
    TheoreticalCovariances,
    derive_seed,
    run_monte_carlo,
    run_replication,
    summarize,
)


def make_config(**overrides) -> ExperimentConfig:
    data = {
        "system": {"ar": [-0.5], "ma": [0.3]},
        "noise": {"kind": "gaussian", "params": {"sigma": 1.0}},
        "n_samples": 3000,
        "replications": 4,
        "seed": 5,
        "grid": {"size": 8},
        "stage3_grid": {"size": 8},
        "estimator": {"init": {"mode": "true"}},
    }
    data.update(overrides)
    return ExperimentConfig.model_validate(data)


def finished_run(index: int, theta=(0.0, 0.0), eta=(1.0,)) -> ReplicationRun:
    run = ReplicationRun(index=index, seed=index)
    run.mark_running()
    run.theta_pe = list(theta)
    run.eta = list(eta)
    run.theta_s3 = list(theta)
    run.mark_completed()
    return run


def failed_run(index: int) -> ReplicationRun:
    run = ReplicationRun(index=index, seed=index)
    run.mark_running()
    run.mark_failed("boom", "pe")
    return run


# ---- seeds ---- #

class TestDeriveSeed:

    def test_deterministic_and_distinct(self):
        seeds = [derive_seed(42, i) for i in range(1000)]
        assert seeds == [derive_seed(42, i) for i in range(1000)]
        assert len(set(seeds)) == 1000
        assert all(0 <= s < 2**64 for s in seeds)

    def test_depends_on_master(self):
        assert derive_seed(1, 0) != derive_seed(2, 0)


# ---- single replications ---- #

class TestRunReplication:

    def test_success(self):
        run = run_replication(make_config(), 0)
        assert run.status is RunStatus.COMPLETED
        assert run.seed == derive_seed(5, 0)
        assert len(run.theta_pe) == 2 and len(run.eta) == 1 and len(run.theta_s3) == 2
        assert run.get_duration() is not None

    def test_failure_is_recorded(self):
        run = run_replication(make_config(system={"ar": [-1.5], "ma": [0.3]}), 2)
        assert run.status is RunStatus.FAILED
        assert run.failed_stage == "simulate"
        assert run.failure_reason


# ---- summary ---- #

class TestSummarize:

    def test_requires_ninety_percent(self):
        config = make_config()
        runs = [finished_run(i) for i in range(8)] + [failed_run(8), failed_run(9)]
        with pytest.raises(InsufficientReplicationsError) as exc_info:
            summarize(config, runs)
        assert exc_info.value.exit_code == 3

    def test_requires_a_success(self):
        with pytest.raises(InsufficientReplicationsError):
            summarize(make_config(), [failed_run(0)])

    def test_covariances_scaled_by_effective_samples(self):
        config = make_config()
        rng = np.random.default_rng(0)
        runs = [
            finished_run(i, theta=tuple(rng.standard_normal(2)), eta=(1.0 + 0.1 * i,))
            for i in range(10)
        ]
        report = summarize(config, runs)
        assert report.n_effective == 2500
        pe = np.array([run.theta_pe for run in runs])
        assert_allclose(report.comparisons["pe"].empirical, 2500 * np.cov(pe, rowvar=False))
        assert set(report.comparisons) >= {"pe", "ecf", "stage3", "ml"}
        assert report.cross_covariance_eta_theta.shape == (1, 2)
        assert_allclose(report.efficiency_ratio, [1.0, 1.0])
        assert report.timing.replications == 10

    def test_single_success_gives_zero_covariance(self):
        report = summarize(make_config(), [finished_run(0)])
        assert_allclose(report.comparisons["pe"].empirical, np.zeros((2, 2)))
        assert report.cross_covariance_eta_theta is None

    def test_few_runs_warn(self, caplog):
        summarize(make_config(), [finished_run(i) for i in range(3)])
        assert "at least 50" in caplog.text


class TestTheoreticalCovariances:

    def test_ar1_gaussian(self):
        config = make_config(system={"ar": [-0.5], "ma": []})
        theory = TheoreticalCovariances(config)
        assert theory.sigma2 == pytest.approx(1.0)
        assert_allclose(theory.sigma_p, [[0.75]], rtol=1e-8)
        assert theory.mu == pytest.approx(1.0, rel=1e-6)
        assert_allclose(theory.ml, theory.sigma_p, rtol=1e-5)
        assert theory.kappa <= theory.mu * (1 + 1e-6)

    def test_no_density_omits_ml(self):
        config = make_config(
            noise={"kind": "variance_gamma", "params": {"sigma": 1.0, "nu": 1.0, "theta": 0.0}}
        )
        theory = TheoreticalCovariances(config)
        assert theory.mu is None and theory.ml is None
        assert theory.ecf.shape == (3, 3)

    def test_ordering_chain_on_dense_grid(self):
        config = make_config(
            noise={
                "kind": "gaussian_mixture",
                "params": {"weights": [0.9, 0.1], "sigmas": [0.1, 3.0]},
            },
            grid={"mode": "geometric", "size": 8},
            stage3_grid={"size": 40},
        )
        theory = TheoreticalCovariances(config)
        assert theory.kappa <= theory.mu * (1 + 1e-6)
        scale = np.max(np.linalg.eigvalsh(theory.sigma_p))
        # ML ⪯ stage 3 ⪯ PE in PSD order
        for upper, lower in ((theory.sigma_p, theory.stage3), (theory.stage3, theory.ml)):
            assert np.min(np.linalg.eigvalsh(upper - lower)) >= -1e-6 * scale
        assert np.all(np.isfinite(theory.ecf))


# ---- full study ---- #

class TestRunMonteCarlo:

    @pytest.mark.asyncio
    async def test_independent_of_thread_count(self):
        config = make_config()
        single = await run_monte_carlo(config, threads=1)
        pooled = await run_monte_carlo(config, threads=3)
        assert single.to_document() == pooled.to_document()
        assert single.replications_succeeded == 4
        assert [run.index for run in pooled.runs] == [0, 1, 2, 3]
        assert pooled.timing.threads == 3

    @pytest.mark.asyncio
    async def test_replication_override(self):
        report = await run_monte_carlo(make_config(), replications=2)
        assert report.replications_requested == 2
        assert report.config["replications"] == 2

    @pytest.mark.asyncio
    async def test_rejects_bad_thread_count(self):
        with pytest.raises(ValueError):
            await run_monte_carlo(make_config(), threads=0)

    @pytest.mark.asyncio
    async def test_all_failures(self):
        with pytest.raises(InsufficientReplicationsError):
            await run_monte_carlo(make_config(system={"ar": [-1.5], "ma": [0.3]}))


# ---- acceptance (long running) ---- #

@pytest.mark.slow
class TestAcceptance:

    @pytest.mark.asyncio
    async def test_ar1_prediction_error_covariance(self):
        config = make_config(
            system={"ar": [-0.5], "ma": []}, n_samples=20_500, replications=500
        )
        report = await run_monte_carlo(config, threads=4)
        ratio = report.comparisons["pe"].diagonal_ratio[0]
        assert 0.75 <= ratio <= 1.25

    @pytest.mark.asyncio
    async def test_mixture_efficiency(self, config_dir):
        config = ExperimentConfig.load(config_dir / "arma11_mixture.json")
        report = await run_monte_carlo(config, threads=4)
        assert all(0.75 <= r <= 1.25 for r in report.comparisons["ecf"].diagonal_ratio)
        assert all(0.75 <= r <= 1.25 for r in report.comparisons["stage3"].diagonal_ratio)
        assert max(report.efficiency_ratio) <= 0.5
        # η̂ and θ̂ from stage 3 are asymptotically uncorrelated
        assert np.all(np.abs(report.cross_covariance_eta_theta) <= 0.1)

    @pytest.mark.asyncio
    async def test_gaussian_efficiency(self, config_dir):
        config = ExperimentConfig.load(config_dir / "arma11_gaussian.json")
        report = await run_monte_carlo(config, threads=4)
        assert all(0.85 <= r <= 1.15 for r in report.efficiency_ratio)
