# levy_sysid/monte_carlo.py
"""
Monte Carlo replication of the three-stage pipeline.

Replication i runs on seed ``derive_seed(master, i)`` in a thread pool and
results are merged in index order, so the report does not depend on the
number of worker threads. The empirical covariances (scaled by the number
of samples after burn-in) are set against the asymptotic ones evaluated at
the true parameters.
"""
import asyncio
import functools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional

import numpy as np

from levy_sysid import noise
from levy_sysid.ecf_iid import c_matrix, optimal_covariance, regularize, symmetric_points
from levy_sysid.ecf_system import fisher_location, kappa_value
from levy_sysid.exceptions import (
    InsufficientReplicationsError,
    LevySysIdError,
    PipelineStageError,
    UnsupportedOperationError,
)
from levy_sysid.linear_system import sensitivity_covariance
from levy_sysid.models.experiment_config import ExperimentConfig
from levy_sysid.models.mc_report import CovarianceComparison, McReport, TimingSummary
from levy_sysid.models.replication_run import ReplicationRun
from levy_sysid.optim import hermitian_pd_inverse, robust_inverse
from levy_sysid.pipeline import resolve_grid, run_pipeline

logger = logging.getLogger(__name__)

REQUIRED_FRACTION = 0.9
MIN_REPLICATIONS = 50

_MASK64 = (1 << 64) - 1


def derive_seed(master: int, index: int) -> int:
    """SplitMix64 output for state ``master`` advanced ``index + 1`` times."""
    z = (int(master) + (int(index) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def run_replication(config: ExperimentConfig, index: int) -> ReplicationRun:
    """Run replication ``index``; failures are recorded, never raised."""
    run = ReplicationRun(index=index, seed=derive_seed(config.seed, index))
    run.mark_running()
    try:
        result = run_pipeline(config, seed=run.seed)
    except PipelineStageError as e:
        logger.warning(f"Replication {index} failed in stage '{e.stage}': {e.cause}")
        run.mark_failed(str(e.cause), e.stage)
        return run

    run.theta_pe = [float(v) for v in result.pe.theta_hat]
    run.eta = [float(v) for v in result.ecf.eta_hat]
    run.theta_s3 = [float(v) for v in result.stage3.theta_hat2]
    if result.stage3_plain is not None:
        run.theta_plain = [float(v) for v in result.stage3_plain.theta_hat2]
    run.converged = result.converged
    run.mark_completed()
    return run


def _empirical(samples: np.ndarray, n_eff: int) -> np.ndarray:
    if samples.shape[0] < 2:
        return np.zeros((samples.shape[1], samples.shape[1]))
    cov = np.atleast_2d(np.cov(samples, rowvar=False, ddof=1)) * n_eff
    return 0.5 * (cov + cov.T)


def _compare(
    name: str, labels: List[str], empirical: np.ndarray, theoretical: Optional[np.ndarray]
) -> CovarianceComparison:
    ratio = None
    if theoretical is not None:
        ratio = [float(e / t) for e, t in zip(np.diag(empirical), np.diag(theoretical))]
    return CovarianceComparison(
        estimator=name,
        labels=labels,
        empirical=empirical,
        theoretical=theoretical,
        diagonal_ratio=ratio,
    )


class TheoreticalCovariances:
    """Asymptotic covariances of the three stages at the true parameters."""

    def __init__(self, config: ExperimentConfig):
        model, system = config.noise, config.system
        self.sigma2 = noise.moments(model).variance
        self.r_p_star = sensitivity_covariance(system, self.sigma2)
        self.r_inv = robust_inverse(self.r_p_star, "R_P*")
        self.sigma_p = self.sigma2 * self.r_inv

        eta_init = config.eta_init_params()
        s2 = symmetric_points(resolve_grid(config.grid, eta_init))
        self.ecf = optimal_covariance(-noise.cf_grad_eta(model, s2), c_matrix(model, s2))

        s3 = symmetric_points(resolve_grid(config.effective_stage3_grid, eta_init))
        c_inv = hermitian_pd_inverse(regularize(c_matrix(model, s3)), "C")
        self.kappa = kappa_value(model, s3, c_inv)
        self.stage3 = self.r_inv / self.kappa

        self.mu: Optional[float] = None
        self.ml: Optional[np.ndarray] = None
        try:
            self.mu = fisher_location(model)
            self.ml = self.r_inv / self.mu
        except UnsupportedOperationError:
            logger.info(f"No density for {model.kind.value}; ML bound omitted")


def _theory(config: ExperimentConfig) -> Optional[TheoreticalCovariances]:
    try:
        return TheoreticalCovariances(config)
    except (LevySysIdError, np.linalg.LinAlgError) as e:
        logger.warning(f"Theoretical covariances unavailable: {e}")
        return None


def summarize(
    config: ExperimentConfig, runs: List[ReplicationRun], threads: int = 1
) -> McReport:
    """Build the report from finished replication runs (index order)."""
    requested = len(runs)
    done = [run for run in runs if run.succeeded]
    if not done or len(done) < REQUIRED_FRACTION * requested:
        raise InsufficientReplicationsError(len(done), requested, REQUIRED_FRACTION)
    if len(done) < MIN_REPLICATIONS:
        logger.warning(
            f"Only {len(done)} successful replications; covariance comparisons "
            f"need at least {MIN_REPLICATIONS}"
        )

    n_eff = config.n_samples - config.estimator.burn_in
    theta_labels = config.system.labels()
    eta_labels = config.noise.labels()
    pe = np.array([run.theta_pe for run in done])
    eta = np.array([run.eta for run in done])
    s3 = np.array([run.theta_s3 for run in done])

    emp_pe = _empirical(pe, n_eff)
    emp_eta = _empirical(eta, n_eff)
    emp_s3 = _empirical(s3, n_eff)
    theory = _theory(config)

    comparisons: Dict[str, CovarianceComparison] = {
        "pe": _compare("pe", theta_labels, emp_pe, theory and theory.sigma_p),
        "ecf": _compare("ecf", eta_labels, emp_eta, theory and theory.ecf),
        "stage3": _compare("stage3", theta_labels, emp_s3, theory and theory.stage3),
    }
    if theory is not None and theory.ml is not None:
        comparisons["ml"] = _compare("stage3_vs_ml", theta_labels, emp_s3, theory.ml)
    plain = [run.theta_plain for run in done if run.theta_plain is not None]
    if plain and len(plain) == len(done):
        comparisons["stage3_plain"] = _compare(
            "stage3_plain", theta_labels, _empirical(np.array(plain), n_eff), None
        )

    cross = None
    if len(done) >= 2:
        eta_c = eta - eta.mean(axis=0)
        s3_c = s3 - s3.mean(axis=0)
        cross = n_eff * eta_c.T @ s3_c / (len(done) - 1)

    durations = [d for d in (run.get_duration() for run in runs) if d is not None]
    timing = TimingSummary(
        replications=len(durations),
        total_seconds=float(sum(durations)),
        min_seconds=float(min(durations, default=0.0)),
        mean_seconds=float(np.mean(durations)) if durations else 0.0,
        max_seconds=float(max(durations, default=0.0)),
        threads=threads,
    )

    with np.errstate(divide="ignore", invalid="ignore"):
        efficiency = [float(r) for r in np.diag(emp_s3) / np.diag(emp_pe)]

    return McReport(
        config=config.model_dump(mode="json"),
        n_samples=config.n_samples,
        n_effective=n_eff,
        replications_requested=requested,
        replications_succeeded=len(done),
        theta_labels=theta_labels,
        eta_labels=eta_labels,
        runs=runs,
        comparisons=comparisons,
        efficiency_ratio=efficiency,
        theoretical_efficiency_ratio=(
            1.0 / (theory.kappa * theory.sigma2) if theory is not None else None
        ),
        cross_covariance_eta_theta=cross,
        kappa=theory.kappa if theory is not None else None,
        mu=theory.mu if theory is not None else None,
        sigma2=theory.sigma2 if theory is not None else None,
        timing=timing,
    )


async def run_monte_carlo(
    config: ExperimentConfig,
    threads: int = 1,
    replications: Optional[int] = None,
) -> McReport:
    """
    Run ``replications`` (default ``config.replications``) seeded pipeline
    passes on ``threads`` workers and summarise them.

    Raises:
        InsufficientReplicationsError: fewer than 90 % of the runs succeeded
    """
    if threads < 1:
        raise ValueError(f"threads must be positive, got {threads}")
    if replications is not None:
        config = config.model_copy(update={"replications": int(replications)})
    count = config.replications
    logger.info(f"Starting {count} replications on {threads} thread(s), master seed {config.seed}")

    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=threads) as pool:
        tasks = [
            loop.run_in_executor(pool, functools.partial(run_replication, config, i))
            for i in range(count)
        ]
        runs = list(await asyncio.gather(*tasks))

    failed = sum(1 for run in runs if not run.succeeded)
    logger.info(f"Finished {count} replications ({failed} failed)")
    return summarize(config, runs, threads=threads)
