# levy_sysid/pipeline.py
"""
One pass of the three-stage identification method on simulated data:

1. prediction-error estimate θ̂ with R̂_P*,
2. ECF estimate η̂ from the residuals ε(θ̂),
3. ECF re-estimate θ̂̂ from sensitivity-weighted scores with η̂ frozen.
"""
import logging
from typing import Callable, Optional, TypeVar

import numpy as np

from levy_sysid import noise
from levy_sysid.ecf_iid import default_grid, ecf_on_residuals, geometric_grid
from levy_sysid.ecf_system import stage3_estimate
from levy_sysid.exceptions import LevySysIdError, PipelineStageError
from levy_sysid.linear_system import simulate
from levy_sysid.models.ecf_result import Weighting
from levy_sysid.models.experiment_config import ExperimentConfig, GridConfig, GridMode, InitMode
from levy_sysid.models.frequency_grid import FrequencyGrid
from levy_sysid.models.noise_params import NoiseParams
from levy_sysid.models.pipeline_result import PipelineResult
from levy_sysid.models.stage3_result import ScoreKind
from levy_sysid.models.system_params import SystemParams
from levy_sysid.pe_estimator import long_ar_init, pe_estimate

logger = logging.getLogger(__name__)

T = TypeVar("T")


def _stage(name: str, fn: Callable[[], T]) -> T:
    try:
        return fn()
    except PipelineStageError:
        raise
    except (LevySysIdError, ValueError, np.linalg.LinAlgError) as e:
        logger.error(f"Stage '{name}' failed: {e}")
        raise PipelineStageError(name, e) from e


def resolve_grid(grid_config: GridConfig, model: NoiseParams) -> FrequencyGrid:
    """Explicit points, or the automatic or geometric rule evaluated at ``model``."""
    if grid_config.mode is GridMode.POINTS:
        return FrequencyGrid(u=tuple(grid_config.points))
    if grid_config.mode is GridMode.GEOMETRIC:
        return geometric_grid(model, size=grid_config.size)
    return default_grid(model, size=grid_config.size)


def initial_system(config: ExperimentConfig, dy: np.ndarray) -> SystemParams:
    init = config.estimator.init
    if init.mode is InitMode.TRUE:
        return config.system
    if init.mode is InitMode.EXPLICIT:
        return SystemParams(ar=tuple(init.ar), ma=tuple(init.ma))
    return long_ar_init(
        dy,
        config.system.p_a,
        config.system.p_c,
        order=init.long_ar_order,
        rho_stab=config.estimator.rho_stab,
    )


def simulate_data(config: ExperimentConfig, seed: int) -> np.ndarray:
    """Output increments Δy driven by ``n_samples`` noise increments."""
    increments = noise.sample_increments(config.noise, config.n_samples, seed)
    return simulate(config.system, increments, config.estimator.rho_stab)


def run_pipeline(config: ExperimentConfig, seed: Optional[int] = None) -> PipelineResult:
    """
    Simulate with ``seed`` (default ``config.seed``) and run the three stages.

    Errors are re-raised as PipelineStageError tagged with the failing
    stage; non-convergence is only recorded in the results.
    """
    seed = config.seed if seed is None else seed
    opts = config.estimator

    eta_init = _stage("config", lambda: config.eta_init_params().check_domain())
    dy = _stage("simulate", lambda: simulate_data(config, seed))
    logger.debug(f"Simulated {len(dy)} samples with seed {seed}")

    theta0 = _stage("init", lambda: initial_system(config, dy))
    pe = _stage("pe", lambda: pe_estimate(dy, theta0, opts))
    logger.info(f"[seed {seed}] stage 1 done: theta={pe.theta_hat}")

    grid = _stage("grid", lambda: resolve_grid(config.grid, eta_init))
    ecf = _stage(
        "ecf",
        lambda: ecf_on_residuals(
            dy,
            pe.system,
            grid,
            eta_init,
            weighting=Weighting.OPTIMAL_C,
            burn_in=opts.burn_in,
            rho_stab=opts.rho_stab,
            max_iter=opts.max_iter,
        ),
    )
    logger.info(f"[seed {seed}] stage 2 done: eta={ecf.eta_hat}")

    grid3 = _stage("grid", lambda: resolve_grid(config.effective_stage3_grid, eta_init))

    def third(kind: ScoreKind):
        return stage3_estimate(
            dy,
            pe.system,
            ecf.noise,
            grid3,
            pe.r_p_star,
            score_kind=kind,
            burn_in=opts.burn_in,
            rho_stab=opts.rho_stab,
            max_iter=opts.max_iter,
        )

    stage3 = _stage("stage3", lambda: third(ScoreKind.SENSITIVITY))
    logger.info(f"[seed {seed}] stage 3 done: theta={stage3.theta_hat2}")

    plain = None
    if opts.baseline_plain_scores:
        plain = _stage("stage3_plain", lambda: third(ScoreKind.PLAIN))

    return PipelineResult(seed=seed, pe=pe, ecf=ecf, stage3=stage3, stage3_plain=plain)
