# levy_sysid/pe_estimator.py
"""
Stage 1: prediction-error estimation of θ.

Minimises V(θ) = ½ Σ_{n > burn-in} ε_n(θ)² by damped Gauss-Newton with the
information-matrix curvature Σ ε_θ ε_θᵀ. The estimate of R_P* and
Σ_P = σ̂² (R̂_P*)⁻¹ are taken at θ̂.
"""
import logging
from typing import NamedTuple, Optional

import numpy as np
from scipy import linalg

from levy_sysid.exceptions import ConfigurationError, StabilityError
from levy_sysid.linear_system import innovations, lag, project_stable, require_admissible
from levy_sysid.models.experiment_config import EstimatorConfig
from levy_sysid.models.pe_result import PeResult
from levy_sysid.models.system_params import SystemParams
from levy_sysid.optim import Evaluation, gauss_newton, robust_inverse

logger = logging.getLogger(__name__)


class PeCost(NamedTuple):
    value: float
    grad: np.ndarray


def _check_length(n: int, burn_in: int) -> None:
    if n <= burn_in:
        raise ConfigurationError("burn_in", f"{burn_in} leaves no samples out of {n}")


def pe_cost(
    sys: SystemParams,
    dy: np.ndarray,
    burn_in: int = 500,
    rho_stab: float = 0.02,
) -> PeCost:
    """½ Σ ε_n² and its gradient Σ ε_θ ε_n over the samples after burn-in."""
    dy = np.asarray(dy, dtype=float)
    _check_length(len(dy), burn_in)
    bundle = innovations(sys, dy, order=1, rho_stab=rho_stab).drop(burn_in)
    eps = bundle.eps
    return PeCost(value=0.5 * float(eps @ eps), grad=bundle.eps_grad.T @ eps)


def long_ar_init(
    dy: np.ndarray,
    p_a: int,
    p_c: int,
    order: int = 20,
    rho_stab: float = 0.02,
) -> SystemParams:
    """
    Two-step least-squares starting point.

    A long AR model gives residuals ê; Δy_n is then regressed on −Δy_{n−i}
    and ê_{n−j}. The result is projected into the stability region.
    """
    dy = np.asarray(dy, dtype=float)
    order = max(1, min(order, len(dy) // 10))

    def fit(columns, start):
        design = np.column_stack(columns)[start:]
        coef, *_ = linalg.lstsq(design, dy[start:])
        return coef

    if p_c == 0:
        coef = fit([-lag(dy, i) for i in range(1, p_a + 1)], p_a) if p_a else np.zeros(0)
        return project_stable(SystemParams(ar=tuple(coef)), rho_stab)

    long_coef = fit([-lag(dy, i) for i in range(1, order + 1)], order)
    design = np.column_stack([-lag(dy, i) for i in range(1, order + 1)])
    resid = dy - design @ long_coef
    resid[:order] = 0.0

    columns = [-lag(dy, i) for i in range(1, p_a + 1)]
    columns += [lag(resid, j) for j in range(1, p_c + 1)]
    coef = fit(columns, order + max(p_a, p_c))
    init = SystemParams(ar=tuple(coef[:p_a]), ma=tuple(coef[p_a:]))
    logger.debug(f"Long-AR({order}) initial estimate: {init.theta}")
    return project_stable(init, rho_stab)


def pe_estimate(
    dy: np.ndarray,
    init: SystemParams,
    opts: Optional[EstimatorConfig] = None,
) -> PeResult:
    """
    Prediction-error estimate of θ started at ``init``.

    Non-convergence is reported through ``converged``; it never raises.
    """
    opts = opts or EstimatorConfig()
    dy = np.asarray(dy, dtype=float)
    n, burn_in, rho = len(dy), opts.burn_in, opts.rho_stab
    _check_length(n, burn_in)
    if n <= 10 * init.p:
        raise ConfigurationError("n_samples", f"N={n} must exceed 10·p = {10 * init.p}")
    require_admissible(init, rho)

    def cost_only(theta: np.ndarray) -> float:
        try:
            eps = innovations(init.with_theta(theta), dy, order=0, rho_stab=rho).eps[burn_in:]
        except StabilityError:
            return np.inf
        return 0.5 * float(eps @ eps)

    def evaluate(theta: np.ndarray) -> Evaluation:
        bundle = innovations(init.with_theta(theta), dy, order=1, rho_stab=rho).drop(burn_in)
        eps, jac = bundle.eps, bundle.eps_grad
        return Evaluation(
            value=0.5 * float(eps @ eps),
            grad=jac.T @ eps,
            curvature=jac.T @ jac,
            objective=cost_only,
        )

    def project(theta: np.ndarray) -> np.ndarray:
        return project_stable(init.with_theta(theta), rho).theta

    def is_converged(ev: Evaluation) -> bool:
        # tol_g·N in units of the residual variance at the iterate
        sigma2 = 2.0 * ev.value / (n - burn_in)
        return float(np.max(np.abs(ev.grad), initial=0.0)) <= opts.tol_g * n * sigma2

    run = gauss_newton(
        evaluate,
        init.theta,
        is_converged=is_converged,
        project=project,
        max_iter=opts.max_iter,
        label="pe_estimate",
    )

    system = init.with_theta(run.x)
    bundle = innovations(system, dy, order=1, rho_stab=rho).drop(burn_in)
    n_eff = bundle.n
    r_p_star = bundle.eps_grad.T @ bundle.eps_grad / n_eff
    sigma2 = float(bundle.eps @ bundle.eps) / n_eff
    sigma_p = sigma2 * robust_inverse(r_p_star, "R_P*") if system.p else np.zeros((0, 0))

    logger.info(
        f"PE estimate {system.theta} after {run.iterations} iterations "
        f"(converged={run.converged}, sigma2={sigma2:.6g})"
    )
    return PeResult(
        system=system,
        theta_hat=system.theta,
        cost=run.evaluation.value,
        r_p_star=r_p_star,
        sigma2_hat=sigma2,
        sigma_p=sigma_p,
        grad_norm=float(np.max(np.abs(run.evaluation.grad), initial=0.0)),
        iterations=run.iterations,
        converged=run.converged,
    )
