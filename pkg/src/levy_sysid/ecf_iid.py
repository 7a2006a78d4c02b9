# levy_sysid/ecf_iid.py
"""
Stage 2: empirical characteristic function estimation of η.

Scores are h(u, η) = e^{iur} − φ(u, η) with covariance
C_{kl} = φ(u_k − u_l) − φ(u_k) φ(−u_l). For real parameters the estimator
works on the symmetric point set (u_1..u_M, −u_1..−u_M): on that set the
Hermitian form h̄*K⁻¹h̄ coincides with the real-stacked moment form, so
(G*C⁻¹G)⁻¹ is the exact asymptotic covariance and is real.
"""
import logging
from typing import Optional, Union

import numpy as np
from scipy import optimize

from levy_sysid import noise
from levy_sysid.exceptions import (
    ConfigurationError,
    LevySysIdError,
    ParameterDomainError,
)
from levy_sysid.linear_system import innovations
from levy_sysid.models.ecf_result import EcfIidResult, Weighting
from levy_sysid.models.frequency_grid import FrequencyGrid
from levy_sysid.models.noise_params import NoiseParams
from levy_sysid.models.system_params import SystemParams
from levy_sysid.optim import (
    Evaluation,
    gauss_newton,
    hermitian_pd_inverse,
    relative_decrement_test,
    robust_inverse,
)

logger = logging.getLogger(__name__)

GridLike = Union[FrequencyGrid, np.ndarray]

RIDGE_TAU = 1e-8
CHUNK = 8192
BOUNDARY_FACTOR = 1e-6
# cond(G*C⁻¹G) above this leaves some η direction unidentified on the grid
INFORMATION_COND_LIMIT = 1e12


def grid_points(grid: GridLike) -> np.ndarray:
    """Frequencies of a FrequencyGrid or of a raw array (any order)."""
    if isinstance(grid, FrequencyGrid):
        return grid.values
    points = np.asarray(grid, dtype=float).ravel()
    if points.size == 0 or not np.all(np.isfinite(points)) or np.any(points == 0.0):
        raise ConfigurationError("grid", "points must be finite and nonzero")
    return points


def symmetric_points(grid: GridLike) -> np.ndarray:
    points = grid_points(grid)
    return np.concatenate((points, -points))


def empirical_cf(samples: np.ndarray, u: np.ndarray, chunk: int = CHUNK) -> np.ndarray:
    """(1/N) Σ_n e^{iu r_n}, accumulated over fixed-size chunks of the samples."""
    samples = np.asarray(samples, dtype=float)
    total = np.zeros(len(u), dtype=complex)
    for start in range(0, len(samples), chunk):
        block = samples[start:start + chunk]
        total += np.exp(1j * np.outer(u, block)).sum(axis=1)
    return total / len(samples)


def score_mean(samples: np.ndarray, grid: GridLike, model: NoiseParams) -> np.ndarray:
    """h̄_N(u_j) = (1/N) Σ e^{iu_j r} − φ(u_j, η)."""
    samples = np.asarray(samples, dtype=float)
    if samples.size < 1:
        raise ConfigurationError("samples", "at least one sample is required")
    u = grid_points(grid)
    return empirical_cf(samples, u) - noise.cf(model, u)


def c_matrix(model: NoiseParams, grid: GridLike) -> np.ndarray:
    """C_{kl} = φ(u_k − u_l) − φ(u_k)·conj(φ(u_l)), unregularised."""
    u = grid_points(grid)
    fam = noise.family(model)
    phi = fam.cf(model, u)
    diff = (u[:, None] - u[None, :]).ravel()
    joint = fam.cf(model, diff).reshape(len(u), len(u))
    c = joint - np.outer(phi, phi.conj())
    return 0.5 * (c + c.conj().T)


def regularize(c: np.ndarray, tau: float = RIDGE_TAU) -> np.ndarray:
    """C + τ·(trace C / M)·I."""
    m = c.shape[0]
    return c + tau * (np.trace(c).real / m) * np.eye(m)


def sandwich_covariance(g: np.ndarray, w: np.ndarray, c: np.ndarray) -> np.ndarray:
    """(G*WG)⁻¹ G*WCWG (G*WG)⁻¹ for a Hermitian weight W."""
    gh = g.conj().T
    bread = robust_inverse((gh @ w @ g).real, "G*WG")
    meat = (gh @ w @ c @ w @ g).real
    cov = bread @ meat @ bread
    return 0.5 * (cov + cov.T)


def optimal_covariance(g: np.ndarray, c: np.ndarray) -> np.ndarray:
    """(G*C⁻¹G)⁻¹ with the regularised C."""
    c_inv = hermitian_pd_inverse(regularize(c), "C")
    cov = robust_inverse((g.conj().T @ c_inv @ g).real, "G*C⁻¹G")
    return 0.5 * (cov + cov.T)


def _identified(avar: np.ndarray) -> bool:
    if not np.all(np.isfinite(avar)):
        return False
    singular = np.linalg.svd(avar, compute_uv=False)
    return bool(singular[-1] > 0.0 and singular[0] <= INFORMATION_COND_LIMIT * singular[-1])


def _threshold_point(model: NoiseParams, threshold: float, limit_factor: float) -> float:
    """Smallest u with |φ(u)| < ``threshold``, or ``limit_factor``/std with a warning."""
    fam = noise.family(model)
    u_limit = limit_factor / noise.std(model)
    scan = np.linspace(0.0, u_limit, 4001)
    below = np.nonzero(np.abs(fam.cf(model, scan)) < threshold)[0]
    if below.size == 0:
        logger.warning(
            f"|phi| stays above {threshold} up to u={u_limit:.6g} for {model.kind.value}; "
            f"using that bound for the grid"
        )
        return float(u_limit)
    hi = scan[below[0]]
    lo = scan[below[0] - 1]
    return optimize.brentq(
        lambda x: abs(complex(fam.cf(model, np.array([x]))[0])) - threshold, lo, hi, xtol=1e-12
    )


def default_grid(
    model: NoiseParams,
    size: int = 10,
    threshold: float = 0.05,
    limit_factor: float = 50.0,
) -> FrequencyGrid:
    """
    ``size`` equally spaced points on (0, u_max] where u_max is the smallest
    u with |φ(u)| < ``threshold``. When |φ| never drops that low below
    ``limit_factor``/std, that bound is used instead.
    """
    return FrequencyGrid.equally_spaced(_threshold_point(model, threshold, limit_factor), size)


def geometric_grid(
    model: NoiseParams,
    size: int = 10,
    threshold: float = 0.05,
    low_factor: float = 0.1,
    limit_factor: float = 50.0,
) -> FrequencyGrid:
    """
    ``size`` geometrically spaced points from ``low_factor``/std to the
    u_max of ``default_grid``.

    Laws mixing very different scales (a narrow and a wide mixture
    component) need points below 1/σ of the widest scale; the equally
    spaced grid can start past them.
    """
    u_max = _threshold_point(model, threshold, limit_factor)
    u_min = low_factor / noise.std(model)
    if size == 1 or u_min >= u_max:
        return FrequencyGrid.equally_spaced(u_max, size)
    return FrequencyGrid(u=tuple(float(v) for v in np.geomspace(u_min, u_max, size)))


def ecf_iid_estimate(
    samples: np.ndarray,
    grid: GridLike,
    init: NoiseParams,
    weighting: Weighting = Weighting.OPTIMAL_C,
    max_iter: int = 200,
) -> EcfIidResult:
    """
    Estimate η of the family ``init.kind`` from i.i.d. samples, starting at
    ``init.eta``.

    With OPTIMAL_C the weight is C(η_k)⁻¹ re-evaluated at every iterate and
    held fixed during that iterate's line search.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size < 1:
        raise ConfigurationError("samples", "at least one sample is required")
    u = grid_points(grid)
    if not isinstance(grid, FrequencyGrid):
        try:
            grid = FrequencyGrid(u=tuple(float(v) for v in np.sort(u)))
        except ValueError as e:
            raise ConfigurationError("grid", str(e)) from e
        u = grid.values
    if len(u) < init.dim:
        raise ConfigurationError(
            "grid", f"M={len(u)} points cannot identify {init.dim} noise parameters"
        )
    fam = noise.family(init)
    weighting = Weighting(weighting)
    s = np.concatenate((u, -u))
    ecf_u = empirical_cf(samples, u)
    ecf_s = np.concatenate((ecf_u, ecf_u.conj()))

    x0 = init.as_array()
    positive = fam.positive_parameters(init)
    floor = BOUNDARY_FACTOR * np.abs(x0)

    def at(eta: np.ndarray) -> NoiseParams:
        return init.with_eta(eta).check_domain()

    def weight(model: NoiseParams) -> Optional[np.ndarray]:
        if weighting is Weighting.IDENTITY:
            return None
        return hermitian_pd_inverse(regularize(c_matrix(model, s)), "C")

    def quad(h: np.ndarray, w: Optional[np.ndarray]) -> float:
        if w is None:
            return float(np.vdot(h, h).real)
        return float((h.conj() @ w @ h).real)

    def evaluate(eta: np.ndarray) -> Evaluation:
        model = at(eta)
        h = ecf_s - fam.cf(model, s)
        jac = -fam.cf_grad_eta(model, s)
        w = weight(model)
        wj = jac if w is None else w @ jac
        wh = h if w is None else w @ h

        def objective(trial: np.ndarray) -> float:
            try:
                h_trial = ecf_s - fam.cf(at(trial), s)
            except ParameterDomainError:
                return np.inf
            return quad(h_trial, w)

        return Evaluation(
            value=quad(h, w),
            grad=2.0 * (jac.conj().T @ wh).real,
            curvature=2.0 * (jac.conj().T @ wj).real,
            objective=objective,
        )

    run = gauss_newton(
        evaluate,
        x0,
        is_converged=relative_decrement_test(),
        boundary=lambda eta: bool(np.any(eta[positive] < floor[positive])),
        max_iter=max_iter,
        label="ecf_iid_estimate",
    )

    fitted = init.with_eta(run.x)
    converged = run.converged
    g_s = -fam.cf_grad_eta(fitted, s)
    c_s = c_matrix(fitted, s)
    try:
        avar_optimal = optimal_covariance(g_s, c_s)
        avar_sandwich = sandwich_covariance(g_s, np.eye(len(s)), c_s)
    except (LevySysIdError, np.linalg.LinAlgError) as e:
        logger.warning(f"Asymptotic covariance unavailable at eta={run.x}: {e}")
        avar_optimal = np.full((init.dim, init.dim), np.nan)
        avar_sandwich = np.full((init.dim, init.dim), np.nan)
        converged = False
    else:
        if not _identified(avar_optimal):
            logger.warning(
                f"eta is not identified on this grid at eta={run.x} "
                f"(cond(G*C⁻¹G) > {INFORMATION_COND_LIMIT:.0e}); marking it unconverged"
            )
            converged = False

    logger.info(
        f"ECF estimate {fitted.kind.value} eta={run.x} after {run.iterations} iterations "
        f"(converged={converged})"
    )
    return EcfIidResult(
        noise=fitted,
        eta_hat=run.x,
        grid=grid,
        weighting=weighting,
        c_matrix=c_matrix(fitted, u),
        g_matrix=-fam.cf_grad_eta(fitted, u),
        avar_optimal=avar_optimal,
        avar_sandwich=avar_sandwich,
        cost=run.evaluation.value,
        iterations=run.iterations,
        converged=converged,
    )


def ecf_on_residuals(
    dy: np.ndarray,
    theta: SystemParams,
    grid: GridLike,
    init: NoiseParams,
    weighting: Weighting = Weighting.OPTIMAL_C,
    burn_in: int = 500,
    rho_stab: float = 0.02,
    max_iter: int = 200,
) -> EcfIidResult:
    """Invert the system at ``theta`` and estimate η from the residuals after burn-in."""
    dy = np.asarray(dy, dtype=float)
    if len(dy) <= burn_in:
        raise ConfigurationError("burn_in", f"{burn_in} leaves no samples out of {len(dy)}")
    residuals = innovations(theta, dy, order=0, rho_stab=rho_stab).eps[burn_in:]
    return ecf_iid_estimate(residuals, grid, init, weighting=weighting, max_iter=max_iter)


__all__ = [
    "c_matrix",
    "default_grid",
    "ecf_iid_estimate",
    "ecf_on_residuals",
    "empirical_cf",
    "geometric_grid",
    "grid_points",
    "optimal_covariance",
    "regularize",
    "sandwich_covariance",
    "score_mean",
    "symmetric_points",
]
