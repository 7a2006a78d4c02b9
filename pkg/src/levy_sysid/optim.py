# levy_sysid/optim.py
"""
Damped Gauss-Newton driver shared by the three estimation stages, and the
matrix inverses they rely on.

Each stage supplies ``evaluate(x)`` returning the cost, its gradient, a
positive semi-definite curvature surrogate and the objective used for the
line search at that iterate. The driver takes the Gauss-Newton direction,
backtracks until the Armijo condition holds and stops on a vanishing
gradient, a negligible relative step, a failed line search, a boundary hit
or the iteration limit. Stopping never depends on the scale of the cost.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy import linalg

from levy_sysid.exceptions import LevySysIdError, NumericalInstabilityError

logger = logging.getLogger(__name__)


@dataclass
class Evaluation:
    value: float
    grad: np.ndarray
    curvature: np.ndarray
    objective: Callable[[np.ndarray], float]


class StopReason(str, Enum):
    STATIONARY = "stationary"
    SMALL_STEP = "small_step"
    LINE_SEARCH = "line_search"
    MAX_ITER = "max_iter"
    BOUNDARY = "boundary"
    SINGULAR = "singular"


@dataclass
class GaussNewtonResult:
    x: np.ndarray
    evaluation: Evaluation
    iterations: int
    converged: bool
    reason: StopReason


def robust_inverse(matrix: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Inverse, or the pseudo-inverse with a warning when ``matrix`` is singular."""
    try:
        inverse = linalg.inv(matrix)
        if np.all(np.isfinite(inverse)):
            return inverse
    except (linalg.LinAlgError, ValueError):
        pass
    logger.warning(f"{name} is singular; using the pseudo-inverse")
    return linalg.pinv(matrix)


def hermitian_pd_inverse(matrix: np.ndarray, name: str) -> np.ndarray:
    """Inverse of a Hermitian positive definite matrix via Cholesky."""
    try:
        factor = linalg.cho_factor(matrix, lower=True)
        inverse = linalg.cho_solve(factor, np.eye(matrix.shape[0], dtype=matrix.dtype))
    except linalg.LinAlgError as e:
        raise NumericalInstabilityError(name, f"not positive definite ({e})")
    return 0.5 * (inverse + inverse.conj().T)


def newton_decrement(ev: Evaluation) -> float:
    """gᵀH⁻¹g, the predicted decrease of a full Gauss-Newton step (times two)."""
    if not ev.grad.size:
        return 0.0
    return float(-ev.grad @ _direction(ev.curvature, ev.grad))


def relative_decrement_test(rtol: float = 1e-8) -> Callable[[Evaluation], bool]:
    """Convergence when the decrement is negligible against the cost."""
    return lambda ev: newton_decrement(ev) <= rtol * abs(ev.value) + 1e-300


def _direction(curvature: np.ndarray, grad: np.ndarray) -> np.ndarray:
    try:
        return -linalg.solve(curvature, grad, assume_a="pos")
    except (linalg.LinAlgError, ValueError):
        return -linalg.lstsq(curvature, grad)[0]


def gauss_newton(
    evaluate: Callable[[np.ndarray], Evaluation],
    x0: np.ndarray,
    *,
    is_converged: Callable[[Evaluation], bool],
    project: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    boundary: Optional[Callable[[np.ndarray], bool]] = None,
    max_iter: int = 200,
    step_tol: float = 1e-10,
    c_1: float = 1e-4,
    backtrack: float = 0.5,
    alpha_min: float = 1e-12,
    label: str = "gauss-newton",
) -> GaussNewtonResult:
    """
    Minimise the cost behind ``evaluate`` starting from ``x0``.

    Args:
        evaluate: returns the Evaluation at a point
        x0: starting point
        is_converged: convergence criterion applied to the final evaluation
        project: maps a trial point back into the admissible set
        boundary: returns True when an accepted iterate reached the boundary
            of the parameter domain; the run then ends unconverged
        max_iter: iteration limit

    Returns:
        GaussNewtonResult with the last accepted iterate
    """
    x = np.asarray(x0, dtype=float).copy()
    if project is not None:
        x = project(x)
    ev = evaluate(x)
    iterations = 0
    reason = StopReason.MAX_ITER

    while iterations < max_iter:
        if not np.any(ev.grad):
            reason = StopReason.STATIONARY
            break

        direction = _direction(ev.curvature, ev.grad)
        alpha = 1.0
        accepted = None
        while alpha >= alpha_min:
            trial = x + alpha * direction
            if project is not None:
                trial = project(trial)
            value = ev.objective(trial)
            if np.isfinite(value) and value <= ev.value + c_1 * float(ev.grad @ (trial - x)):
                accepted = trial
                break
            alpha *= backtrack
        if accepted is None:
            reason = StopReason.LINE_SEARCH
            break

        step = float(np.linalg.norm(accepted - x)) / (1.0 + float(np.linalg.norm(x)))
        try:
            new_ev = evaluate(accepted)
        except (np.linalg.LinAlgError, LevySysIdError) as e:
            logger.warning(f"{label}: evaluation failed at iteration {iterations + 1}: {e}")
            reason = StopReason.SINGULAR
            break
        x, ev = accepted, new_ev
        iterations += 1
        logger.debug(
            f"{label}: iter={iterations} cost={ev.value:.6e} "
            f"|grad|={np.max(np.abs(ev.grad), initial=0.0):.3e} alpha={alpha:.3g}"
        )

        if boundary is not None and boundary(x):
            reason = StopReason.BOUNDARY
            break
        if step < step_tol:
            reason = StopReason.SMALL_STEP
            break

    converged = reason not in (StopReason.BOUNDARY, StopReason.SINGULAR) and is_converged(ev)
    if not converged:
        logger.warning(
            f"{label} did not converge after {iterations} iterations ({reason.value})"
        )
    return GaussNewtonResult(
        x=x, evaluation=ev, iterations=iterations, converged=converged, reason=reason
    )
