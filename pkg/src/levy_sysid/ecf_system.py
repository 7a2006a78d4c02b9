# levy_sysid/ecf_system.py
"""
Stage 3: re-estimation of θ from sensitivity-weighted ECF scores.

With η frozen at the stage-2 estimate the per-sample scores are

    h_{k,n}(θ) = (e^{iu_k ε_n(θ)} − φ(u_k, η̂)) ε_{nθ}(θ),

stacked over frequencies with index k·p + j. The weight K = C ⊗ R_P* is
applied factorwise. At the optimum the asymptotic covariance is
κ⁻¹ (R_P*)⁻¹ with ψ_k = iu_k φ(u_k) and κ = ψ*C⁻¹ψ; the ML bound is
μ⁻¹ (R_P*)⁻¹ with μ = E[(f′/f)²].

Like stage 2, all quadratic forms use the symmetric point set ±u.
"""
import logging
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, linalg

from levy_sysid import noise
from levy_sysid.ecf_iid import (
    CHUNK,
    GridLike,
    c_matrix,
    default_grid,
    grid_points,
    regularize,
)
from levy_sysid.exceptions import (
    ConfigurationError,
    NumericalInstabilityError,
    StabilityError,
    UnsupportedOperationError,
)
from levy_sysid.linear_system import innovations, project_stable, require_admissible
from levy_sysid.models.noise_params import NoiseParams
from levy_sysid.models.stage3_result import KappaStudy, ScoreKind, Stage3Result
from levy_sysid.models.system_params import SignalBundle, SystemParams
from levy_sysid.optim import (
    Evaluation,
    gauss_newton,
    hermitian_pd_inverse,
    relative_decrement_test,
    robust_inverse,
)

logger = logging.getLogger(__name__)

KAPPA_IMAG_TOL = 1e-10
CONTINUUM_RIDGE = 1e-10
CONDITION_LIMIT = 1e12


class Stage3Scores(NamedTuple):
    scores: np.ndarray  # N′ × M·p
    mean: np.ndarray  # M·p


class StageThreeMoments(NamedTuple):
    mean: np.ndarray  # M × p
    jac_gn: Optional[np.ndarray]  # M × p × p, drops the ε_θθ term
    jac_full: Optional[np.ndarray]  # M × p × p


class KroneckerWeight:
    """
    K = C ⊗ R with C Hermitian positive definite (M×M) and R symmetric
    positive definite (p×p). K⁻¹ is applied as C⁻¹ ⊗ R⁻¹ to score matrices
    H (M×p, row k holding the block of frequency k).
    """

    def __init__(self, c: np.ndarray, r_p: np.ndarray):
        c = np.atleast_2d(np.asarray(c))
        r_p = np.atleast_2d(np.asarray(r_p, dtype=float))
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ConfigurationError("C", f"must be square, got shape {c.shape}")
        if r_p.ndim != 2 or r_p.shape[0] != r_p.shape[1]:
            raise ConfigurationError("R_P*", f"must be square, got shape {r_p.shape}")
        if r_p.shape[0] == 0:
            raise ConfigurationError("R_P*", "system has no parameters")
        self.c = c
        self.r_p = r_p
        self._c_inv: Optional[np.ndarray] = None
        self._r_inv: Optional[np.ndarray] = None

    @property
    def m(self) -> int:
        return self.c.shape[0]

    @property
    def p(self) -> int:
        return self.r_p.shape[0]

    @property
    def c_inv(self) -> np.ndarray:
        if self._c_inv is None:
            self._c_inv = hermitian_pd_inverse(self.c, "C")
        return self._c_inv

    @property
    def r_inv(self) -> np.ndarray:
        if self._r_inv is None:
            self._r_inv = hermitian_pd_inverse(self.r_p, "R_P*").real
        return self._r_inv

    def dense(self) -> np.ndarray:
        """The Mp×Mp matrix, index k·p + j."""
        return np.kron(self.c, self.r_p)

    def apply_inverse(self, h: np.ndarray) -> np.ndarray:
        """K⁻¹h for an Mp vector or an M×p matrix (same shape out)."""
        h = np.asarray(h)
        expected = (self.m * self.p,) if h.ndim == 1 else (self.m, self.p)
        if h.shape != expected:
            raise ConfigurationError(
                "scores", f"shape {h.shape} does not match K ({self.m}×{self.p})"
            )
        matrix = h.reshape(self.m, self.p)
        out = self.c_inv @ matrix @ self.r_inv
        return out.ravel() if h.ndim == 1 else out

    def quadratic(self, h: np.ndarray) -> float:
        """Re h*K⁻¹h."""
        h = np.asarray(h)
        return float(np.sum(h.conj() * self.apply_inverse(h)).real)


def kronecker_weight(c: np.ndarray, r_p: np.ndarray) -> KroneckerWeight:
    return KroneckerWeight(c, r_p)


def _residual_signals(
    dy: np.ndarray, theta: SystemParams, order: int, burn_in: int, rho_stab: float
) -> SignalBundle:
    if theta.p == 0:
        raise ConfigurationError("system", "stage 3 needs at least one system parameter")
    dy = np.asarray(dy, dtype=float)
    if len(dy) <= burn_in:
        raise ConfigurationError("burn_in", f"{burn_in} leaves no samples out of {len(dy)}")
    return innovations(theta, dy, order=order, rho_stab=rho_stab).drop(burn_in)


def _moments_from_bundle(
    bundle: SignalBundle, points: np.ndarray, phi: np.ndarray, order: int
) -> StageThreeMoments:
    eps, grad, hess = bundle.eps, bundle.eps_grad, bundle.eps_hess
    n, p = grad.shape
    m = len(points)
    total = np.zeros((m, p), dtype=complex)
    jac_gn = np.zeros((m, p, p), dtype=complex) if order >= 1 else None
    jac_hess = np.zeros((m, p, p), dtype=complex) if order >= 2 else None
    iu = 1j * points
    for start in range(0, n, CHUNK):
        stop = start + CHUNK
        e = np.exp(1j * np.outer(eps[start:stop], points))
        g = grad[start:stop]
        total += e.T @ g
        if jac_gn is not None:
            jac_gn += np.einsum("nk,nj,nl->kjl", e * iu, g, g, optimize=True)
        if jac_hess is not None:
            jac_hess += np.einsum("nk,njl->kjl", e, hess[start:stop], optimize=True)
    mean = total / n - np.outer(phi, grad.mean(axis=0))
    if jac_gn is not None:
        jac_gn /= n
    jac_full = None
    if jac_hess is not None:
        jac_full = jac_gn + jac_hess / n - phi[:, None, None] * hess.mean(axis=0)[None, :, :]
    return StageThreeMoments(mean=mean, jac_gn=jac_gn, jac_full=jac_full)


def stage3_moments(
    dy: np.ndarray,
    theta: SystemParams,
    eta_hat: NoiseParams,
    points: GridLike,
    order: int = 2,
    burn_in: int = 500,
    rho_stab: float = 0.02,
) -> StageThreeMoments:
    """
    Mean score matrix h̄ (M×p) on the given points and, for order ≥ 1, its
    θ-Jacobian without (``jac_gn``) and, for order 2, with the ε_θθ term.
    """
    u = grid_points(points)
    bundle = _residual_signals(dy, theta, max(order, 1), burn_in, rho_stab)
    return _moments_from_bundle(bundle, u, noise.cf(eta_hat, u), order)


def stage3_scores(
    dy: np.ndarray,
    theta: SystemParams,
    eta_hat: NoiseParams,
    grid: GridLike,
    burn_in: int = 500,
    rho_stab: float = 0.02,
) -> Stage3Scores:
    """Per-sample scores h_n(θ) (N′ × M·p, index k·p + j) and their mean."""
    u = grid_points(grid)
    bundle = _residual_signals(dy, theta, 1, burn_in, rho_stab)
    phi = noise.cf(eta_hat, u)
    centered = np.exp(1j * np.outer(bundle.eps, u)) - phi[None, :]
    scores = (centered[:, :, None] * bundle.eps_grad[:, None, :]).reshape(bundle.n, -1)
    return Stage3Scores(scores=scores, mean=scores.mean(axis=0))


def psi_vector(model: NoiseParams, points: np.ndarray) -> np.ndarray:
    """ψ_k = iu_k φ(u_k)."""
    return 1j * points * noise.cf(model, points)


def kappa_value(model: NoiseParams, points: np.ndarray, c_inv: np.ndarray) -> float:
    """ψ*C⁻¹ψ, checked to be real and positive."""
    psi = psi_vector(model, points)
    value = complex(psi.conj() @ c_inv @ psi)
    if abs(value.imag) > KAPPA_IMAG_TOL * max(abs(value), 1e-300) or value.real <= 0:
        raise NumericalInstabilityError("kappa", f"ψ*C⁻¹ψ = {value} is not real positive")
    return value.real


def fisher_location(model: NoiseParams) -> float:
    """μ = ∫ (f′/f)² f dx by adaptive quadrature, relative tolerance 10⁻⁶."""
    fam = noise.family(model)
    if fam.density(model, np.zeros(1)) is None:
        raise UnsupportedOperationError("fisher_location", model.kind.value)
    scales = fam.quadrature_breakpoints(model)
    limit = 40.0 * max(scales)

    def integrand(x: float) -> float:
        arr = np.array([x])
        score = fam.score_location(model, arr)[0]
        return float(score * score * fam.density(model, arr)[0])

    # Densities of the implemented families are symmetric.
    value, _ = integrate.quad(
        integrand, 0.0, limit, points=[s for s in scales if s < limit], epsrel=1e-6,
        epsabs=0.0, limit=500,
    )
    return 2.0 * value


def stage3_estimate(
    dy: np.ndarray,
    theta_init: SystemParams,
    eta_hat: NoiseParams,
    grid: GridLike,
    r_p_star: np.ndarray,
    score_kind: ScoreKind = ScoreKind.SENSITIVITY,
    burn_in: int = 500,
    rho_stab: float = 0.02,
    max_iter: int = 200,
) -> Stage3Result:
    """
    Minimise Re h̄*K⁻¹h̄ over θ with η = ``eta_hat`` held fixed.

    The gradient uses the full analytic Jacobian of h̄; the Gauss-Newton
    curvature drops the ε_θθ term. ``ScoreKind.PLAIN`` uses the scores
    e^{iuε} − φ with K = C instead (comparison baseline).
    """
    dy = np.asarray(dy, dtype=float)
    if theta_init.p == 0:
        raise ConfigurationError("system", "stage 3 needs at least one system parameter")
    require_admissible(theta_init, rho_stab)
    score_kind = ScoreKind(score_kind)
    u = grid_points(grid)
    s = np.concatenate((u, -u))
    phi = noise.cf(eta_hat, s)
    c_s = regularize(c_matrix(eta_hat, s))
    r_p_star = np.atleast_2d(np.asarray(r_p_star, dtype=float))
    if r_p_star.shape != (theta_init.p, theta_init.p):
        raise ConfigurationError(
            "r_p_star", f"shape {r_p_star.shape} does not match p={theta_init.p}"
        )
    weight = kronecker_weight(c_s, r_p_star)
    c_inv = weight.c_inv

    def system_at(theta: np.ndarray) -> SystemParams:
        return theta_init.with_theta(theta)

    if score_kind is ScoreKind.SENSITIVITY:

        def objective(theta: np.ndarray) -> float:
            try:
                bundle = _residual_signals(dy, system_at(theta), 1, burn_in, rho_stab)
            except StabilityError:
                return np.inf
            return weight.quadratic(_moments_from_bundle(bundle, s, phi, 0).mean)

        def evaluate(theta: np.ndarray) -> Evaluation:
            bundle = _residual_signals(dy, system_at(theta), 2, burn_in, rho_stab)
            mom = _moments_from_bundle(bundle, s, phi, 2)
            weighted = weight.apply_inverse(mom.mean)
            p = theta_init.p
            grad = np.array(
                [2.0 * np.sum(mom.jac_full[:, :, l].conj() * weighted).real for l in range(p)]
            )
            wj = [weight.apply_inverse(mom.jac_gn[:, :, l]) for l in range(p)]
            curvature = np.array(
                [
                    [2.0 * np.sum(mom.jac_gn[:, :, l].conj() * wj[k]).real for k in range(p)]
                    for l in range(p)
                ]
            )
            return Evaluation(
                value=weight.quadratic(mom.mean),
                grad=grad,
                curvature=0.5 * (curvature + curvature.T),
                objective=objective,
            )

    else:

        def plain_moments(theta: np.ndarray, with_jac: bool):
            bundle = _residual_signals(dy, system_at(theta), 1, burn_in, rho_stab)
            e = np.exp(1j * np.outer(bundle.eps, s))
            mean = e.mean(axis=0) - phi
            jac = (e * (1j * s)).T @ bundle.eps_grad / bundle.n if with_jac else None
            return mean, jac

        def plain_quad(h: np.ndarray) -> float:
            return float((h.conj() @ c_inv @ h).real)

        def objective(theta: np.ndarray) -> float:
            try:
                mean, _ = plain_moments(theta, False)
            except StabilityError:
                return np.inf
            return plain_quad(mean)

        def evaluate(theta: np.ndarray) -> Evaluation:
            mean, jac = plain_moments(theta, True)
            curvature = 2.0 * (jac.conj().T @ c_inv @ jac).real
            return Evaluation(
                value=plain_quad(mean),
                grad=2.0 * (jac.conj().T @ c_inv @ mean).real,
                curvature=0.5 * (curvature + curvature.T),
                objective=objective,
            )

    run = gauss_newton(
        evaluate,
        theta_init.theta,
        is_converged=relative_decrement_test(),
        project=lambda theta: project_stable(system_at(theta), rho_stab).theta,
        max_iter=max_iter,
        label=f"stage3_estimate[{score_kind.value}]",
    )

    system = system_at(run.x)
    kappa = kappa_value(eta_hat, s, c_inv)
    if score_kind is ScoreKind.SENSITIVITY:
        avar = weight.r_inv / kappa
    else:
        avar = robust_inverse(0.5 * run.evaluation.curvature, "plain-score information")
    sigma2 = noise.moments(eta_hat).variance
    try:
        mu = fisher_location(eta_hat)
    except UnsupportedOperationError:
        mu = None

    logger.info(
        f"Stage-3 ({score_kind.value}) estimate {system.theta} after {run.iterations} "
        f"iterations (converged={run.converged}, kappa*sigma2={kappa * sigma2:.6g})"
    )
    return Stage3Result(
        system=system,
        theta_hat2=system.theta,
        score_kind=score_kind,
        psi=psi_vector(eta_hat, u),
        kappa=kappa,
        avar_stage3=0.5 * (avar + avar.T),
        efficiency_ratio_vs_pe=kappa * sigma2,
        mu=mu,
        cost=run.evaluation.value,
        grad_norm=float(np.max(np.abs(run.evaluation.grad), initial=0.0)),
        iterations=run.iterations,
        converged=run.converged,
    )


def linearized_error(
    dy: np.ndarray,
    theta_true: SystemParams,
    eta_true: NoiseParams,
    grid: GridLike,
    r_p_star: np.ndarray,
    burn_in: int = 500,
    rho_stab: float = 0.02,
) -> np.ndarray:
    """−(R*)⁻¹ V_θ(θ*, η*) with R* = 2κ R_P*, the first-order estimation error."""
    u = grid_points(grid)
    s = np.concatenate((u, -u))
    weight = kronecker_weight(regularize(c_matrix(eta_true, s)), r_p_star)
    mom = stage3_moments(dy, theta_true, eta_true, s, order=1, burn_in=burn_in,
                         rho_stab=rho_stab)
    weighted = weight.apply_inverse(mom.mean)
    grad = np.array(
        [2.0 * np.sum(mom.jac_gn[:, :, l].conj() * weighted).real for l in range(theta_true.p)]
    )
    kappa = kappa_value(eta_true, s, weight.c_inv)
    return -(weight.r_inv @ grad) / (2.0 * kappa)


def continuum_limit_kappa(
    model: NoiseParams,
    m_values: Sequence[int],
    u_max: Optional[float] = None,
    ridge: float = CONTINUUM_RIDGE,
) -> KappaStudy:
    """
    κ(M) on the grids u_j = j·u_max/M for each M in ``m_values``.

    The grids are nested when every M divides the next. A fixed absolute
    ridge keeps κ monotone in nested grids; a grid whose C has condition
    number above 10¹² repeats the last well-conditioned value and is flagged.
    """
    m_values = [int(m) for m in m_values]
    if not m_values or min(m_values) < 1:
        raise ConfigurationError("m_values", "need at least one positive grid size")
    if u_max is None:
        u_max = default_grid(model, size=1).u[-1]

    values: List[float] = []
    flags: List[bool] = []
    last: float = np.nan
    for m in m_values:
        s_points = np.arange(1, m + 1) * (u_max / m)
        s = np.concatenate((s_points, -s_points))
        c_s = c_matrix(model, s) + ridge * np.eye(len(s))
        try:
            condition = np.linalg.cond(c_s)
            if not np.isfinite(condition) or condition > CONDITION_LIMIT:
                raise NumericalInstabilityError("C", f"condition number {condition:.3g}")
            factor = linalg.cho_factor(c_s, lower=True)
            psi = psi_vector(model, s)
            kappa = float(np.vdot(psi, linalg.cho_solve(factor, psi)).real)
            last = kappa
            flags.append(True)
        except (NumericalInstabilityError, linalg.LinAlgError) as e:
            logger.warning(f"kappa at M={m} skipped: {e}")
            flags.append(False)
        values.append(last)

    try:
        mu = fisher_location(model)
    except UnsupportedOperationError:
        mu = None
    return KappaStudy(
        m_values=m_values,
        u_max=float(u_max),
        kappa=np.asarray(values),
        well_conditioned=flags,
        conditioning_ok=all(flags),
        limit=last,
        mu=mu,
    )


__all__ = [
    "KroneckerWeight",
    "Stage3Scores",
    "StageThreeMoments",
    "continuum_limit_kappa",
    "fisher_location",
    "kappa_value",
    "kronecker_weight",
    "linearized_error",
    "psi_vector",
    "stage3_estimate",
    "stage3_moments",
    "stage3_scores",
]
