# levy_sysid/linear_system.py
"""
Monic ARMA system Δy = (C(q⁻¹)/A(q⁻¹)) ΔZ, its inverse filter and the
θ-sensitivities of the innovations.

All recursions start from zero initial state. With w = Δy/C and v = ε/C the
sensitivities are

    ∂ε/∂a_i = q⁻ⁱ w,            ∂ε/∂c_j = −q⁻ʲ v,
    ∂²ε/∂a_i∂a_k = 0,           ∂²ε/∂a_i∂c_j = −q⁻⁽ⁱ⁺ʲ⁾ w/C,
    ∂²ε/∂c_j∂c_k = 2 q⁻⁽ʲ⁺ᵏ⁾ v/C.
"""
import logging
from typing import Sequence

import numpy as np
from scipy import signal

from levy_sysid.exceptions import StabilityError
from levy_sysid.models.system_params import SignalBundle, StabilityReport, SystemParams

logger = logging.getLogger(__name__)

DEFAULT_RHO_STAB = 0.02


def lag(x: np.ndarray, k: int) -> np.ndarray:
    """q⁻ᵏx with zeros shifted in."""
    if k == 0:
        return x
    out = np.zeros_like(x)
    if k < len(x):
        out[k:] = x[: len(x) - k]
    return out


def check_stability(poly: Sequence[float], rho_stab: float = DEFAULT_RHO_STAB) -> StabilityReport:
    """Roots of zᵖ + poly_1 zᵖ⁻¹ + … + poly_p and the margin 1 − max|root|."""
    coeffs = np.concatenate(([1.0], np.asarray(poly, dtype=float)))
    roots = np.roots(coeffs) if len(coeffs) > 1 else np.zeros(0, dtype=complex)
    largest = float(np.max(np.abs(roots))) if roots.size else 0.0
    return StabilityReport(
        stable=largest < 1.0 - rho_stab,
        margin=1.0 - largest,
        roots=roots.astype(complex),
    )


def _require_stable(name: str, poly: Sequence[float], rho_stab: float) -> None:
    report = check_stability(poly, rho_stab)
    if not report.stable:
        raise StabilityError(name, np.sort(report.moduli)[::-1], 1.0 - rho_stab)


def _shrink(poly: Sequence[float], rho_stab: float) -> tuple:
    report = check_stability(poly, rho_stab)
    if report.stable:
        return tuple(poly)
    roots = report.roots.copy()
    moduli = np.abs(roots)
    outside = moduli >= 1.0 - rho_stab
    roots[outside] *= (1.0 - 2.0 * rho_stab) / moduli[outside]
    logger.debug(f"Projected {int(outside.sum())} root(s) into the stability disk")
    return tuple(float(c) for c in np.poly(roots).real[1:])


def is_admissible(sys: SystemParams, rho_stab: float = DEFAULT_RHO_STAB) -> bool:
    """Stable and inverse stable with margin ρ."""
    return check_stability(sys.ar, rho_stab).stable and check_stability(sys.ma, rho_stab).stable


def project_stable(sys: SystemParams, rho_stab: float = DEFAULT_RHO_STAB) -> SystemParams:
    """Radially shrink roots with modulus ≥ 1 − ρ to modulus 1 − 2ρ."""
    if is_admissible(sys, rho_stab):
        return sys
    return SystemParams(ar=_shrink(sys.ar, rho_stab), ma=_shrink(sys.ma, rho_stab))


def require_admissible(sys: SystemParams, rho_stab: float = DEFAULT_RHO_STAB) -> None:
    """Raise StabilityError unless both polynomials are stable with margin ρ."""
    _require_stable("AR", sys.ar, rho_stab)
    _require_stable("MA", sys.ma, rho_stab)


def simulate(
    sys: SystemParams, noise: np.ndarray, rho_stab: float = DEFAULT_RHO_STAB
) -> np.ndarray:
    """Δy = (C/A) ΔZ with zero initial state."""
    noise = np.asarray(noise, dtype=float)
    if noise.ndim != 1 or noise.size < 1:
        raise ValueError("noise must be a non-empty 1-d array")
    _require_stable("AR", sys.ar, rho_stab)
    return signal.lfilter(sys.ma_poly(), sys.ar_poly(), noise)


def innovations(
    sys: SystemParams,
    dy: np.ndarray,
    order: int = 1,
    rho_stab: float = DEFAULT_RHO_STAB,
) -> SignalBundle:
    """
    ε(θ) = (A/C) Δy and, for order ≥ 1, ε_θ (N×p); for order 2 also ε_θθ (N×p×p).
    """
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order}")
    dy = np.asarray(dy, dtype=float)
    require_admissible(sys, rho_stab)

    ar, ma = sys.ar_poly(), sys.ma_poly()
    eps = signal.lfilter(ar, ma, dy)
    if order == 0:
        return SignalBundle(eps=eps)

    n, p_a, p_c = len(dy), sys.p_a, sys.p_c
    w = signal.lfilter([1.0], ma, dy)
    v = signal.lfilter([1.0], ma, eps)
    grad = np.empty((n, sys.p))
    for i in range(p_a):
        grad[:, i] = lag(w, i + 1)
    for j in range(p_c):
        grad[:, p_a + j] = -lag(v, j + 1)
    if order == 1:
        return SignalBundle(eps=eps, eps_grad=grad)

    w2 = signal.lfilter([1.0], ma, w)
    v2 = signal.lfilter([1.0], ma, v)
    hess = np.zeros((n, sys.p, sys.p))
    for i in range(p_a):
        for j in range(p_c):
            col = -lag(w2, i + j + 2)
            hess[:, i, p_a + j] = col
            hess[:, p_a + j, i] = col
    for j in range(p_c):
        for k in range(j, p_c):
            col = 2.0 * lag(v2, j + k + 2)
            hess[:, p_a + j, p_a + k] = col
            hess[:, p_a + k, p_a + j] = col
    return SignalBundle(eps=eps, eps_grad=grad, eps_hess=hess)


def sensitivity_covariance(
    sys: SystemParams,
    sigma2: float,
    tol: float = 1e-14,
    max_length: int = 200_000,
) -> np.ndarray:
    """
    R_P* = E[ε_θ ε_θᵀ] at the true system for i.i.d. innovations of variance σ².

    At θ* the sensitivities are ε filtered by q⁻ⁱ/A and −q⁻ʲ/C; the result is
    σ² times the Gram matrix of their impulse responses, truncated once the
    tail energy falls below ``tol``.
    """
    _require_stable("AR", sys.ar, 0.0)
    _require_stable("MA", sys.ma, 0.0)
    largest = max(
        [1e-12] + [float(np.max(check_stability(poly, 0.0).moduli, initial=0.0))
                   for poly in (sys.ar, sys.ma)]
    )
    decay = int(np.ceil(np.log(tol) / np.log(largest)))
    length = min(max_length, 2 * decay + sys.p + 16)

    impulse = np.zeros(length)
    impulse[0] = 1.0
    h_a = signal.lfilter([1.0], sys.ar_poly(), impulse)
    h_c = signal.lfilter([1.0], sys.ma_poly(), impulse)
    basis = np.empty((sys.p, length))
    for i in range(sys.p_a):
        basis[i] = lag(h_a, i + 1)
    for j in range(sys.p_c):
        basis[sys.p_a + j] = -lag(h_c, j + 1)
    return sigma2 * basis @ basis.T
