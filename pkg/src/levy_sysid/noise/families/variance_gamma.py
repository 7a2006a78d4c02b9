# levy_sysid/noise/families/variance_gamma.py
"""
Variance gamma increments.

X_t(σ, ν, θ) = θγ_t + σW_{γ_t} with γ a gamma subordinator of unit mean
rate and variance rate ν. Equivalently X_t = γ⁺_t − γ⁻_t, two independent
gamma processes with mean rates μ_p, μ_n and variance rates ν_p = μ_p²ν,
ν_n = μ_n²ν. Lévy measure

    ν(dx) = (μ_n²/ν_n) e^{−(μ_n/ν_n)|x|}/|x| dx  for x < 0,
    ν(dx) = (μ_p²/ν_p) e^{−(μ_p/ν_p)x}/x dx      for x > 0.

The increment over h has characteristic function

    (1 − iuμ_pν)^{−h/ν} (1 + iuμ_nν)^{−h/ν} = (1 − iuθν + σ²νu²/2)^{−h/ν},

and is centered by the factor e^{−iuθh}.
"""
from typing import Tuple

import numpy as np

from levy_sysid.models.noise_params import NoiseKind, NoiseParams, VgDerivedParams
from levy_sysid.noise.base import NoiseFamily


def derived_params(model: NoiseParams) -> VgDerivedParams:
    sigma, nu, theta = model.eta
    return VgDerivedParams.from_vg(sigma, nu, theta)


class VarianceGammaFamily(NoiseFamily):
    """η = (σ, ν, θ)."""

    kind = NoiseKind.VARIANCE_GAMMA

    def check_domain(self, model: NoiseParams) -> None:
        self._require_dim(model, 3)
        sigma, nu, theta = model.eta
        self._require_positive("sigma", sigma)
        self._require_positive("nu", nu)
        self._require_finite("theta", theta)

    @staticmethod
    def _base(model: NoiseParams, u: np.ndarray) -> np.ndarray:
        sigma, nu, theta = model.eta
        return 1.0 - 1j * u * theta * nu + 0.5 * sigma**2 * nu * u**2

    def cf(self, model: NoiseParams, u: np.ndarray) -> np.ndarray:
        _, nu, theta = model.eta
        h = model.h
        # Re(base) >= 1, so the principal logarithm is continuous in u.
        return np.exp(-(h / nu) * np.log(self._base(model, u)) - 1j * u * theta * h)

    def cf_grad_eta(self, model: NoiseParams, u: np.ndarray) -> np.ndarray:
        sigma, nu, theta = model.eta
        h = model.h
        base = self._base(model, u)
        phi = self.cf(model, u)
        d_sigma = -h * sigma * u**2 / base
        d_nu = (h / nu**2) * np.log(base) - (h / nu) * (
            -1j * u * theta + 0.5 * sigma**2 * u**2
        ) / base
        d_theta = 1j * u * h / base - 1j * u * h
        return np.column_stack((d_sigma, d_nu, d_theta)) * phi[:, None]

    def cumulants(self, model: NoiseParams) -> Tuple[float, float]:
        _, nu, _ = model.eta
        d = derived_params(model)
        k2 = model.h * nu * (d.mu_p**2 + d.mu_n**2)
        k4 = 6.0 * model.h * nu**3 * (d.mu_p**4 + d.mu_n**4)
        return k2, k4

    def sample(self, model: NoiseParams, n: int, rng: np.random.Generator) -> np.ndarray:
        _, _, theta = model.eta
        d = derived_params(model)
        h = model.h
        # mean/variance rates (μ, ν) -> shape μ²h/ν, scale ν/μ
        up = rng.gamma(d.mu_p**2 * h / d.nu_p, d.nu_p / d.mu_p, size=n)
        down = rng.gamma(d.mu_n**2 * h / d.nu_n, d.nu_n / d.mu_n, size=n)
        return up - down - theta * h

    def positive_parameters(self, model: NoiseParams) -> np.ndarray:
        return np.array([True, True, False])
