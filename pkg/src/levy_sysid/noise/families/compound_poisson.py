# levy_sysid/noise/families/compound_poisson.py
"""
Compound Poisson increments with Gaussian jumps.

Z_t = Σ_{i ≤ N_t} X_i with N a Poisson process of rate λ and X_i ~ N(μ_J, σ_J²);
Lévy measure ν(dx) = λ·N(μ_J, σ_J²)(dx). Increments are centered by
subtracting λhμ_J.

The law has an atom at −λhμ_J of mass e^{−λh}, so |φ(u)| stays above
e^{−2λh} and tends to e^{−λh} as |u| grows.
"""
from typing import Tuple

import numpy as np

from levy_sysid.models.noise_params import NoiseKind, NoiseParams
from levy_sysid.noise.base import NoiseFamily


class CompoundPoissonGaussianFamily(NoiseFamily):
    """η = (λ, μ_J, σ_J)."""

    kind = NoiseKind.COMPOUND_POISSON_GAUSSIAN

    def check_domain(self, model: NoiseParams) -> None:
        self._require_dim(model, 3)
        rate, jump_mean, jump_sigma = model.eta
        self._require_positive("rate", rate)
        self._require_finite("jump_mean", jump_mean)
        self._require_positive("jump_sigma", jump_sigma)

    def _jump_cf(self, model: NoiseParams, u: np.ndarray) -> np.ndarray:
        _, jump_mean, jump_sigma = model.eta
        return np.exp(1j * u * jump_mean - 0.5 * jump_sigma**2 * u**2)

    def cf(self, model: NoiseParams, u: np.ndarray) -> np.ndarray:
        rate, jump_mean, _ = model.eta
        lam_h = rate * model.h
        return np.exp(lam_h * (self._jump_cf(model, u) - 1.0) - 1j * u * lam_h * jump_mean)

    def cf_grad_eta(self, model: NoiseParams, u: np.ndarray) -> np.ndarray:
        rate, jump_mean, jump_sigma = model.eta
        h = model.h
        jump = self._jump_cf(model, u)
        phi = self.cf(model, u)
        d_rate = h * (jump - 1.0) - 1j * u * h * jump_mean
        d_mean = rate * h * 1j * u * (jump - 1.0)
        d_sigma = -rate * h * jump_sigma * u**2 * jump
        return np.column_stack((d_rate, d_mean, d_sigma)) * phi[:, None]

    def cumulants(self, model: NoiseParams) -> Tuple[float, float]:
        rate, m, s = model.eta
        lam_h = rate * model.h
        second = m**2 + s**2
        fourth = m**4 + 6.0 * m**2 * s**2 + 3.0 * s**4
        return lam_h * second, lam_h * fourth

    def sample(self, model: NoiseParams, n: int, rng: np.random.Generator) -> np.ndarray:
        rate, jump_mean, jump_sigma = model.eta
        lam_h = rate * model.h
        counts = rng.poisson(lam_h, size=n)
        z = rng.standard_normal(n)
        return counts * jump_mean + jump_sigma * np.sqrt(counts) * z - lam_h * jump_mean

    def positive_parameters(self, model: NoiseParams) -> np.ndarray:
        return np.array([True, False, True])
