# levy_sysid/noise/families/gaussian.py
"""
Gaussian increments: Brownian motion with variance σ² per unit time,
Lévy measure zero.
"""
from typing import Optional, Tuple

import numpy as np
from scipy import stats

from levy_sysid.models.noise_params import NoiseKind, NoiseParams
from levy_sysid.noise.base import NoiseFamily


class GaussianFamily(NoiseFamily):
    """η = (σ,); increment ~ N(0, σ²h)."""

    kind = NoiseKind.GAUSSIAN

    def check_domain(self, model: NoiseParams) -> None:
        self._require_dim(model, 1)
        self._require_positive("sigma", model.eta[0])

    def cf(self, model: NoiseParams, u: np.ndarray) -> np.ndarray:
        (sigma,) = model.eta
        return np.exp(-0.5 * sigma**2 * u**2 * model.h) + 0j

    def cf_grad_eta(self, model: NoiseParams, u: np.ndarray) -> np.ndarray:
        (sigma,) = model.eta
        phi = self.cf(model, u)
        return (-sigma * u**2 * model.h * phi)[:, None]

    def cumulants(self, model: NoiseParams) -> Tuple[float, float]:
        (sigma,) = model.eta
        return sigma**2 * model.h, 0.0

    def sample(self, model: NoiseParams, n: int, rng: np.random.Generator) -> np.ndarray:
        (sigma,) = model.eta
        return rng.normal(0.0, sigma * np.sqrt(model.h), size=n)

    def density(self, model: NoiseParams, x: np.ndarray) -> Optional[np.ndarray]:
        (sigma,) = model.eta
        return stats.norm.pdf(x, scale=sigma * np.sqrt(model.h))

    def score_location(self, model: NoiseParams, x: np.ndarray) -> Optional[np.ndarray]:
        (sigma,) = model.eta
        return -x / (sigma**2 * model.h)

    def quadrature_breakpoints(self, model: NoiseParams) -> Tuple[float, ...]:
        return (model.eta[0] * np.sqrt(model.h),)
