# levy_sysid/noise/families/mixture.py
"""
Zero-mean Gaussian scale mixture.

Not an infinitely divisible law in general; it is used as an i.i.d.
increment law with known characteristic function whose location Fisher
information can be far above 1/σ² (a narrow component mixed with a wide one).
"""
from typing import Optional, Tuple

import numpy as np
from scipy import special, stats

from levy_sysid.exceptions import ParameterDomainError
from levy_sysid.models.noise_params import NoiseKind, NoiseParams
from levy_sysid.noise.base import NoiseFamily


def _split(model: NoiseParams) -> Tuple[np.ndarray, np.ndarray]:
    k = model.components
    eta = model.as_array()
    free = eta[: k - 1]
    weights = np.append(free, 1.0 - free.sum())
    return weights, eta[k - 1:]


class GaussianMixtureFamily(NoiseFamily):
    """
    η = (w_1, …, w_{K−1}, σ_1, …, σ_K) with w_K = 1 − Σ w_j;
    increment ~ Σ w_j N(0, σ_j² h).
    """

    kind = NoiseKind.GAUSSIAN_MIXTURE

    def check_domain(self, model: NoiseParams) -> None:
        if model.dim < 3 or model.dim % 2 == 0:
            raise ParameterDomainError(
                "eta", model.eta, "mixture expects K−1 weights and K sigmas, K >= 2"
            )
        weights, sigmas = _split(model)
        for j, w in enumerate(weights):
            if not (0.0 < w < 1.0):
                raise ParameterDomainError(f"w{j + 1}", float(w), "weights must lie in (0, 1)")
        for j, s in enumerate(sigmas):
            self._require_positive(f"sigma{j + 1}", float(s))

    def _component_cf(self, model: NoiseParams, u: np.ndarray) -> np.ndarray:
        _, sigmas = _split(model)
        return np.exp(-0.5 * np.outer(u**2, sigmas**2) * model.h)

    def cf(self, model: NoiseParams, u: np.ndarray) -> np.ndarray:
        weights, _ = _split(model)
        return self._component_cf(model, u) @ weights + 0j

    def cf_grad_eta(self, model: NoiseParams, u: np.ndarray) -> np.ndarray:
        weights, sigmas = _split(model)
        k = model.components
        comp = self._component_cf(model, u)
        d_weights = comp[:, : k - 1] - comp[:, [k - 1]]
        d_sigmas = -(u**2)[:, None] * model.h * (weights * sigmas)[None, :] * comp
        return np.hstack((d_weights, d_sigmas)) + 0j

    def cumulants(self, model: NoiseParams) -> Tuple[float, float]:
        weights, sigmas = _split(model)
        k2 = float(weights @ sigmas**2) * model.h
        m4 = 3.0 * float(weights @ sigmas**4) * model.h**2
        return k2, m4 - 3.0 * k2**2

    def sample(self, model: NoiseParams, n: int, rng: np.random.Generator) -> np.ndarray:
        weights, sigmas = _split(model)
        labels = rng.choice(len(weights), size=n, p=weights)
        return rng.standard_normal(n) * sigmas[labels] * np.sqrt(model.h)

    def _log_components(self, model: NoiseParams, x: np.ndarray) -> np.ndarray:
        weights, sigmas = _split(model)
        scales = sigmas * np.sqrt(model.h)
        return np.log(weights)[None, :] + stats.norm.logpdf(x[:, None], scale=scales[None, :])

    def density(self, model: NoiseParams, x: np.ndarray) -> Optional[np.ndarray]:
        return np.exp(special.logsumexp(self._log_components(model, x), axis=1))

    def score_location(self, model: NoiseParams, x: np.ndarray) -> Optional[np.ndarray]:
        _, sigmas = _split(model)
        resp = special.softmax(self._log_components(model, x), axis=1)
        return -(resp @ (1.0 / (sigmas**2 * model.h))) * x

    def quadrature_breakpoints(self, model: NoiseParams) -> Tuple[float, ...]:
        _, sigmas = _split(model)
        return tuple(float(s) * float(np.sqrt(model.h)) for s in np.sort(sigmas))
