# levy_sysid/noise/__init__.py
"""
Centered i.i.d. increment laws with known characteristic functions.

Every operation validates the parameter domain first and accepts scalar or
array frequencies; scalar input gives scalar output.
"""
from typing import Union

import numpy as np

from levy_sysid.exceptions import UnsupportedOperationError
from levy_sysid.models.noise_params import (
    NoiseKind,
    NoiseMoments,
    NoiseParams,
    VgDerivedParams,
)
from levy_sysid.noise.base import NoiseFamily, NoiseFamilyProvider

ArrayLike = Union[float, np.ndarray]


def family(model: NoiseParams) -> NoiseFamily:
    """Validated family implementation for ``model``."""
    model.check_domain()
    return NoiseFamilyProvider.get(model.kind)


def cf(model: NoiseParams, u: ArrayLike):
    """φ(u, η) of the centered increment over the interval h."""
    fam = family(model)
    arr = np.asarray(u, dtype=float)
    values = fam.cf(model, arr.reshape(-1)).reshape(arr.shape)
    return complex(values) if arr.ndim == 0 else values


def cf_grad_eta(model: NoiseParams, u: ArrayLike) -> np.ndarray:
    """∂φ/∂η: shape (r,) for scalar u, (len(u), r) otherwise."""
    fam = family(model)
    arr = np.asarray(u, dtype=float)
    grad = fam.cf_grad_eta(model, arr.reshape(-1))
    return grad[0] if arr.ndim == 0 else grad


def sample_increments(model: NoiseParams, n: int, seed: int) -> np.ndarray:
    """``n`` i.i.d. centered increments; bit-identical for equal seeds."""
    fam = family(model)
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    rng = np.random.default_rng(seed)
    return fam.sample(model, int(n), rng)


def moments(model: NoiseParams) -> NoiseMoments:
    """Mean, variance and fourth central moment κ₄ + 3κ₂²."""
    fam = family(model)
    mean = 0.0
    if model.kind is NoiseKind.CGMY:
        mean, _, _ = fam.numerical_cumulants(model)
    k2, k4 = fam.cumulants(model)
    return NoiseMoments(mean=mean, variance=k2, abs_moment_4=k4 + 3.0 * k2**2, kappa_4=k4)


def std(model: NoiseParams) -> float:
    k2, _ = family(model).cumulants(model)
    return float(np.sqrt(k2))


def density(model: NoiseParams, x: ArrayLike):
    """Density at x, or None when the family has none in closed form."""
    fam = family(model)
    arr = np.asarray(x, dtype=float)
    values = fam.density(model, arr.reshape(-1))
    if values is None:
        return None
    values = np.asarray(values).reshape(arr.shape)
    return float(values) if arr.ndim == 0 else values


def location_score(model: NoiseParams, x: ArrayLike) -> np.ndarray:
    """f′(x)/f(x); raises UnsupportedOperationError without a density."""
    fam = family(model)
    arr = np.asarray(x, dtype=float)
    values = fam.score_location(model, arr.reshape(-1))
    if values is None:
        raise UnsupportedOperationError("location score", model.kind.value)
    return values.reshape(arr.shape)


def vg_derived_params(model: NoiseParams) -> VgDerivedParams:
    if model.kind is not NoiseKind.VARIANCE_GAMMA:
        raise UnsupportedOperationError("vg_derived_params", model.kind.value)
    model.check_domain()
    return VgDerivedParams.from_vg(*model.eta)


__all__ = [
    "NoiseFamily",
    "NoiseFamilyProvider",
    "cf",
    "cf_grad_eta",
    "density",
    "family",
    "location_score",
    "moments",
    "sample_increments",
    "std",
    "vg_derived_params",
]
