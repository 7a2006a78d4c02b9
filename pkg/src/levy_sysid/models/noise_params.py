# levy_sysid/models/noise_params.py
"""
Noise parameter models.

A NoiseParams instance names a family of centered i.i.d. increment laws and
carries its parameter vector η together with the sampling interval h. On
the wire it uses named parameters, for example::

    {"kind": "variance_gamma", "params": {"sigma": 1.0, "nu": 1.0, "theta": 0.0}, "h": 1.0}
"""
from __future__ import annotations

import math
from enum import Enum
from typing import Any, Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_serializer, model_validator

from levy_sysid.exceptions import ParameterDomainError


class NoiseKind(str, Enum):
    """Increment law families."""
    GAUSSIAN = "gaussian"
    GAUSSIAN_MIXTURE = "gaussian_mixture"
    COMPOUND_POISSON_GAUSSIAN = "compound_poisson_gaussian"
    VARIANCE_GAMMA = "variance_gamma"
    CGMY = "cgmy"


_SCALAR_PARAMS: Dict[NoiseKind, Tuple[str, ...]] = {
    NoiseKind.GAUSSIAN: ("sigma",),
    NoiseKind.COMPOUND_POISSON_GAUSSIAN: ("rate", "jump_mean", "jump_sigma"),
    NoiseKind.VARIANCE_GAMMA: ("sigma", "nu", "theta"),
    NoiseKind.CGMY: ("C", "G", "M", "Y"),
}


def _eta_from_named(kind: NoiseKind, params: Dict[str, Any]) -> Tuple[float, ...]:
    if kind is NoiseKind.GAUSSIAN_MIXTURE:
        weights = [float(w) for w in params.get("weights", [])]
        sigmas = [float(s) for s in params.get("sigmas", [])]
        if len(weights) != len(sigmas) or len(sigmas) < 2:
            raise ValueError(
                "gaussian_mixture needs 'weights' and 'sigmas' of equal length >= 2"
            )
        if not math.isclose(sum(weights), 1.0, rel_tol=0.0, abs_tol=1e-9):
            raise ParameterDomainError("weights", weights, "must sum to 1")
        return tuple(weights[:-1] + sigmas)

    names = _SCALAR_PARAMS[kind]
    missing = [n for n in names if n not in params]
    unknown = [n for n in params if n not in names]
    if missing or unknown:
        raise ValueError(
            f"{kind.value} expects parameters {list(names)}; "
            f"missing {missing}, unknown {unknown}"
        )
    return tuple(float(params[n]) for n in names)


class NoiseParams(BaseModel):
    """Family kind, parameter vector η and sampling interval h."""
    model_config = ConfigDict(frozen=True)

    kind: NoiseKind
    eta: Tuple[float, ...]
    h: float = 1.0

    @model_validator(mode="before")
    @classmethod
    def _accept_named_params(cls, data: Any) -> Any:
        if isinstance(data, dict) and "params" in data:
            data = dict(data)
            kind = NoiseKind(data["kind"])
            data["eta"] = _eta_from_named(kind, data.pop("params"))
        return data

    @model_serializer
    def _dump_named(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "params": self.named_params(), "h": self.h}

    # ---- structure ----------------------------------------------------- #

    @property
    def dim(self) -> int:
        return len(self.eta)

    @property
    def components(self) -> int:
        """Number of mixture components (1 for the other families)."""
        if self.kind is NoiseKind.GAUSSIAN_MIXTURE:
            return (len(self.eta) + 1) // 2
        return 1

    def as_array(self) -> np.ndarray:
        return np.asarray(self.eta, dtype=float)

    def with_eta(self, eta) -> NoiseParams:
        """Copy of this model with a new parameter vector."""
        return self.model_copy(update={"eta": tuple(float(v) for v in np.ravel(eta))})

    def labels(self) -> List[str]:
        """Component names of η, in order."""
        if self.kind is NoiseKind.GAUSSIAN_MIXTURE:
            k = self.components
            return [f"w{j + 1}" for j in range(k - 1)] + [f"sigma{j + 1}" for j in range(k)]
        return list(_SCALAR_PARAMS[self.kind])

    def named_params(self) -> Dict[str, Any]:
        if self.kind is NoiseKind.GAUSSIAN_MIXTURE:
            k = self.components
            weights = list(self.eta[: k - 1])
            weights.append(1.0 - sum(weights))
            return {"weights": weights, "sigmas": list(self.eta[k - 1:])}
        return dict(zip(_SCALAR_PARAMS[self.kind], self.eta))

    def check_domain(self) -> NoiseParams:
        """Raise ParameterDomainError unless η and h are admissible."""
        if not (math.isfinite(self.h) and self.h > 0):
            raise ParameterDomainError("h", self.h, "sampling interval must be positive")
        # Deferred import; the family registry imports this module.
        from levy_sysid.noise.base import NoiseFamilyProvider

        NoiseFamilyProvider.get(self.kind).check_domain(self)
        return self


class VgDerivedParams(BaseModel):
    """Gamma-process mean/variance pairs of a variance gamma law."""
    mu_p: float
    nu_p: float
    mu_n: float
    nu_n: float

    @classmethod
    def from_vg(cls, sigma: float, nu: float, theta: float) -> VgDerivedParams:
        root = 0.5 * math.sqrt(theta * theta + 2.0 * sigma * sigma / nu)
        mu_p = root + theta / 2.0
        mu_n = root - theta / 2.0
        return cls(mu_p=mu_p, nu_p=mu_p * mu_p * nu, mu_n=mu_n, nu_n=mu_n * mu_n * nu)


class NoiseMoments(BaseModel):
    """Mean, variance and fourth absolute (central) moment of one increment."""
    mean: float
    variance: float
    abs_moment_4: float
    kappa_4: float = Field(default=0.0, description="fourth cumulant")
