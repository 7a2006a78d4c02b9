# levy_sysid/noise/base.py
"""
Base interface and registry for increment-law families.

A family implements the characteristic function φ(u, η) of the centered
increment over one sampling interval, its η-gradient, a sampler, the second
and fourth cumulants and, when it has one in closed form, the density.
"""
import math
from abc import ABC, abstractmethod
from typing import Dict, Optional, Tuple

import numpy as np

from levy_sysid.exceptions import ParameterDomainError, UnsupportedOperationError
from levy_sysid.models.noise_params import NoiseKind, NoiseParams


class NoiseFamily(ABC):
    """Interface for a family of centered i.i.d. increment laws."""

    kind: NoiseKind

    @abstractmethod
    def check_domain(self, model: NoiseParams) -> None:
        """Raise ParameterDomainError naming the first offending parameter."""
        ...

    @abstractmethod
    def cf(self, model: NoiseParams, u: np.ndarray) -> np.ndarray:
        """φ(u, η) for a 1-d array of frequencies."""
        ...

    @abstractmethod
    def cf_grad_eta(self, model: NoiseParams, u: np.ndarray) -> np.ndarray:
        """∂φ/∂η as an array of shape (len(u), dim η)."""
        ...

    @abstractmethod
    def cumulants(self, model: NoiseParams) -> Tuple[float, float]:
        """Second and fourth cumulants of one increment."""
        ...

    def sample(self, model: NoiseParams, n: int, rng: np.random.Generator) -> np.ndarray:
        raise UnsupportedOperationError("sample_increments", model.kind.value)

    def density(self, model: NoiseParams, x: np.ndarray) -> Optional[np.ndarray]:
        """Density at x, or None when the family has no closed-form density."""
        return None

    def score_location(self, model: NoiseParams, x: np.ndarray) -> Optional[np.ndarray]:
        """f′(x)/f(x), or None when the density is unavailable."""
        return None

    def positive_parameters(self, model: NoiseParams) -> np.ndarray:
        """Mask of η entries that must stay strictly positive."""
        return np.ones(model.dim, dtype=bool)

    def quadrature_breakpoints(self, model: NoiseParams) -> Tuple[float, ...]:
        """Scales at which the density changes shape, for adaptive quadrature."""
        return ()

    # ---- shared helpers ------------------------------------------------ #

    @staticmethod
    def _require_positive(name: str, value: float) -> None:
        if not (math.isfinite(value) and value > 0):
            raise ParameterDomainError(name, value, "must be strictly positive")

    @staticmethod
    def _require_finite(name: str, value: float) -> None:
        if not math.isfinite(value):
            raise ParameterDomainError(name, value, "must be finite")

    def _require_dim(self, model: NoiseParams, dim: int) -> None:
        if model.dim != dim:
            raise ParameterDomainError(
                "eta", model.eta, f"{self.kind.value} expects {dim} parameters"
            )


class NoiseFamilyProvider:
    """Registry mapping each NoiseKind to its family implementation."""
    _families: Dict[NoiseKind, NoiseFamily] = {}

    @classmethod
    def _load_defaults(cls) -> None:
        if cls._families:
            return
        # Deferred; the families import this module.
        from levy_sysid.noise.families import default_families

        for family in default_families():
            cls._families.setdefault(family.kind, family)

    @classmethod
    def get(cls, kind: NoiseKind) -> NoiseFamily:
        """Family implementation for ``kind``."""
        cls._load_defaults()
        kind = NoiseKind(kind)
        if kind not in cls._families:
            raise UnsupportedOperationError("family lookup", kind.value)
        return cls._families[kind]

    @classmethod
    def register(cls, family: NoiseFamily) -> None:
        """Install or replace the implementation for ``family.kind``."""
        cls._load_defaults()
        cls._families[family.kind] = family
