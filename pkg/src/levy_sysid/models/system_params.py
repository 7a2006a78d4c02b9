# levy_sysid/models/system_params.py
"""
System models: the monic ARMA parametrisation of A(θ, q⁻¹) = C(q⁻¹)/A(q⁻¹)
and the signals derived from it.
"""
from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from levy_sysid.models.array_codec import NdArray


class SystemParams(BaseModel):
    """
    Coefficients of the monic polynomials 1 + Σ a_i q⁻ⁱ (``ar``) and
    1 + Σ c_j q⁻ʲ (``ma``). θ is ``ar`` followed by ``ma``.
    """
    model_config = ConfigDict(frozen=True)

    ar: Tuple[float, ...] = ()
    ma: Tuple[float, ...] = ()

    @property
    def p_a(self) -> int:
        return len(self.ar)

    @property
    def p_c(self) -> int:
        return len(self.ma)

    @property
    def p(self) -> int:
        return len(self.ar) + len(self.ma)

    @property
    def theta(self) -> np.ndarray:
        return np.asarray(self.ar + self.ma, dtype=float)

    def ar_poly(self) -> np.ndarray:
        return np.concatenate(([1.0], np.asarray(self.ar, dtype=float)))

    def ma_poly(self) -> np.ndarray:
        return np.concatenate(([1.0], np.asarray(self.ma, dtype=float)))

    def labels(self) -> List[str]:
        return [f"a{i + 1}" for i in range(self.p_a)] + [f"c{j + 1}" for j in range(self.p_c)]

    def with_theta(self, theta: Sequence[float]) -> SystemParams:
        """Same orders, new coefficient vector."""
        theta = [float(v) for v in np.ravel(theta)]
        if len(theta) != self.p:
            raise ValueError(f"theta has length {len(theta)}, expected {self.p}")
        return SystemParams(ar=tuple(theta[: self.p_a]), ma=tuple(theta[self.p_a:]))


class StabilityReport(BaseModel):
    """Roots of a monic polynomial and their distance to the stability limit."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    stable: bool
    margin: float
    roots: NdArray

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.roots)


class SignalBundle(BaseModel):
    """
    Innovations ε_n(θ) with their first (N×p) and, on demand, second
    (N×p×p) θ-sensitivities.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    eps: NdArray
    eps_grad: Optional[NdArray] = None
    eps_hess: Optional[NdArray] = None

    @property
    def n(self) -> int:
        return int(self.eps.shape[0])

    def drop(self, burn_in: int) -> SignalBundle:
        """Bundle without the first ``burn_in`` samples."""
        return SignalBundle(
            eps=self.eps[burn_in:],
            eps_grad=None if self.eps_grad is None else self.eps_grad[burn_in:],
            eps_hess=None if self.eps_hess is None else self.eps_hess[burn_in:],
        )
