# levy_sysid/models/stage3_result.py
"""
Result of the sensitivity-weighted ECF re-estimation of θ.
"""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict

from levy_sysid.models.array_codec import NdArray
from levy_sysid.models.system_params import SystemParams


class ScoreKind(str, Enum):
    """Per-sample score used in the re-estimation."""
    # (e^{iuε} − φ)·ε_θ
    SENSITIVITY = "sensitivity"
    # e^{iuε} − φ, comparison baseline only
    PLAIN = "plain"


class Stage3Result(BaseModel):
    """θ̂̂ with ψ, κ = ψ*C⁻¹ψ and the asymptotic covariance κ⁻¹(R_P*)⁻¹."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    system: SystemParams
    theta_hat2: NdArray
    score_kind: ScoreKind = ScoreKind.SENSITIVITY
    psi: NdArray
    kappa: float
    avar_stage3: NdArray
    efficiency_ratio_vs_pe: float
    mu: Optional[float] = None
    cost: float
    grad_norm: float
    iterations: int
    converged: bool


class KappaStudy(BaseModel):
    """κ(M) on nested equally spaced grids, compared with the location Fisher information."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    m_values: List[int]
    u_max: float
    kappa: NdArray
    well_conditioned: List[bool]
    conditioning_ok: bool
    limit: float
    mu: Optional[float] = None
