# levy_sysid/models/pe_result.py
"""
Result of prediction-error estimation.
"""
from pydantic import BaseModel, ConfigDict

from levy_sysid.models.array_codec import NdArray
from levy_sysid.models.system_params import SystemParams


class PeResult(BaseModel):
    """θ̂ with the PE information matrix and Σ_P = σ̂²·(R̂_P*)⁻¹."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    system: SystemParams
    theta_hat: NdArray
    cost: float
    r_p_star: NdArray
    sigma2_hat: float
    sigma_p: NdArray
    grad_norm: float
    iterations: int
    converged: bool
