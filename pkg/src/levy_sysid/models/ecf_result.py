# levy_sysid/models/ecf_result.py
"""
Result of empirical characteristic function estimation of η.
"""
from enum import Enum

from pydantic import BaseModel, ConfigDict

from levy_sysid.models.array_codec import NdArray
from levy_sysid.models.frequency_grid import FrequencyGrid
from levy_sysid.models.noise_params import NoiseParams


class Weighting(str, Enum):
    """Weighting matrix K of the ECF quadratic form."""
    IDENTITY = "identity"
    OPTIMAL_C = "optimal_c"


class EcfIidResult(BaseModel):
    """
    η̂ together with C, G and the asymptotic covariances at η̂.

    ``c_matrix`` and ``g_matrix`` are given on the grid points as supplied;
    the covariances are computed on the symmetric extension ±u.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    noise: NoiseParams
    eta_hat: NdArray
    grid: FrequencyGrid
    weighting: Weighting
    c_matrix: NdArray
    g_matrix: NdArray
    avar_optimal: NdArray
    avar_sandwich: NdArray
    cost: float
    iterations: int
    converged: bool
