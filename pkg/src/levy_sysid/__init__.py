# levy_sysid/__init__.py
"""
levy-sysid package.

Simulation and three-stage identification of linear systems driven by
Lévy-process increments: prediction error, empirical characteristic
function estimation of the noise, and ECF re-estimation of the dynamics.
"""
# Public API
try:
    from levy_sysid.models.noise_params import NoiseKind, NoiseParams
    from levy_sysid.models.system_params import SystemParams
    from levy_sysid.models.frequency_grid import FrequencyGrid
    from levy_sysid.models.experiment_config import ExperimentConfig
    from levy_sysid.models.mc_report import McReport
except ImportError:
    pass

try:
    from levy_sysid.pipeline import run_pipeline
    from levy_sysid.monte_carlo import run_monte_carlo
    from levy_sysid.reporting import emit_report
except ImportError:
    pass

try:
    from levy_sysid.storage.base import ReportStoreInterface, ReportStoreProvider
except ImportError:
    pass

try:
    from levy_sysid.exceptions import (
        LevySysIdError,
        ParameterDomainError,
        StabilityError,
        ConfigurationError,
        NumericalInstabilityError,
        UnsupportedOperationError,
        PipelineStageError,
        InsufficientReplicationsError,
        ReportStorageError,
        ReportWriteError,
    )
except ImportError:
    pass

__version__ = "0.1.0"

__all__ = []

for name in [
    # Models
    'NoiseKind', 'NoiseParams', 'SystemParams', 'FrequencyGrid',
    'ExperimentConfig', 'McReport',

    # Pipeline
    'run_pipeline', 'run_monte_carlo', 'emit_report',

    # Storage
    'ReportStoreInterface', 'ReportStoreProvider',

    # Exceptions
    'LevySysIdError', 'ParameterDomainError', 'StabilityError',
    'ConfigurationError', 'NumericalInstabilityError', 'UnsupportedOperationError',
    'PipelineStageError', 'InsufficientReplicationsError',
    'ReportStorageError', 'ReportWriteError',
]:
    if name in globals():
        __all__.append(name)
