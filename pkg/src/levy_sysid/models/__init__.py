# levy_sysid/models/__init__.py
"""
Data models for levy-sysid.
"""
from levy_sysid.models.noise_params import NoiseKind, NoiseParams, NoiseMoments, VgDerivedParams
from levy_sysid.models.system_params import SystemParams, SignalBundle, StabilityReport
from levy_sysid.models.frequency_grid import FrequencyGrid
from levy_sysid.models.pe_result import PeResult
from levy_sysid.models.ecf_result import EcfIidResult, Weighting
from levy_sysid.models.stage3_result import KappaStudy, Stage3Result, ScoreKind
from levy_sysid.models.pipeline_result import PipelineResult
from levy_sysid.models.experiment_config import (
    ExperimentConfig,
    EstimatorConfig,
    GridConfig,
    GridMode,
    InitConfig,
    InitMode,
    OutputConfig,
    ReportFormat,
)
from levy_sysid.models.replication_run import ReplicationRun, RunStatus
from levy_sysid.models.mc_report import CovarianceComparison, McReport, TimingSummary

__all__ = [
    "NoiseKind", "NoiseParams", "NoiseMoments", "VgDerivedParams",
    "SystemParams", "SignalBundle", "StabilityReport",
    "FrequencyGrid",
    "PeResult", "EcfIidResult", "Weighting", "Stage3Result", "ScoreKind", "KappaStudy",
    "PipelineResult",
    "ExperimentConfig", "EstimatorConfig", "GridConfig", "GridMode",
    "InitConfig", "InitMode", "OutputConfig", "ReportFormat",
    "ReplicationRun", "RunStatus",
    "CovarianceComparison", "McReport", "TimingSummary",
]
