# levy_sysid/models/experiment_config.py
"""
Experiment configuration.

The configuration is a JSON document; ``ExperimentConfig.model_dump(mode="json")``
followed by ``ExperimentConfig.model_validate`` reproduces it exactly, so a
report that echoes its configuration can be re-run as is.
"""
from __future__ import annotations

import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, model_validator

from levy_sysid.models.frequency_grid import FrequencyGrid
from levy_sysid.models.noise_params import NoiseParams
from levy_sysid.models.system_params import SystemParams


class GridMode(str, Enum):
    AUTO = "auto"
    POINTS = "points"
    GEOMETRIC = "geometric"


class GridConfig(BaseModel):
    """The automatic or geometric rule with ``size`` points, or explicit ``points``."""
    mode: GridMode = GridMode.AUTO
    size: int = Field(default=10, ge=1)
    points: Optional[List[float]] = None

    @model_validator(mode="before")
    @classmethod
    def _points_imply_mode(cls, data: Any) -> Any:
        if isinstance(data, dict) and "points" in data and "mode" not in data:
            data = {**data, "mode": GridMode.POINTS.value}
        return data

    @model_validator(mode="after")
    def _check_points(self) -> GridConfig:
        if self.mode is GridMode.POINTS:
            if not self.points:
                raise ValueError("grid mode 'points' requires a non-empty 'points' list")
            FrequencyGrid(u=tuple(self.points))
        return self


class InitMode(str, Enum):
    LONG_AR = "long_ar"
    TRUE = "true"
    EXPLICIT = "explicit"


class InitConfig(BaseModel):
    """Starting point of the prediction-error search."""
    mode: InitMode = InitMode.LONG_AR
    long_ar_order: int = Field(default=20, ge=1)
    ar: Optional[List[float]] = None
    ma: Optional[List[float]] = None

    @model_validator(mode="after")
    def _explicit_needs_coefficients(self) -> InitConfig:
        if self.mode is InitMode.EXPLICIT and (self.ar is None or self.ma is None):
            raise ValueError("init mode 'explicit' requires 'ar' and 'ma'")
        return self


class EstimatorConfig(BaseModel):
    max_iter: int = Field(default=200, ge=1)
    tol_g: float = Field(default=1e-8, gt=0)
    burn_in: int = Field(default=500, ge=0)
    rho_stab: float = Field(default=0.02, gt=0, lt=0.5)
    init: InitConfig = Field(default_factory=InitConfig)
    eta_init: Optional[Dict[str, Any]] = None
    baseline_plain_scores: bool = False


class ReportFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class OutputConfig(BaseModel):
    directory: str = "results"
    formats: List[ReportFormat] = Field(
        default_factory=lambda: [ReportFormat.JSON, ReportFormat.CSV]
    )


class ExperimentConfig(BaseModel):
    """Complete description of one simulation/identification experiment."""

    system: SystemParams
    noise: NoiseParams
    n_samples: int = Field(gt=0)
    replications: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0)
    grid: GridConfig = Field(default_factory=GridConfig)
    stage3_grid: Optional[GridConfig] = None
    estimator: EstimatorConfig = Field(default_factory=EstimatorConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def _check_sample_size(self) -> ExperimentConfig:
        needed = self.estimator.burn_in + 10 * self.system.p
        if self.n_samples <= needed:
            raise ValueError(
                f"n_samples={self.n_samples} must exceed burn_in + 10·p = {needed}"
            )
        init = self.estimator.init
        if init.mode is InitMode.EXPLICIT and (
            len(init.ar) != self.system.p_a or len(init.ma) != self.system.p_c
        ):
            raise ValueError("explicit init must match the system orders")
        return self

    @property
    def effective_stage3_grid(self) -> GridConfig:
        return self.stage3_grid if self.stage3_grid is not None else self.grid

    def eta_init_params(self) -> NoiseParams:
        """Stage-2 starting point; the simulated noise unless ``eta_init`` is set."""
        if self.estimator.eta_init is None:
            return self.noise
        return NoiseParams.model_validate(
            {"kind": self.noise.kind.value, "params": self.estimator.eta_init, "h": self.noise.h}
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> ExperimentConfig:
        with open(path, "r", encoding="utf-8") as f:
            return cls.model_validate(json.load(f))
