# levy_sysid/models/mc_report.py
"""
Monte Carlo report models.
"""
from __future__ import annotations

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from levy_sysid.models.array_codec import NdArray
from levy_sysid.models.replication_run import ReplicationRun

# Fields that change from run to run of the same experiment.
TIMING_FIELDS = {"started_at", "ended_at"}


class CovarianceComparison(BaseModel):
    """N-scaled empirical covariance of one estimator against its theory."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    estimator: str
    labels: List[str]
    empirical: NdArray
    theoretical: Optional[NdArray] = None
    # empirical / theoretical, diagonal entries
    diagonal_ratio: Optional[List[float]] = None


class TimingSummary(BaseModel):
    replications: int = 0
    total_seconds: float = 0.0
    min_seconds: float = 0.0
    mean_seconds: float = 0.0
    max_seconds: float = 0.0
    threads: int = 1


class McReport(BaseModel):
    """Everything a Monte Carlo study produces."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    config: Dict[str, Any]
    n_samples: int
    # samples after burn-in; empirical covariances are scaled by it
    n_effective: int
    replications_requested: int
    replications_succeeded: int
    theta_labels: List[str]
    eta_labels: List[str]
    runs: List[ReplicationRun]
    comparisons: Dict[str, CovarianceComparison] = Field(default_factory=dict)
    # stage-3 over PE empirical variance, diagonal entries
    efficiency_ratio: List[float] = Field(default_factory=list)
    theoretical_efficiency_ratio: Optional[float] = None
    cross_covariance_eta_theta: Optional[NdArray] = None
    kappa: Optional[float] = None
    mu: Optional[float] = None
    sigma2: Optional[float] = None
    timing: TimingSummary = Field(default_factory=TimingSummary)

    @property
    def successful_runs(self) -> List[ReplicationRun]:
        return [run for run in self.runs if run.succeeded]

    def to_document(self) -> Dict[str, Any]:
        """JSON document without wall-clock data."""
        data = self.model_dump(mode="json", exclude={"timing", "runs"})
        data["runs"] = [
            run.model_dump(mode="json", exclude=TIMING_FIELDS) for run in self.runs
        ]
        return data

    def timing_document(self) -> Dict[str, Any]:
        return {
            "summary": self.timing.model_dump(mode="json"),
            "runs": [
                {"index": run.index, "seconds": run.get_duration()} for run in self.runs
            ],
        }
