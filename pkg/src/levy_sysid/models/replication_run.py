# levy_sysid/models/replication_run.py
"""
Replication run model: one seeded pass of the identification pipeline
inside a Monte Carlo study.
"""
from __future__ import annotations

from datetime import datetime, timezone
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class RunStatus(str, Enum):
    """Status of a replication run."""
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


class ReplicationRun(BaseModel):
    """Seed, status and estimates of a single replication."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    index: int
    seed: int
    status: RunStatus = RunStatus.PENDING
    started_at: Optional[datetime] = None
    ended_at: Optional[datetime] = None
    failure_reason: Optional[str] = None
    failed_stage: Optional[str] = None
    theta_pe: List[float] = Field(default_factory=list)
    eta: List[float] = Field(default_factory=list)
    theta_s3: List[float] = Field(default_factory=list)
    theta_plain: Optional[List[float]] = None
    converged: Dict[str, bool] = Field(default_factory=dict)

    def mark_running(self) -> None:
        self.status = RunStatus.RUNNING
        self.started_at = datetime.now(timezone.utc)

    def mark_completed(self) -> None:
        self.status = RunStatus.COMPLETED
        self.ended_at = datetime.now(timezone.utc)

    def mark_failed(self, reason: Optional[str] = None, stage: Optional[str] = None) -> None:
        self.status = RunStatus.FAILED
        self.ended_at = datetime.now(timezone.utc)
        self.failure_reason = reason
        self.failed_stage = stage

    @property
    def succeeded(self) -> bool:
        return self.status is RunStatus.COMPLETED

    def get_duration(self) -> Optional[float]:
        """Wall-clock seconds, or None while the run is unfinished."""
        if self.started_at is None or self.ended_at is None:
            return None
        return (self.ended_at - self.started_at).total_seconds()
