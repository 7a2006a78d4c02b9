# levy_sysid/models/frequency_grid.py
"""
Frequency grid for empirical characteristic function scores.
"""
from __future__ import annotations

import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator


class FrequencyGrid(BaseModel):
    """Evaluation points u_1 < … < u_M, finite and nonzero."""
    model_config = ConfigDict(frozen=True)

    u: Tuple[float, ...]

    @field_validator("u")
    @classmethod
    def _check_points(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if not value:
            raise ValueError("grid must contain at least one point")
        if any(not math.isfinite(v) or v == 0.0 for v in value):
            raise ValueError("grid points must be finite and nonzero")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("grid points must be strictly increasing")
        return value

    @classmethod
    def equally_spaced(cls, u_max: float, size: int) -> FrequencyGrid:
        """``size`` points j·u_max/size, j = 1..size."""
        return cls(u=tuple(float(u_max) * j / size for j in range(1, size + 1)))

    @property
    def size(self) -> int:
        return len(self.u)

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.u, dtype=float)

    def symmetric(self) -> np.ndarray:
        """The points followed by their negatives."""
        values = self.values
        return np.concatenate((values, -values))
