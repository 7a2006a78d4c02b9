# levy_sysid/models/pipeline_result.py
"""
Combined result of one pass of the three-stage pipeline.
"""
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict

from levy_sysid.models.ecf_result import EcfIidResult
from levy_sysid.models.pe_result import PeResult
from levy_sysid.models.stage3_result import Stage3Result


class PipelineResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    seed: int
    pe: PeResult
    ecf: EcfIidResult
    stage3: Stage3Result
    stage3_plain: Optional[Stage3Result] = None

    @property
    def converged(self) -> Dict[str, bool]:
        flags = {
            "pe": self.pe.converged,
            "ecf": self.ecf.converged,
            "stage3": self.stage3.converged,
        }
        if self.stage3_plain is not None:
            flags["stage3_plain"] = self.stage3_plain.converged
        return flags

    def to_document(self, config: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        data = self.model_dump(mode="json")
        if config is not None:
            data["config"] = config
        data["converged"] = self.converged
        return data
