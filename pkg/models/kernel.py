from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class KernelKind(str, Enum):
    EXPONENTIAL = "exponential"
    POWER_LAW = "power_law"


class KernelSpec(BaseModel):
    """One excitation kernel phi(tau).

    Exponential: alpha * exp(-beta * tau).
    Power law:   alpha / (tau + epsilon) ** beta.
    """

    model_config = ConfigDict(frozen=True)

    kind: KernelKind
    alpha: float = Field(..., ge=0)
    beta: float = Field(..., gt=0)
    epsilon: Optional[float] = Field(None, gt=0)

    @model_validator(mode="after")
    def _epsilon_matches_kind(self) -> "KernelSpec":
        if self.kind is KernelKind.POWER_LAW and self.epsilon is None:
            raise ValueError("power_law kernel needs epsilon > 0")
        if self.kind is KernelKind.EXPONENTIAL and self.epsilon is not None:
            raise ValueError("exponential kernel takes no epsilon")
        return self
