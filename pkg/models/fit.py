from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

from models.event import Side
from models.hawkes import HawkesModel
from models.kernel import KernelKind

Bounds = Dict[str, Tuple[float, float]]


class FitConfig(BaseModel):
    kind: KernelKind
    bounds: Optional[Bounds] = Field(None, description="Per-parameter [lower, upper]; defaults from the stream when omitted")
    initial: Optional[List[float]] = Field(None, description="Explicit start point for restart 0")
    restarts: int = Field(5, ge=1)
    ftol: float = Field(1e-8, gt=0, description="Relative objective change stopping threshold")
    gtol: float = Field(1e-5, gt=0, description="Projected gradient max-norm stopping threshold")
    max_iterations: int = Field(500, ge=1)
    seed: int = 42
    free_epsilon: bool = False
    fixed_epsilon: float = Field(0.01, gt=0)

    @field_validator("bounds")
    @classmethod
    def _ordered(cls, v):
        if v is None:
            return v
        for name, (lo, hi) in v.items():
            if not lo < hi:
                raise ValueError(f"bounds for {name}: lower {lo} must be < upper {hi}")
        return v


class FitResult(BaseModel):
    model: HawkesModel
    neg_log_likelihood: float
    converged: bool
    iterations: int
    gradient_norm: float
    start_point_used: List[float]
    aic: float
    n_params: int
    parameter_names: List[str]
    bounds: Bounds
    restart_objectives: List[Optional[float]] = []
    best_restart: int = 0
    flagged_components: List[Side] = []
    notes: List[str] = []

    @property
    def log_likelihood(self) -> float:
        return -self.neg_log_likelihood
