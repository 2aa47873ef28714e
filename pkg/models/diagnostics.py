from typing import List

from pydantic import BaseModel, Field

from models.event import Side
from models.fit import FitResult
from models.kernel import KernelKind


class ResidualReport(BaseModel):
    component: Side
    residuals: List[float]
    ks_statistic: float = Field(..., ge=0, le=1)
    ks_critical_1pct: float
    passed: bool


class ComparisonReport(BaseModel):
    exp_fit: FitResult
    pl_fit: FitResult
    delta_log_likelihood: float = Field(..., description="power-law minus exponential")
    delta_aic: float = Field(..., description="power-law minus exponential")
    winner: KernelKind
    exp_residuals: List[ResidualReport] = []
    pl_residuals: List[ResidualReport] = []
