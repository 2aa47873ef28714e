from typing import Optional

from fastapi import APIRouter
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from models.hawkes import HawkesModel
from utils.dependencies import http_errors
from utils.pipeline import run_simulate

router = APIRouter(prefix="/simulate", tags=["Simulate"])


class SimulateRequest(BaseModel):
    model: HawkesModel
    horizon: float = Field(..., gt=0)
    seed: Optional[int] = None
    max_events: Optional[int] = Field(None, gt=0)
    allow_nonstationary: bool = False


@router.post("", response_class=PlainTextResponse)
async def simulate_events(request: SimulateRequest):
    """Simulate an event stream by thinning and return it as event CSV"""
    with http_errors():
        return run_simulate(request.model, request.horizon, request.seed, request.max_events, request.allow_nonstationary)
