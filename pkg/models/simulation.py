from pydantic import BaseModel, Field

from models.event import EventStream


class SimConfig(BaseModel):
    horizon: float = Field(..., gt=0)
    seed: int = 42
    max_events: int = Field(1_000_000, gt=0)
    allow_nonstationary: bool = Field(False, description="Simulate a supercritical model anyway; logs a warning")


class SimulationResult(BaseModel):
    stream: EventStream
    seed: int
    truncated: bool = False
    n_candidates: int = 0
    n_accepted: int = 0
