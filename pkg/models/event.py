import math
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Side(str, Enum):
    BUY = "B"
    SELL = "S"

    @property
    def index(self) -> int:
        return 0 if self is Side.BUY else 1

    @classmethod
    def from_index(cls, index: int) -> "Side":
        return cls.BUY if index == 0 else cls.SELL


class Event(BaseModel):
    model_config = ConfigDict(frozen=True)

    time: float = Field(..., ge=0)
    side: Side
    price: Optional[float] = None
    size: Optional[float] = Field(None, gt=0)

    @field_validator("time")
    @classmethod
    def _finite_time(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("time must be finite")
        return v


class EventStream(BaseModel):
    """Time-ordered buy/sell arrivals observed on the window [0, horizon]."""

    model_config = ConfigDict(frozen=True)

    events: List[Event] = []
    horizon: float = Field(..., gt=0)

    @model_validator(mode="after")
    def _check_order(self) -> "EventStream":
        if not math.isfinite(self.horizon):
            raise ValueError("horizon must be finite")
        last_time = -math.inf
        last_by_side = {Side.BUY: -math.inf, Side.SELL: -math.inf}
        for k, ev in enumerate(self.events):
            if ev.time < last_time:
                raise ValueError(f"event {k} at t={ev.time} is earlier than its predecessor")
            if ev.time == last_by_side[ev.side]:
                raise ValueError(f"event {k}: duplicate {ev.side.name} timestamp t={ev.time}")
            if ev.time > self.horizon:
                raise ValueError(f"event {k} at t={ev.time} lies beyond horizon {self.horizon}")
            last_time = ev.time
            last_by_side[ev.side] = ev.time
        return self

    def __len__(self) -> int:
        return len(self.events)

    def times_array(self) -> np.ndarray:
        return np.fromiter((e.time for e in self.events), dtype=np.float64, count=len(self.events))

    def marks_array(self) -> np.ndarray:
        return np.fromiter((e.side.index for e in self.events), dtype=np.int64, count=len(self.events))

    def count(self, side: Side) -> int:
        return sum(1 for e in self.events if e.side is side)

    def counts(self) -> Tuple[int, int]:
        return self.count(Side.BUY), self.count(Side.SELL)


class IngestConfig(BaseModel):
    strict: bool = True
    horizon: Optional[float] = Field(None, gt=0, description="Window length; overrides a '# horizon=' comment")
    window_start: Optional[float] = Field(None, ge=0, description="Window start; overrides a '# start=' comment")
