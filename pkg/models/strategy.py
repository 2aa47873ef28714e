from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field

from models.event import Side


class StrategyConfig(BaseModel):
    threshold_multiplier: float = Field(3.0, gt=0, description="Cluster opens when lambda_i >= k * mu_i")
    offset_ticks: int = Field(1, ge=1)
    tick_size: float = Field(0.01, gt=0)
    base_order_size: float = Field(1.0, gt=0)
    size_intensity_scaling: bool = False
    stop_loss_ticks: int = Field(5, ge=1)
    cancel_decay_fraction: float = Field(0.2, gt=0, lt=1, description="Cluster closes below mu + c * (peak - mu)")
    max_inventory: float = Field(10.0, gt=0)
    fee_per_trade: float = Field(0.0, ge=0)
    take_profit: bool = Field(True, description="Post an offsetting limit offset_ticks back after each cluster fill")


class ClusterEvent(BaseModel):
    model_config = ConfigDict(frozen=True)

    side: Side
    start: float
    end: float
    open_intensity: float = Field(description="lambda_i just after the opening event")
    peak_intensity: float


class Trade(BaseModel):
    model_config = ConfigDict(frozen=True)

    time: float
    side: Side
    price: float
    size: float
    fee: float = 0.0
    reason: str = "fill"


class Ledger(BaseModel):
    cash: float = 0.0
    inventory: float = 0.0
    avg_entry_price: float = 0.0


class BacktestReport(BaseModel):
    trades: List[Trade] = []
    pnl_series: List[Tuple[float, float]] = []
    total_pnl: float = 0.0
    max_drawdown: float = 0.0
    n_clusters_detected: int = 0
    n_stop_loss_hits: int = 0
    final_cash: float = 0.0
    final_inventory: float = 0.0
    final_price: float = 0.0
    clusters: List[ClusterEvent] = []
