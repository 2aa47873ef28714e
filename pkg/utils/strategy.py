"""
Clustering-based liquidity provision backtest.

A side-i cluster opens at the first event (of either side) where the inclusive
intensity lambda_i reaches k * mu_i and closes when lambda_i drops below
mu_i + c * (peak - mu_i). Between events the intensity is non-increasing, so
the close time is the exact crossing found by Brent's method. Every decision
at time t only looks at events at or before t.

On a Buy-cluster open a sell limit is posted offset_ticks above the last
price; on a Sell-cluster open a buy limit offset_ticks below. Limits fill on
touch by a later event price, cluster orders are cancelled at cluster close,
filled cluster orders get an offsetting take-profit limit, and a stop-loss
flattens inventory at the last price.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.optimize import brentq

from models.event import EventStream, Side
from models.hawkes import HawkesModel
from models.strategy import BacktestReport, ClusterEvent, Ledger, StrategyConfig, Trade
from utils.errors import HawkesInputError, HawkesNumericalError
from utils.hawkes_model import intensity_many

PRICE_TOL = 1e-9
INVENTORY_TOL = 1e-9


def _side_intensity(model, times, marks, i: int, t: float, inclusive: bool) -> float:
    return float(intensity_many(model, times, marks, np.array([t]), np.array([inclusive]))[0, i])


def _close_time(model, times, marks, i: int, t_prev: float, t_next: float, level: float) -> Optional[float]:
    """Crossing time of lambda_i below level inside (t_prev, t_next], or None."""
    if _side_intensity(model, times, marks, i, t_next, False) >= level:
        return None

    def f(t):
        return _side_intensity(model, times, marks, i, t, t <= t_prev) - level

    if f(t_prev) < 0:
        return t_prev
    return float(brentq(f, t_prev, t_next, xtol=1e-12, rtol=1e-12))


def detect_clusters(model: HawkesModel, stream: EventStream, cfg: StrategyConfig) -> List[ClusterEvent]:
    times = np.ascontiguousarray(stream.times_array())
    marks = np.ascontiguousarray(stream.marks_array())
    clusters: List[ClusterEvent] = []
    if times.size == 0:
        return clusters
    lam_incl = intensity_many(model, times, marks, times, np.ones(times.size, dtype=bool))

    for i in (0, 1):
        side = Side.from_index(i)
        mu = model.mu[i]
        trigger = cfg.threshold_multiplier * mu
        is_open = False
        start = peak = opened = 0.0
        t_prev = 0.0
        for k in range(times.size):
            t = float(times[k])
            if is_open and t > t_prev:
                level = mu + cfg.cancel_decay_fraction * (peak - mu)
                end = _close_time(model, times, marks, i, t_prev, t, level)
                if end is not None:
                    clusters.append(ClusterEvent(side=side, start=start, end=end, open_intensity=opened, peak_intensity=peak))
                    is_open = False
            lam = float(lam_incl[k, i])
            if is_open:
                peak = max(peak, lam)
            elif lam >= trigger and t < stream.horizon:
                is_open, start, peak, opened = True, t, lam, lam
            t_prev = t
        if is_open:
            level = mu + cfg.cancel_decay_fraction * (peak - mu)
            end = None
            if stream.horizon > t_prev:
                end = _close_time(model, times, marks, i, t_prev, stream.horizon, level)
            clusters.append(
                ClusterEvent(
                    side=side,
                    start=start,
                    end=end if end is not None else stream.horizon,
                    open_intensity=opened,
                    peak_intensity=peak,
                )
            )

    clusters.sort(key=lambda c: (c.start, c.side.index))
    logger.info(f"Detected {len(clusters)} clusters")
    return clusters


def mark_to_market(ledger: Ledger, last_price: float) -> float:
    return ledger.cash + ledger.inventory * last_price


@dataclass
class _Order:
    side: Side
    price: float
    size: float
    cluster_id: Optional[int]


class _Book:
    """Resting orders plus the cash/inventory ledger."""

    def __init__(self, cfg: StrategyConfig):
        self.cfg = cfg
        self.ledger = Ledger()
        self.orders: List[_Order] = []
        self.trades: List[Trade] = []

    def resting(self, side: Side) -> float:
        return sum(o.size for o in self.orders if o.side is side)

    def capacity(self, side: Side) -> float:
        inv = self.ledger.inventory
        if side is Side.SELL:
            return self.cfg.max_inventory + inv - self.resting(Side.SELL)
        return self.cfg.max_inventory - inv - self.resting(Side.BUY)

    def execute(self, t: float, side: Side, price: float, size: float, reason: str) -> None:
        led = self.ledger
        signed = size if side is Side.BUY else -size
        new_inv = led.inventory + signed
        if led.inventory == 0 or (led.inventory > 0) == (signed > 0):
            total = abs(led.inventory) + size
            led.avg_entry_price = (led.avg_entry_price * abs(led.inventory) + price * size) / total
        elif abs(signed) > abs(led.inventory):
            led.avg_entry_price = price
        elif abs(new_inv) < INVENTORY_TOL:
            led.avg_entry_price = 0.0
        led.cash += -signed * price - self.cfg.fee_per_trade
        led.inventory = 0.0 if abs(new_inv) < INVENTORY_TOL else new_inv
        if abs(led.inventory) > self.cfg.max_inventory + INVENTORY_TOL:
            raise HawkesNumericalError(f"inventory {led.inventory} exceeds max_inventory at t={t}")
        self.trades.append(Trade(time=t, side=side, price=price, size=size, fee=self.cfg.fee_per_trade, reason=reason))

    def fill_resting(self, t: float, price: float) -> List[_Order]:
        """Fill every order the event price touches; returns take-profit orders to post afterwards."""
        offset = self.cfg.offset_ticks * self.cfg.tick_size
        tol = PRICE_TOL * self.cfg.tick_size
        follow_ups: List[_Order] = []
        remaining: List[_Order] = []
        for o in self.orders:
            touched = price >= o.price - tol if o.side is Side.SELL else price <= o.price + tol
            if not touched:
                remaining.append(o)
                continue
            self.execute(t, o.side, o.price, o.size, "fill" if o.cluster_id is not None else "take_profit")
            if o.cluster_id is not None and self.cfg.take_profit:
                exit_side = Side.BUY if o.side is Side.SELL else Side.SELL
                exit_price = o.price - offset if o.side is Side.SELL else o.price + offset
                follow_ups.append(_Order(exit_side, exit_price, o.size, None))
        self.orders = remaining
        return follow_ups


def run_backtest(model: HawkesModel, stream: EventStream, cfg: StrategyConfig) -> BacktestReport:
    """Replay the stream once, trading on clusters detected from the fitted model."""
    if any(e.price is None for e in stream.events):
        raise HawkesInputError("backtest needs a price on every event")
    clusters = detect_clusters(model, stream, cfg)
    opens: Dict[float, List[Tuple[int, ClusterEvent]]] = {}
    for n, c in enumerate(clusters):
        opens.setdefault(c.start, []).append((n, c))

    # closes first at equal times, then events
    timeline = [(c.end, 0, n) for n, c in enumerate(clusters)]
    timeline += [(e.time, 1, k) for k, e in enumerate(stream.events)]
    timeline.sort(key=lambda x: (x[0], x[1], x[2]))

    book = _Book(cfg)
    tick = cfg.tick_size
    offset = cfg.offset_ticks * tick
    stop_distance = cfg.stop_loss_ticks * tick
    last_price: Optional[float] = None
    n_stops = 0
    pnl_series: List[Tuple[float, float]] = []

    for t, kind, idx in timeline:
        if kind == 0:
            book.orders = [o for o in book.orders if o.cluster_id != idx]
            continue
        ev = stream.events[idx]
        price = float(ev.price)
        follow_ups = book.fill_resting(t, price)

        inv = book.ledger.inventory
        if inv != 0:
            adverse = (book.ledger.avg_entry_price - price) if inv > 0 else (price - book.ledger.avg_entry_price)
            if adverse >= stop_distance - PRICE_TOL * tick:
                close_side = Side.SELL if inv > 0 else Side.BUY
                book.execute(t, close_side, price, abs(inv), "stop_loss")
                book.orders = [o for o in book.orders if o.cluster_id is not None]
                follow_ups = []
                n_stops += 1
        last_price = price

        # clusters opening at this time post at its first event
        for n, cluster in opens.pop(ev.time, []):
            size = cfg.base_order_size
            if cfg.size_intensity_scaling:
                size *= cluster.open_intensity / (cfg.threshold_multiplier * model.mu[cluster.side.index])
            order_side = Side.SELL if cluster.side is Side.BUY else Side.BUY
            size = min(size, book.capacity(order_side))
            if size > INVENTORY_TOL:
                limit = price + offset if order_side is Side.SELL else price - offset
                book.orders.append(_Order(order_side, limit, size, n))
        book.orders.extend(follow_ups)
        pnl_series.append((t, mark_to_market(book.ledger, last_price)))

    final_price = last_price if last_price is not None else 0.0
    total = mark_to_market(book.ledger, final_price)
    pnl_series.append((stream.horizon, total))
    values = np.array([p for _, p in pnl_series])
    drawdown = float(np.max(np.maximum.accumulate(values) - values)) if values.size else 0.0
    logger.info(f"Backtest: {len(book.trades)} trades, total_pnl={total:.6f}, stops={n_stops}")
    return BacktestReport(
        trades=book.trades,
        pnl_series=pnl_series,
        total_pnl=total,
        max_drawdown=drawdown,
        n_clusters_detected=len(clusters),
        n_stop_loss_hits=n_stops,
        final_cash=book.ledger.cash,
        final_inventory=book.ledger.inventory,
        final_price=final_price,
        clusters=clusters,
    )


def pnl_from_trades(trades: List[Trade], final_price: float) -> float:
    """Re-derive total PnL from the trade list alone."""
    cash = 0.0
    inventory = 0.0
    for tr in trades:
        signed = tr.size if tr.side is Side.BUY else -tr.size
        cash += -signed * tr.price - tr.fee
        inventory += signed
    return cash + inventory * final_price


def format_trades_csv(trades: List[Trade]) -> str:
    lines = ["time,side,price,size"]
    lines += [f"{t.time:.9f},{t.side.value},{t.price!r},{t.size!r}" for t in trades]
    return "\n".join(lines) + "\n"
