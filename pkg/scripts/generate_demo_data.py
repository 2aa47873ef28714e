"""
Generate demo event streams: one exponential and one power-law model, each
with a random-walk price attached to every event.
Run: python -m scripts.generate_demo_data [out_dir]
"""
import sys
from pathlib import Path

import numpy as np

from config.log import configure_logging
from models.event import Event, EventStream, Side
from models.hawkes import HawkesModel
from models.kernel import KernelKind
from models.simulation import SimConfig
from utils.event_data import write_csv
from utils.simulate import simulate

START_PRICE = 100.0
TICK = 0.01
HORIZON = 200.0
SEED = 42


def demo_models():
    exp_model = HawkesModel(
        kind=KernelKind.EXPONENTIAL,
        mu=(0.5, 0.5),
        alpha=[[0.8, 0.3], [0.3, 0.8]],
        beta=[[2.0, 2.0], [2.0, 2.0]],
    )
    pl_model = HawkesModel(
        kind=KernelKind.POWER_LAW,
        mu=(0.5, 0.5),
        alpha=[[0.02, 0.005], [0.005, 0.02]],
        beta=[[1.5, 1.5], [1.5, 1.5]],
        epsilon=[[0.01, 0.01], [0.01, 0.01]],
    )
    return {"demo_exponential.csv": exp_model, "demo_power_law.csv": pl_model}


def attach_prices(stream: EventStream, seed: int) -> EventStream:
    """Buys tick the price up and sells tick it down, each with probability one half."""
    rng = np.random.default_rng(seed)
    price_ticks = int(round(START_PRICE / TICK))
    events = []
    for ev in stream.events:
        if rng.random() < 0.5:
            price_ticks += 1 if ev.side is Side.BUY else -1
        events.append(Event(time=ev.time, side=ev.side, price=round(price_ticks * TICK, 2), size=1.0))
    return EventStream(events=events, horizon=stream.horizon)


def run(out_dir: str = "data"):
    configure_logging("INFO")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, model in demo_models().items():
        result = simulate(model, SimConfig(horizon=HORIZON, seed=SEED))
        write_csv(attach_prices(result.stream, SEED), out / name, {"seed": SEED})
        (out / name.replace(".csv", "_model.json")).write_text(model.to_json(), encoding="utf-8")


if __name__ == "__main__":
    run(*sys.argv[1:2])
