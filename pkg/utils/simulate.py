"""
Thinning simulation of the bivariate model.

Between events both intensities are non-increasing, so the total intensity
just after the current time bounds it until the next accepted event. The bound
is re-tightened to the total intensity at every rejected candidate.

Randomness: numpy ``Generator(PCG64(seed))``. Each candidate consumes one
standard exponential (gap) and one uniform (accept + type), in that order.
"""
from typing import Tuple

import numpy as np
from loguru import logger

from models.event import Event, EventStream, Side
from models.hawkes import HawkesModel
from models.kernel import KernelKind
from models.simulation import SimConfig, SimulationResult
from utils.errors import HawkesInputError, HawkesNumericalError
from utils.kernels import branching_matrix, is_stationary, phi

TIE_NUDGE = 1e-9


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


class _ExponentialState:
    """Decayed event sums r_ij(t) = sum_{s in j, s <= t} exp(-beta_ij (t - s))."""

    def __init__(self, model: HawkesModel):
        self.mu, self.alpha, self.beta, _ = model.arrays()
        self.r = np.zeros((2, 2))
        self.t = 0.0

    def intensity(self, s: float) -> Tuple[float, float, np.ndarray]:
        r = self.r * np.exp(-self.beta * (s - self.t))
        lam = self.mu + (self.alpha * r).sum(axis=1)
        return float(lam[0]), float(lam[1]), r

    def advance(self, s: float, r: np.ndarray, mark: int = -1) -> None:
        if mark >= 0:
            r[:, mark] += 1.0
        self.r = r
        self.t = s


class _DirectState:
    """Full history; intensity by direct summation over past events."""

    def __init__(self, model: HawkesModel, capacity: int = 1024):
        self.model = model
        self.mu, self.alpha, self.beta, self.eps = model.arrays()
        self.times = np.empty(capacity)
        self.marks = np.empty(capacity, dtype=np.int64)
        self.n = 0

    def intensity(self, s: float) -> Tuple[float, float, None]:
        lam = self.mu.copy()
        if self.n:
            lag = s - self.times[: self.n]
            marks = self.marks[: self.n]
            for j in range(2):
                lj = lag[marks == j]
                if lj.size == 0:
                    continue
                for i in range(2):
                    lam[i] += phi(self.model.kind, self.alpha[i, j], self.beta[i, j], self.eps[i, j], lj).sum()
        return float(lam[0]), float(lam[1]), None

    def advance(self, s: float, _r, mark: int = -1) -> None:
        if mark < 0:
            return
        if self.n == self.times.size:
            self.times = np.concatenate([self.times, np.empty(self.times.size)])
            self.marks = np.concatenate([self.marks, np.empty(self.marks.size, dtype=np.int64)])
        self.times[self.n] = s
        self.marks[self.n] = mark
        self.n += 1


def simulate(model: HawkesModel, cfg: SimConfig) -> SimulationResult:
    """Draw one event stream on (0, cfg.horizon] by thinning."""
    report = is_stationary(model)
    if not report.stationary:
        if not cfg.allow_nonstationary:
            raise HawkesInputError(f"model is not stationary ({report.reason}); set allow_nonstationary to override")
        logger.warning(f"Simulating a non-stationary model ({report.reason}); max_events={cfg.max_events}")

    rng = make_rng(cfg.seed)
    state = _ExponentialState(model) if model.kind is KernelKind.EXPONENTIAL else _DirectState(model)
    _, alpha, beta, eps = model.arrays()
    jump = np.array([[phi(model.kind, alpha[i, j], beta[i, j], eps[i, j], np.float64(0.0)) for j in range(2)] for i in range(2)])

    events = []
    t = 0.0
    last_time = 0.0
    lam_bar = float(sum(model.mu))
    n_candidates = 0
    truncated = False
    while True:
        if len(events) >= cfg.max_events:
            truncated = True
            logger.warning(f"Simulation truncated at max_events={cfg.max_events} (t={t:.6f})")
            break
        gap = rng.standard_exponential() / lam_bar
        u = rng.random()
        s = t + gap
        if s > cfg.horizon:
            break
        n_candidates += 1
        lam_buy, lam_sell, r = state.intensity(s)
        total = lam_buy + lam_sell
        if not np.isfinite(total):
            raise HawkesNumericalError(f"intensity overflow at t={s}")
        d = u * lam_bar
        if d < total:
            mark = 0 if d < lam_buy else 1
            if events and s <= last_time:
                s = last_time + TIE_NUDGE
            events.append(Event(time=s, side=Side.from_index(mark)))
            state.advance(s, r, mark)
            last_time = s
            lam_bar = total + float(jump[:, mark].sum())
        else:
            state.advance(s, r)
            lam_bar = total
        t = s

    logger.info(f"Simulated {len(events)} events from {n_candidates} candidates (seed={cfg.seed})")
    stream = EventStream(events=events, horizon=cfg.horizon)
    return SimulationResult(
        stream=stream,
        seed=cfg.seed,
        truncated=truncated,
        n_candidates=n_candidates,
        n_accepted=len(events),
    )


def expected_rates(model: HawkesModel) -> Tuple[float, float]:
    """Stationary rates r solving (I - K) r = mu."""
    report = is_stationary(model)
    if not report.stationary:
        raise HawkesNumericalError(f"no stationary rates: {report.reason}")
    k = np.array(branching_matrix(model).matrix)
    try:
        rates = np.linalg.solve(np.eye(2) - k, np.asarray(model.mu, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise HawkesNumericalError(f"singular branching system: {exc}")
    return float(rates[0]), float(rates[1])
