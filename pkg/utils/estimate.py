"""
Maximum-likelihood fitting with L-BFGS-B.

Parameter vector order: mu_1, mu_2, alpha_11, alpha_12, alpha_21, alpha_22,
beta_11 .. beta_22 and, when epsilon is free, epsilon_11 .. epsilon_22.
Bounds are handled by the solver's projection, not by reparametrisation.
"""
import math
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.optimize import minimize

from models.event import EventStream, Side
from models.fit import Bounds, FitConfig, FitResult
from models.hawkes import HawkesModel
from models.kernel import KernelKind
from utils.errors import HawkesInputError, HawkesNumericalError
from utils.hawkes_model import gradient_vector, likelihood_terms

PAIRS = ("11", "12", "21", "22")
MU_FLOOR = 1e-6
JITTER_DECADES = 1.0


def parameter_names(kind: KernelKind, free_epsilon: bool = False) -> List[str]:
    names = ["mu_1", "mu_2"] + [f"alpha_{p}" for p in PAIRS] + [f"beta_{p}" for p in PAIRS]
    if kind is KernelKind.POWER_LAW and free_epsilon:
        names += [f"epsilon_{p}" for p in PAIRS]
    return names


def default_bounds(kind: KernelKind, stream: EventStream, free_epsilon: bool = False) -> Bounds:
    """Box bounds derived from the stream's per-component event rates."""
    counts = stream.counts()
    bounds: Bounds = {}
    for i, n in enumerate(counts):
        bounds[f"mu_{i + 1}"] = (MU_FLOOR, max(10.0 * n / stream.horizon, 10.0 * MU_FLOOR))
    for p in PAIRS:
        bounds[f"alpha_{p}"] = (0.0, 1e3)
    beta_range = (1e-3, 1e4) if kind is KernelKind.EXPONENTIAL else (1.001, 10.0)
    for p in PAIRS:
        bounds[f"beta_{p}"] = beta_range
    if kind is KernelKind.POWER_LAW and free_epsilon:
        for p in PAIRS:
            bounds[f"epsilon_{p}"] = (1e-6, 1.0)
    return bounds


def _bounds_list(names: List[str], bounds: Bounds) -> List[Tuple[float, float]]:
    missing = [n for n in names if n not in bounds]
    if missing:
        raise HawkesInputError(f"bounds missing for {', '.join(missing)}")
    return [tuple(bounds[n]) for n in names]


def default_start(
    kind: KernelKind,
    stream: EventStream,
    attempt: int,
    seed: int,
    free_epsilon: bool = False,
    bounds: Optional[Bounds] = None,
) -> np.ndarray:
    """Attempt 0 is a fixed heuristic point; later attempts jitter it log-uniformly inside the bounds."""
    if attempt < 0:
        raise HawkesInputError("attempt must be >= 0")
    counts = stream.counts()
    beta0 = 1.0 if kind is KernelKind.EXPONENTIAL else 2.0
    x = [0.5 * n / stream.horizon for n in counts] + [0.1] * 4 + [beta0] * 4
    if kind is KernelKind.POWER_LAW and free_epsilon:
        x += [0.01] * 4
    x = np.array(x, dtype=float)
    if attempt > 0:
        rng = np.random.default_rng([seed, attempt])
        x = x * 10.0 ** rng.uniform(-JITTER_DECADES, JITTER_DECADES, size=x.size)
    names = parameter_names(kind, free_epsilon)
    box = np.array(_bounds_list(names, bounds or default_bounds(kind, stream, free_epsilon)))
    return np.clip(x, box[:, 0], box[:, 1])


class _Objective:
    """Negative log-likelihood and gradient over the packed parameter vector."""

    def __init__(self, kind: KernelKind, stream: EventStream, free_epsilon: bool, fixed_epsilon: float):
        self.kind = kind
        self.times = np.ascontiguousarray(stream.times_array())
        self.marks = np.ascontiguousarray(stream.marks_array())
        self.horizon = stream.horizon
        self.free_epsilon = kind is KernelKind.POWER_LAW and free_epsilon
        self.fixed_epsilon = np.full((2, 2), fixed_epsilon)

    def unpack(self, theta: np.ndarray):
        mu = np.ascontiguousarray(theta[0:2])
        alpha = np.ascontiguousarray(theta[2:6].reshape(2, 2))
        beta = np.ascontiguousarray(theta[6:10].reshape(2, 2))
        eps = np.ascontiguousarray(theta[10:14].reshape(2, 2)) if self.free_epsilon else self.fixed_epsilon
        return mu, alpha, beta, eps

    def to_model(self, theta: np.ndarray) -> HawkesModel:
        mu, alpha, beta, eps = self.unpack(theta)
        return HawkesModel.from_arrays(self.kind, mu, alpha, beta, eps)

    def __call__(self, theta: np.ndarray) -> Tuple[float, np.ndarray]:
        terms = likelihood_terms(self.kind, self.times, self.marks, self.horizon, *self.unpack(theta))
        return -terms.log_likelihood, -gradient_vector(terms, self.free_epsilon)


def projected_gradient_norm(theta: np.ndarray, grad: np.ndarray, box: np.ndarray) -> float:
    """Max-norm of the gradient with components pushing outside the box removed."""
    g = grad.copy()
    at_lower = (theta <= box[:, 0]) & (g > 0)
    at_upper = (theta >= box[:, 1]) & (g < 0)
    g[at_lower | at_upper] = 0.0
    return float(np.max(np.abs(g))) if g.size else 0.0


def _run_restart(objective: _Objective, x0: np.ndarray, box: np.ndarray, cfg: FitConfig):
    f0, _ = objective(x0)
    if not math.isfinite(f0):
        raise HawkesNumericalError("objective is not finite at the start point")
    return minimize(
        objective,
        x0,
        jac=True,
        method="L-BFGS-B",
        bounds=[tuple(b) for b in box],
        options={"ftol": cfg.ftol, "gtol": cfg.gtol, "maxiter": cfg.max_iterations},
    )


def fit(stream: EventStream, cfg: FitConfig) -> FitResult:
    """Minimise the negative log-likelihood from every restart and keep the best."""
    if len(stream) == 0:
        raise HawkesInputError("cannot fit an empty stream")
    free_eps = cfg.kind is KernelKind.POWER_LAW and cfg.free_epsilon
    names = parameter_names(cfg.kind, free_eps)
    labelled_defaults = cfg.bounds is None
    bounds = cfg.bounds or default_bounds(cfg.kind, stream, free_eps)
    box = np.array(_bounds_list(names, bounds), dtype=float)

    notes = ["cold start: events before the window are ignored"]
    if labelled_defaults:
        notes.append("bounds are implementation defaults")
    if cfg.initial is None:
        notes.append("start points are implementation defaults")
    flagged = [side for side, n in zip((Side.BUY, Side.SELL), stream.counts()) if n == 0]
    for side in flagged:
        logger.warning(f"No {side.name} events: alpha column for {side.name} is unidentifiable")
        notes.append(f"component {side.name} has no events; its alpha column is unidentifiable")
    if cfg.kind is KernelKind.POWER_LAW and not free_eps:
        notes.append(f"epsilon fixed at {cfg.fixed_epsilon}")

    objective = _Objective(cfg.kind, stream, free_eps, cfg.fixed_epsilon)
    best = None
    best_index = -1
    best_start = None
    objectives: List[Optional[float]] = []
    for attempt in range(cfg.restarts):
        if attempt == 0 and cfg.initial is not None:
            if len(cfg.initial) != len(names):
                raise HawkesInputError(f"initial point needs {len(names)} values, got {len(cfg.initial)}")
            x0 = np.clip(np.asarray(cfg.initial, dtype=float), box[:, 0], box[:, 1])
        else:
            x0 = default_start(cfg.kind, stream, attempt, cfg.seed, free_eps, bounds)
        try:
            res = _run_restart(objective, x0, box, cfg)
        except (HawkesNumericalError, FloatingPointError, ValueError) as exc:
            logger.warning(f"Restart {attempt} failed: {exc}")
            objectives.append(None)
            continue
        value = float(res.fun)
        if not math.isfinite(value):
            logger.warning(f"Restart {attempt} ended at a non-finite objective")
            objectives.append(None)
            continue
        objectives.append(value)
        logger.info(f"Restart {attempt}: nll={value:.6f} iterations={res.nit} status={res.message}")
        if best is None or value < best.fun:
            best, best_index, best_start = res, attempt, x0

    if best is None:
        raise HawkesNumericalError("every restart diverged or had a non-finite objective")

    theta = np.clip(best.x, box[:, 0], box[:, 1])
    nll, grad = objective(theta)
    pg_norm = projected_gradient_norm(theta, grad, box)
    converged = bool(best.success) or pg_norm < cfg.gtol
    n_params = len(names)
    return FitResult(
        model=objective.to_model(theta),
        neg_log_likelihood=float(nll),
        converged=converged,
        iterations=int(best.nit),
        gradient_norm=pg_norm,
        start_point_used=[float(v) for v in best_start],
        aic=2.0 * n_params + 2.0 * float(nll),
        n_params=n_params,
        parameter_names=names,
        bounds={n: (float(lo), float(hi)) for n, (lo, hi) in zip(names, box)},
        restart_objectives=objectives,
        best_restart=best_index,
        flagged_components=flagged,
        notes=notes,
    )
