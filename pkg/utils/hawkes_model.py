"""
Bivariate Hawkes intensity, compensator and log-likelihood.

    lambda_i(t) = mu_i + sum_j sum_{t_k^j < t} phi_ij(t - t_k^j)
    LL = sum_i [ sum_{k in i} log lambda_i(t_k-) - Lambda_i(T) ]

The exponential likelihood runs the O(n) recursion over (i, j) state
variables; the power-law likelihood sums every earlier event directly. Both
loops are compiled with numba and also return the analytic gradient.
Pre-window events are ignored (cold start at t = 0).
"""
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from numba import njit

from models.event import EventStream, Side
from models.hawkes import HawkesModel, IntensitySample
from models.kernel import KernelKind
from utils.errors import HawkesInputError, HawkesNumericalError
from utils.kernels import big_phi, big_phi_terms, phi

CHUNK_CELLS = 2_000_000


@njit
def _exp_event_terms(times, marks, mu, alpha, beta):
    n = times.shape[0]
    r = np.zeros((2, 2))
    d = np.zeros((2, 2))
    g_mu = np.zeros(2)
    g_alpha = np.zeros((2, 2))
    g_beta = np.zeros((2, 2))
    log_sum = 0.0
    t_last = 0.0
    k = 0
    while k < n:
        t = times[k]
        dt = t - t_last
        for i in range(2):
            for j in range(2):
                decay = math.exp(-beta[i, j] * dt)
                d[i, j] = decay * (d[i, j] - dt * r[i, j])
                r[i, j] = decay * r[i, j]
        t_last = t
        end = k
        while end < n and times[end] == t:
            end += 1
        # simultaneous events see only strictly earlier history
        for m in range(k, end):
            i = marks[m]
            lam = mu[i] + alpha[i, 0] * r[i, 0] + alpha[i, 1] * r[i, 1]
            if not (lam > 0.0 and lam < np.inf):
                return log_sum, g_mu, g_alpha, g_beta, m
            log_sum += math.log(lam)
            inv = 1.0 / lam
            g_mu[i] += inv
            for j in range(2):
                g_alpha[i, j] += r[i, j] * inv
                g_beta[i, j] += alpha[i, j] * d[i, j] * inv
        for m in range(k, end):
            j = marks[m]
            r[0, j] += 1.0
            r[1, j] += 1.0
        k = end
    return log_sum, g_mu, g_alpha, g_beta, -1


@njit
def _power_law_event_terms(times, marks, mu, alpha, beta, eps):
    n = times.shape[0]
    g_mu = np.zeros(2)
    g_alpha = np.zeros((2, 2))
    g_beta = np.zeros((2, 2))
    g_eps = np.zeros((2, 2))
    ra = np.zeros(2)
    rb = np.zeros(2)
    re = np.zeros(2)
    log_sum = 0.0
    for k in range(n):
        i = marks[k]
        t = times[k]
        ra[:] = 0.0
        rb[:] = 0.0
        re[:] = 0.0
        for m in range(k):
            tau = t - times[m]
            if tau <= 0.0:
                continue
            j = marks[m]
            u = tau + eps[i, j]
            p = u ** (-beta[i, j])
            ra[j] += p
            rb[j] -= math.log(u) * p
            re[j] -= beta[i, j] * p / u
        lam = mu[i] + alpha[i, 0] * ra[0] + alpha[i, 1] * ra[1]
        if not (lam > 0.0 and lam < np.inf):
            return log_sum, g_mu, g_alpha, g_beta, g_eps, k
        log_sum += math.log(lam)
        inv = 1.0 / lam
        g_mu[i] += inv
        for j in range(2):
            g_alpha[i, j] += ra[j] * inv
            g_beta[i, j] += alpha[i, j] * rb[j] * inv
            g_eps[i, j] += alpha[i, j] * re[j] * inv
    return log_sum, g_mu, g_alpha, g_beta, g_eps, -1


@dataclass
class LikelihoodTerms:
    log_likelihood: float
    d_mu: np.ndarray
    d_alpha: np.ndarray
    d_beta: np.ndarray
    d_epsilon: np.ndarray


def likelihood_terms(
    kind: KernelKind,
    times: np.ndarray,
    marks: np.ndarray,
    horizon: float,
    mu: np.ndarray,
    alpha: np.ndarray,
    beta: np.ndarray,
    eps: np.ndarray,
) -> LikelihoodTerms:
    """Log-likelihood and its gradient on raw arrays; the estimator's hot path."""
    if kind is KernelKind.EXPONENTIAL:
        log_sum, g_mu, g_alpha, g_beta, bad = _exp_event_terms(times, marks, mu, alpha, beta)
        g_eps = np.zeros((2, 2))
    else:
        log_sum, g_mu, g_alpha, g_beta, g_eps, bad = _power_law_event_terms(times, marks, mu, alpha, beta, eps)
    if bad >= 0:
        raise HawkesNumericalError(f"non-finite or non-positive intensity at event index {bad}")

    g_mu = g_mu - horizon
    g_alpha = g_alpha.copy()
    g_beta = g_beta.copy()
    g_eps = g_eps.copy()
    parts = [float(log_sum), -float(mu[0]) * horizon, -float(mu[1]) * horizon]
    for j in range(2):
        src = times[(marks == j) & (times < horizon)]
        if src.size == 0:
            continue
        tau = horizon - src
        for i in range(2):
            val, d_a, d_b, d_e = big_phi_terms(kind, alpha[i, j], beta[i, j], eps[i, j], tau)
            parts.append(-float(np.sum(val)))
            g_alpha[i, j] -= np.sum(d_a)
            g_beta[i, j] -= np.sum(d_b)
            g_eps[i, j] -= np.sum(d_e)
    ll = math.fsum(parts)
    if not math.isfinite(ll):
        raise HawkesNumericalError("log-likelihood is not finite")
    return LikelihoodTerms(ll, g_mu, g_alpha, g_beta, g_eps)


def _stream_arrays(stream: EventStream) -> Tuple[np.ndarray, np.ndarray]:
    return np.ascontiguousarray(stream.times_array()), np.ascontiguousarray(stream.marks_array())


def log_likelihood(model: HawkesModel, stream: EventStream) -> float:
    times, marks = _stream_arrays(stream)
    return likelihood_terms(model.kind, times, marks, stream.horizon, *model.arrays()).log_likelihood


def log_likelihood_gradient(model: HawkesModel, stream: EventStream) -> LikelihoodTerms:
    times, marks = _stream_arrays(stream)
    return likelihood_terms(model.kind, times, marks, stream.horizon, *model.arrays())


def intensity_many(
    model: HawkesModel, times: np.ndarray, marks: np.ndarray, query: np.ndarray, inclusive: np.ndarray
) -> np.ndarray:
    """lambda at each query time, shape (len(query), 2)."""
    mu, alpha, beta, eps = model.arrays()
    out = np.tile(mu, (query.size, 1))
    if times.size == 0 or query.size == 0:
        return out
    step = max(1, CHUNK_CELLS // times.size)
    for lo in range(0, query.size, step):
        q = query[lo:lo + step]
        inc = inclusive[lo:lo + step]
        diff = q[:, None] - times[None, :]
        live = (diff > 0) | (inc[:, None] & (diff == 0))
        lag = np.where(live, diff, 0.0)
        for j in range(2):
            mask = live & (marks == j)[None, :]
            for i in range(2):
                contrib = np.where(mask, phi(model.kind, alpha[i, j], beta[i, j], eps[i, j], lag), 0.0)
                out[lo:lo + step, i] += contrib.sum(axis=1)
    return out


def intensity_at(model: HawkesModel, stream: EventStream, t: float, inclusive: bool = False) -> Tuple[float, float]:
    """(lambda_buy(t), lambda_sell(t)); exclusive counts events strictly before t (the left limit)."""
    if not 0 <= t <= stream.horizon:
        raise HawkesInputError(f"t={t} outside [0, {stream.horizon}]")
    times, marks = _stream_arrays(stream)
    lam = intensity_many(model, times, marks, np.array([t], dtype=float), np.array([inclusive]))
    return float(lam[0, 0]), float(lam[0, 1])


def intensity_path(model: HawkesModel, stream: EventStream, grid_step: float) -> List[IntensitySample]:
    """Uniform grid on [0, T] plus the left limit and the inclusive value at every event."""
    if not grid_step > 0:
        raise HawkesInputError("grid_step must be > 0")
    horizon = stream.horizon
    n_steps = int(math.floor(horizon / grid_step + 1e-9))
    grid = [k * grid_step for k in range(n_steps + 1)]
    if horizon - grid[-1] > 1e-9 * max(1.0, horizon):
        grid.append(horizon)
    grid = [min(g, horizon) for g in grid]

    # (time, order, inclusive): left limit sorts before the jump, grid points after
    points = [(g, 2, True) for g in grid]
    for ev in stream.events:
        points.append((ev.time, 0, False))
        points.append((ev.time, 1, True))
    points.sort(key=lambda p: (p[0], p[1]))

    times, marks = _stream_arrays(stream)
    query = np.array([p[0] for p in points], dtype=float)
    inclusive = np.array([p[2] for p in points], dtype=bool)
    lam = intensity_many(model, times, marks, query, inclusive)
    return [IntensitySample(time=float(q), lambda_buy=float(b), lambda_sell=float(s)) for q, (b, s) in zip(query, lam)]


def compensator_at(model: HawkesModel, stream: EventStream, side: Side, query: np.ndarray) -> np.ndarray:
    """Lambda_i(t) = mu_i t + sum_j sum_{t_k^j < t} Phi_ij(t - t_k^j) for each query time."""
    i = side.index
    mu, alpha, beta, eps = model.arrays()
    query = np.asarray(query, dtype=float)
    out = mu[i] * query
    times, marks = _stream_arrays(stream)
    if times.size == 0 or query.size == 0:
        return out
    step = max(1, CHUNK_CELLS // times.size)
    for lo in range(0, query.size, step):
        q = query[lo:lo + step]
        diff = q[:, None] - times[None, :]
        live = diff > 0
        lag = np.where(live, diff, 0.0)
        for j in range(2):
            mask = live & (marks == j)[None, :]
            vals = np.where(mask, big_phi(model.kind, alpha[i, j], beta[i, j], eps[i, j], lag), 0.0)
            out[lo:lo + step] += vals.sum(axis=1)
    return out


def compensator(model: HawkesModel, stream: EventStream, side: Side) -> float:
    """Lambda_i(T), the expected type-i event count over the window."""
    i = side.index
    mu, alpha, beta, eps = model.arrays()
    times, marks = _stream_arrays(stream)
    parts = [mu[i] * stream.horizon]
    for j in range(2):
        src = times[(marks == j) & (times < stream.horizon)]
        if src.size:
            parts.append(float(np.sum(big_phi(model.kind, alpha[i, j], beta[i, j], eps[i, j], stream.horizon - src))))
    return math.fsum(parts)


def gradient_vector(terms: LikelihoodTerms, include_epsilon: bool) -> np.ndarray:
    parts = [terms.d_mu, terms.d_alpha.ravel(), terms.d_beta.ravel()]
    if include_epsilon:
        parts.append(terms.d_epsilon.ravel())
    return np.concatenate(parts)
