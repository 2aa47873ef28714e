"""
Excitation kernels: pointwise values, exact integrals and branching diagnostics.

The array helpers (``phi``, ``big_phi``, ``big_phi_terms``) take the kernel
parameters as scalars and ``tau`` as an array; ``evaluate`` / ``integrate`` are
the KernelSpec-level entry points.
"""
import math
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel

from models.hawkes import HawkesModel
from models.kernel import KernelKind, KernelSpec
from utils.errors import HawkesInputError

LOG_BRANCH_TOL = 1e-10
SERIES_TOL = 1e-6

ArrayLike = Union[float, np.ndarray]


def phi(kind: KernelKind, alpha: float, beta: float, epsilon: float, tau: np.ndarray) -> np.ndarray:
    if kind is KernelKind.EXPONENTIAL:
        return alpha * np.exp(-beta * tau)
    return alpha * np.power(tau + epsilon, -beta)


def _power_law_g(beta: float, epsilon: float, tau: np.ndarray) -> np.ndarray:
    # integral of (s + epsilon) ** -beta over [0, tau]
    c = 1.0 - beta
    log_ratio = np.log1p(tau / epsilon)
    if abs(c) < LOG_BRANCH_TOL:
        return log_ratio
    return epsilon ** c * np.expm1(c * log_ratio) / c


def big_phi(kind: KernelKind, alpha: float, beta: float, epsilon: float, tau: np.ndarray) -> np.ndarray:
    """Integral of phi over [0, tau] for finite tau."""
    if kind is KernelKind.EXPONENTIAL:
        return alpha * -np.expm1(-beta * tau) / beta
    return alpha * _power_law_g(beta, epsilon, tau)


def big_phi_terms(
    kind: KernelKind, alpha: float, beta: float, epsilon: float, tau: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Integral over [0, tau] and its partials with respect to (alpha, beta, epsilon)."""
    if kind is KernelKind.EXPONENTIAL:
        decay = np.exp(-beta * tau)
        unit = -np.expm1(-beta * tau) / beta
        d_beta = alpha * (tau * decay / beta - unit / beta)
        return alpha * unit, unit, d_beta, np.zeros_like(tau)

    c = 1.0 - beta
    l1 = np.log(tau + epsilon)
    l0 = math.log(epsilon)
    g = _power_law_g(beta, epsilon, tau)
    if abs(c) < SERIES_TOL:
        dg_dc = (l1 ** 2 - l0 ** 2) / 2.0 + c * (l1 ** 3 - l0 ** 3) / 3.0
    else:
        dg_dc = (l1 * np.exp(c * l1) - l0 * math.exp(c * l0)) / c - g / c
    d_eps = alpha * (np.power(tau + epsilon, -beta) - epsilon ** -beta)
    return alpha * g, g, -alpha * dg_dc, d_eps


def _kernel_params(k: KernelSpec) -> Tuple[KernelKind, float, float, float]:
    return k.kind, k.alpha, k.beta, (k.epsilon if k.epsilon is not None else 1.0)


def _as_tau(tau: ArrayLike) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(tau, dtype=np.float64)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise HawkesInputError("tau must be >= 0")
    return arr, arr.ndim == 0


def evaluate(k: KernelSpec, tau: ArrayLike) -> ArrayLike:
    """phi(tau): Exponential alpha*exp(-beta*tau), PowerLaw alpha/(tau+epsilon)**beta."""
    arr, scalar = _as_tau(tau)
    out = phi(*_kernel_params(k), arr)
    return float(out) if scalar else out


def integrate(k: KernelSpec, tau: ArrayLike) -> ArrayLike:
    """Integral of phi over [0, tau]; tau may be +inf when the integral converges."""
    arr, scalar = _as_tau(tau)
    arr = np.atleast_1d(arr)
    kind, alpha, beta, eps = _kernel_params(k)
    inf = np.isinf(arr)
    out = np.empty_like(arr)
    if np.any(inf):
        out[inf] = total_mass(k)
    finite = ~inf
    out[finite] = big_phi(kind, alpha, beta, eps, arr[finite])
    return float(out[0]) if scalar else out


def total_mass(k: KernelSpec) -> float:
    """Integral of phi over [0, inf): alpha/beta, or alpha*eps**(1-beta)/(beta-1) for beta > 1."""
    if k.kind is KernelKind.EXPONENTIAL:
        return k.alpha / k.beta
    if k.beta <= 1.0:
        raise HawkesInputError(f"divergent kernel integral: power-law beta={k.beta} <= 1")
    return k.alpha * k.epsilon ** (1.0 - k.beta) / (k.beta - 1.0)


class BranchingReport(BaseModel):
    matrix: List[List[float]]
    spectral_radius: float
    alpha_beta_ratios: List[List[float]]


class StationarityReport(BaseModel):
    stationary: bool
    spectral_radius: Optional[float] = None
    alpha_beta_ratios: List[List[float]]
    per_entry_ratio_ok: bool
    reason: Optional[str] = None


def _ratios(model: HawkesModel) -> List[List[float]]:
    return [[model.alpha[i][j] / model.beta[i][j] for j in range(2)] for i in range(2)]


def branching_matrix(model: HawkesModel) -> BranchingReport:
    """Expected direct offspring counts K_ij = integral of phi_ij over [0, inf)."""
    k = np.array([[total_mass(model.kernel(i, j)) for j in range(2)] for i in range(2)])
    radius = float(np.max(np.abs(np.linalg.eigvals(k))))
    return BranchingReport(matrix=k.tolist(), spectral_radius=radius, alpha_beta_ratios=_ratios(model))


def is_stationary(model: HawkesModel) -> StationarityReport:
    """Spectral radius of the branching matrix below 1; the per-entry alpha/beta < 1 check is reported alongside."""
    ratios = _ratios(model)
    per_entry = all(r < 1 for row in ratios for r in row)
    try:
        report = branching_matrix(model)
    except HawkesInputError:
        return StationarityReport(
            stationary=False,
            alpha_beta_ratios=ratios,
            per_entry_ratio_ok=per_entry,
            reason="divergent kernel integral",
        )
    ok = report.spectral_radius < 1.0
    return StationarityReport(
        stationary=ok,
        spectral_radius=report.spectral_radius,
        alpha_beta_ratios=ratios,
        per_entry_ratio_ok=per_entry,
        reason=None if ok else f"spectral radius {report.spectral_radius:.6g} >= 1",
    )
