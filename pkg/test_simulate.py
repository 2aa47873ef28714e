"""
Tests for thinning simulation
"""
import math

import numpy as np
import pytest

from models.hawkes import HawkesModel
from models.kernel import KernelKind
from models.simulation import SimConfig
from utils.errors import HawkesInputError, HawkesNumericalError
from utils.simulate import expected_rates, simulate

POISSON = HawkesModel(
    kind=KernelKind.EXPONENTIAL,
    mu=(0.5, 1.0),
    alpha=[[0.0, 0.0], [0.0, 0.0]],
    beta=[[1.0, 1.0], [1.0, 1.0]],
)
# branching matrix [[0.4, 0.2], [0.2, 0.4]], spectral radius 0.6
EXCITED = HawkesModel(
    kind=KernelKind.EXPONENTIAL,
    mu=(0.5, 0.5),
    alpha=[[0.8, 0.4], [0.4, 0.8]],
    beta=[[2.0, 2.0], [2.0, 2.0]],
)
POWER_LAW = HawkesModel(
    kind=KernelKind.POWER_LAW,
    mu=(0.5, 0.5),
    alpha=[[0.02, 0.005], [0.005, 0.02]],
    beta=[[1.5, 1.5], [1.5, 1.5]],
    epsilon=[[0.01, 0.01], [0.01, 0.01]],
)
SUPERCRITICAL = HawkesModel(
    kind=KernelKind.EXPONENTIAL,
    mu=(0.5, 0.5),
    alpha=[[1.5, 0.5], [0.5, 1.5]],
    beta=[[1.0, 1.0], [1.0, 1.0]],
)


def test_same_seed_same_stream():
    a = simulate(EXCITED, SimConfig(horizon=50.0, seed=9))
    b = simulate(EXCITED, SimConfig(horizon=50.0, seed=9))
    c = simulate(EXCITED, SimConfig(horizon=50.0, seed=10))
    assert a == b
    assert a.stream != c.stream


def test_events_sorted_and_inside_window():
    result = simulate(POWER_LAW, SimConfig(horizon=100.0, seed=1))
    times = [e.time for e in result.stream.events]
    assert times == sorted(times)
    assert all(0 < t <= 100.0 for t in times)
    assert result.n_accepted == len(times) <= result.n_candidates
    assert not result.truncated


def _poisson_counts(n_seeds, horizon):
    counts = np.array([simulate(POISSON, SimConfig(horizon=horizon, seed=s)).stream.counts() for s in range(n_seeds)])
    return counts.mean(axis=0)


def _assert_poisson_means(means, n_seeds, horizon):
    for i, mu in enumerate(POISSON.mu):
        se = math.sqrt(mu * horizon / n_seeds)
        assert abs(means[i] - mu * horizon) < 3 * se


def test_zero_excitation_counts_match_base_rates():
    _assert_poisson_means(_poisson_counts(200, 20.0), 200, 20.0)


@pytest.mark.slow
def test_zero_excitation_counts_match_base_rates_full():
    _assert_poisson_means(_poisson_counts(1000, 20.0), 1000, 20.0)


def _mean_rates(n_seeds, horizon):
    counts = np.array([simulate(EXCITED, SimConfig(horizon=horizon, seed=s)).stream.counts() for s in range(n_seeds)])
    return counts.mean(axis=0) / horizon


def test_excited_rates_match_stationary_solution():
    target = expected_rates(EXCITED)
    assert target == pytest.approx((1.25, 1.25))
    rates = _mean_rates(40, 1000.0)
    np.testing.assert_allclose(rates, target, rtol=0.05)


@pytest.mark.slow
def test_excited_rates_match_stationary_solution_full():
    np.testing.assert_allclose(_mean_rates(200, 1000.0), expected_rates(EXCITED), rtol=0.05)


def test_nonstationary_model_rejected_by_default():
    with pytest.raises(HawkesInputError, match="not stationary"):
        simulate(SUPERCRITICAL, SimConfig(horizon=10.0))


def test_nonstationary_override_truncates():
    result = simulate(SUPERCRITICAL, SimConfig(horizon=1e6, seed=3, max_events=500, allow_nonstationary=True))
    assert result.truncated
    assert len(result.stream) == 500


def test_expected_rates_requires_stationarity():
    with pytest.raises(HawkesNumericalError):
        expected_rates(SUPERCRITICAL)
