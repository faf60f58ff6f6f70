"""
Long simulations checking the documented behaviour of each policy.
Run with `pytest -m slow`.
"""

import numpy as np
import pytest

from qsim.core.config.catalog import failure_instance, lookup
from qsim.core.handler.policy.estimator import exploration_probability
from qsim.core.handler.policy.factory import PolicySpec
from qsim.core.handler.simulator.engine import SimulationSpec, Simulator, run
from qsim.core.handler.simulator.forced import converge_bound, run_forced_converge
from qsim.core.handler.simulator.replication import run_replications
from qsim.core.matching.certificate import check_complementary_slackness
from qsim.core.matching.hungarian import brute_force_matching, max_weight_matching
from qsim.core.model.params import EpochParams, compute_theoretical_params, compute_tuned_params
from qsim.core.model.system import SystemConfig


def _quarters(summary, column='weighted_sum'):
    horizon = summary.runs[0].horizon
    q = horizon // 4
    return summary.window_average(q + 1, 2 * q, column), summary.window_average(horizon - q + 1, horizon, column)


def test_hungarian_matches_brute_force_on_random_matrices():
    rng = np.random.default_rng(500)
    for _ in range(500):
        n, k = rng.integers(1, 8, size=2)
        w = rng.random((n, k)) * rng.integers(1, 101, size=(n, 1))
        _, value = max_weight_matching(w)
        _, best = brute_force_matching(w)
        assert abs(value - best) <= 1e-9


@pytest.mark.slow
def test_forced_converge_certifies_near_optimal_matchings():
    rng = np.random.default_rng(2024)
    for trial in range(200):
        n, k = (int(x) for x in rng.integers(1, 7, size=2))
        epsilon = float(rng.choice([0.25, 0.5, 1.0]))
        weights = rng.random((n, k)) * rng.integers(0, 101, size=(n, 1))
        check_period = compute_theoretical_params(epsilon, 0.9, n, k).check_period
        alpha = epsilon / 16.0

        result = run_forced_converge(weights, check_period, alpha, seed=trial)
        assert result.stable
        assert result.matching.is_valid()
        assert check_complementary_slackness(result.matching, result.certificate, weights, alpha) == []
        _, optimum = brute_force_matching(weights)
        assert result.matching.value(weights) >= (1.0 - alpha) * optimum - 1e-9
        assert result.converge_slot - 1 <= converge_bound(n, k, check_period, epsilon)


@pytest.mark.slow
def test_forced_exploration_estimates_are_unbiased():
    entry = lookup('f2')
    params = EpochParams(check_period=67, converge_len=400, epoch_len=1000, xi=4.7308e-8,
                         mode='tuned', step_multiplier=0.5 * entry.epsilon)
    policy = PolicySpec(kind='dam-fe', params=params, harvest_commit=False)
    sim = Simulator(SimulationSpec(config=entry.config, policy=policy, horizon=60_000, master_seed=8))
    sim.run()

    mu = entry.config.service_matrix()
    checked = 0
    for i, agent in enumerate(sim.agents):
        est = agent.estimator
        for j in range(entry.config.n_servers):
            n = int(est.sample_count[j])
            if n < 200:
                continue
            sigma = np.sqrt(mu[i, j] * (1.0 - mu[i, j]) / n)
            assert abs(est.sample_mean[j] - mu[i, j]) <= 4.0 * sigma
            checked += 1
    assert checked >= 8


@pytest.mark.slow
@pytest.mark.parametrize("kind", ['dam-k', 'dam-ucb'])
def test_eight_queue_instance_plateaus(kind):
    entry = lookup('f2')
    spec = SimulationSpec(config=entry.config, policy=PolicySpec(kind=kind), horizon=200_000)
    second, last = _quarters(run_replications(spec, 5, concurrency=5))
    assert last <= 1.25 * second


@pytest.mark.slow
def test_maxweight_beats_known_rate_auction():
    entry = lookup('f2')
    averages = {}
    for kind in ('dam-k', 'maxweight'):
        spec = SimulationSpec(config=entry.config, policy=PolicySpec(kind=kind), horizon=200_000)
        averages[kind] = run_replications(spec, 5, concurrency=5).final_average()
    assert averages['maxweight'] < averages['dam-k']


def test_forced_exploration_on_eight_queues_only_explores_within_horizon():
    entry = lookup('f2')
    params = compute_tuned_params(entry.epsilon, entry.delta, 8, 8)
    epochs = -(-200_000 // params.epoch_len)
    assert epochs == 8
    # min(1, K/l^gamma) stays at 1 until l > 8^(1/0.8), about 13.5
    assert all(exploration_probability(8, l, 0.8) == 1.0 for l in range(1, epochs + 1))
    assert exploration_probability(8, 14, 0.8) < 1.0


@pytest.mark.slow
def test_forced_exploration_on_eight_queues_grows_within_horizon():
    entry = lookup('f2')
    spec = SimulationSpec(config=entry.config, policy=PolicySpec(kind='dam-fe'), horizon=200_000)
    series = run(spec)
    assert len(series.epochs) == 8
    assert all(record.n_explorers == 8 for record in series.epochs)
    assert series.time_average(150_001, 200_000) > 1.25 * series.time_average(50_001, 100_000)


@pytest.mark.slow
def test_forced_exploration_plateaus_with_slack():
    cfg = SystemConfig.from_lists([0.3, 0.3], [[0.9, 0.3], [0.3, 0.9]], slackness=0.5, rate_floor=0.3)
    spec = SimulationSpec(config=cfg, policy=PolicySpec(kind='dam-fe'), horizon=200_000)
    second, last = _quarters(run_replications(spec, 5, concurrency=5))
    assert last <= 1.25 * second


@pytest.mark.slow
def test_refreshed_explorer_destabilizes_persistent_queue():
    entry = lookup('f6')
    horizon = 100_000
    spec = SimulationSpec(config=entry.config, policy=PolicySpec(kind='dyn-dam-fe'), horizon=horizon,
                          refresh_probability=1.0)
    summary = run_replications(spec, 10, concurrency=5)
    assert np.mean([r.final_lengths[0] for r in summary.runs]) >= 0.05 * horizon


@pytest.mark.slow
def test_refreshed_ucb_stays_stable():
    entry = lookup('f6')
    spec = SimulationSpec(config=entry.config, policy=PolicySpec(kind='dyn-dam-ucb'), horizon=100_000,
                          refresh_probability=1.0)
    second, last = _quarters(run_replications(spec, 10, concurrency=5), 'total_queue')
    assert last <= 1.25 * second


@pytest.mark.slow
@pytest.mark.parametrize("kind", ['fixed', 'random'])
def test_static_and_random_requests_fail_on_two_identical_queues(kind):
    entry = failure_instance()
    horizon = 100_000
    spec = SimulationSpec(config=entry.config, policy=PolicySpec(kind=kind), horizon=horizon)
    summary = run_replications(spec, 10, concurrency=5)
    assert np.mean([sum(r.final_lengths) for r in summary.runs]) >= 0.05 * horizon


@pytest.mark.slow
@pytest.mark.parametrize("kind", ['fixed', 'random'])
def test_two_identical_queues_grow_at_one_tenth_per_slot(kind):
    # served mass is 0.9 per slot against 1.0 arriving, so E[Q1(T)+Q2(T)] sits at 0.1T
    entry = failure_instance()
    horizon = 100_000
    spec = SimulationSpec(config=entry.config, policy=PolicySpec(kind=kind), horizon=horizon)
    summary = run_replications(spec, 10, concurrency=5)
    rate = np.mean([sum(r.final_lengths) for r in summary.runs]) / horizon
    assert 0.09 <= rate <= 0.12
