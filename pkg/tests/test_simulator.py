import math

import numpy as np
import pandas as pd
import pytest

from qsim.core.handler.policy.factory import PolicySpec
from qsim.core.handler.simulator.dynamic import (QueueLifetime, dynamic_refresh_process, schedule_from_records,
                                                 survival_time)
from qsim.core.handler.simulator.engine import (FORCED, MetricsSeries, SimulationSpec, Simulator,
                                                forced_good_event_mode, run, validate_spec)
from qsim.core.handler.simulator.forced import converge_bound, run_forced_converge
from qsim.core.handler.simulator.replication import aggregate, replication_seeds, run_replications
from qsim.core.handler.simulator.writer import write_metrics, write_rows, write_summary
from qsim.core.matching.certificate import check_complementary_slackness, slackness_implies_approx
from qsim.core.model.params import EpochParams
from qsim.core.model.system import SystemConfig
from qsim.core.utils.errors import ConfigError

FORCED_PARAMS = EpochParams(check_period=2, converge_len=400, epoch_len=800, xi=1e-3, mode='tuned',
                            step_multiplier=0.25)


def _spec(cfg, kind='dam-k', params=None, **kwargs):
    return SimulationSpec(config=cfg, policy=PolicySpec(kind=kind, params=params), **kwargs)


def test_no_arrivals_keeps_queues_empty(short_epochs):
    cfg = SystemConfig.from_lists([0.0, 0.0], [[0.9, 0.3], [0.3, 0.9]], 0.5, 0.3)
    for kind in ('dam-k', 'dam-fe', 'maxweight', 'random'):
        series = run(_spec(cfg, kind, short_epochs, horizon=300))
        assert np.all(series.weighted_sum == 0.0)
        assert np.all(series.total_queue == 0.0)
        assert series.final_lengths == [0, 0]


def test_same_seed_same_series(two_by_two, short_epochs):
    spec = _spec(two_by_two, 'dam-fe', short_epochs, horizon=2000, master_seed=3)
    a, b = run(spec), run(spec)
    assert np.array_equal(a.weighted_sum, b.weighted_sum)
    pd.testing.assert_frame_equal(a.slot_frame(), b.slot_frame())
    pd.testing.assert_frame_equal(a.epoch_frame(), b.epoch_frame())
    c = run(spec.with_seed(4))
    assert not np.array_equal(a.total_queue, c.total_queue)


def test_slot_conservation_and_exclusive_service(two_by_two):
    spec = _spec(two_by_two, 'random', horizon=1, initial_lengths=(3, 0), master_seed=9)
    sim = Simulator(spec)
    for t in range(1, 2001):
        before = list(sim.lengths)
        arrivals, served, requests = sim.step(t)
        agents = [r.agent for r in requests]
        assert len(agents) == len(set(agents))
        assert sum(served) <= len({r.target for r in requests if r.target is not None})
        for i in range(2):
            if served[i]:
                assert i in agents
            assert sim.lengths[i] == max(before[i] + arrivals[i] - served[i], 0)


def test_metrics_record_length_before_slot(two_by_two):
    series = run(_spec(two_by_two, 'fixed', horizon=50, initial_lengths=(4, 2)))
    assert series.total_queue[0] == 6
    assert series.weighted_sum[0] == pytest.approx(0.3 * 4 + 0.3 * 2)
    assert series.horizon == 50


def test_forced_mode_epochs_meet_weight_bound():
    # both queues prefer server 0, so every epoch runs a real auction
    cfg = SystemConfig.from_lists([0.3, 0.3], [[0.8, 0.4], [0.8, 0.4]], 0.5, 0.4)
    spec = forced_good_event_mode(_spec(cfg, 'dam-k', FORCED_PARAMS, horizon=8000, master_seed=2))
    assert spec.service_mode == FORCED
    series = run(spec)
    assert len(series.epochs) == 10
    for record in series.epochs:
        assert record.converge_slot != -1
        assert record.weight_ratio >= 1.0 - FORCED_PARAMS.step_multiplier - 1e-9
        assert record.n_explorers == 0


@pytest.mark.slow
def test_forced_mode_random_instances_converge_every_epoch():
    rng = np.random.default_rng(77)
    for trial in range(24):
        n, k = (int(x) for x in rng.integers(1, 7, size=2))
        epsilon = float(rng.choice([0.25, 0.5, 1.0]))
        alpha = epsilon / 16.0
        bound = converge_bound(n, k, 2, epsilon)
        params = EpochParams(check_period=2, converge_len=bound, epoch_len=bound + 200, xi=1e-3,
                             mode='theoretical', step_multiplier=alpha)
        cfg = SystemConfig.from_lists(rng.uniform(0.0, 0.05, size=n).tolist(),
                                      rng.uniform(0.2, 1.0, size=(n, k)).tolist(), epsilon, 0.2)
        lengths = tuple(int(q) for q in rng.integers(1, 101, size=n))
        spec = forced_good_event_mode(_spec(cfg, 'dam-k', params, horizon=2 * params.epoch_len,
                                            initial_lengths=lengths, master_seed=trial))
        series = run(spec)
        assert len(series.epochs) == 2
        for record in series.epochs:
            assert record.converge_slot != -1
            assert record.converge_slot - params.epoch_start(record.epoch) <= bound
            assert record.weight_ratio >= 1.0 - alpha - 1e-9


def test_epoch_diagnostics_count_explorers(two_by_two, short_epochs):
    series = run(_spec(two_by_two, 'dam-fe', short_epochs, horizon=500))
    assert len(series.epochs) == 10
    # every queue explores in its first epoch
    assert series.epochs[0].n_explorers == 2
    assert all(0 <= r.n_explorers <= 2 for r in series.epochs)
    frame = series.epoch_frame()
    assert list(frame.columns) == ['epoch', 'converge_slot', 'weight_ratio', 'n_explorers']


def test_empty_epoch_ratio_is_one(short_epochs):
    cfg = SystemConfig.from_lists([0.0], [[1.0]], 1.0, 0.5)
    series = run(_spec(cfg, 'dam-k', short_epochs, horizon=100))
    assert [r.weight_ratio for r in series.epochs] == [1.0, 1.0]


def test_maxweight_has_no_epoch_records(two_by_two):
    series = run(_spec(two_by_two, 'maxweight', horizon=200))
    assert series.epochs == []
    assert series.epoch_frame().empty


def test_ucb_zero_rate_warning(short_epochs):
    cfg = SystemConfig.from_lists([0.2, 0.2], [[0.5, 0.0], [0.0, 0.5]], 0.2, 0.5)
    sim = Simulator(_spec(cfg, 'dam-ucb', short_epochs, horizon=10))
    assert any('dam-ucb' in w for w in sim.warnings)


def test_dynamic_schedule_masks_absent_queue(two_by_two, short_epochs):
    schedule = (QueueLifetime(1, 1, 100), QueueLifetime(1, 201))
    series = run(_spec(two_by_two, 'dam-ucb', short_epochs, horizon=400, dynamic_schedule=schedule))
    lengths = series.queue_lengths
    assert not np.any(np.isnan(lengths[:100, 1]))
    assert np.all(np.isnan(lengths[100:200, 1]))
    assert lengths[200, 1] == 0
    assert not np.any(np.isnan(lengths[:, 0]))


def test_overlapping_lifetimes_rejected(two_by_two):
    spec = _spec(two_by_two, horizon=10, dynamic_schedule=(QueueLifetime(1, 1, 100), QueueLifetime(1, 50)))
    assert any('overlap' in v for v in validate_spec(spec))
    with pytest.raises(ConfigError):
        Simulator(spec)


@pytest.mark.parametrize("kwargs,fragment", [
    ({'horizon': 0}, 'horizon'),
    ({'service_mode': 'lazy'}, 'service mode'),
    ({'initial_lengths': (1,)}, 'initial_lengths'),
])
def test_invalid_specs(two_by_two, kwargs, fragment):
    spec = _spec(two_by_two, **kwargs)
    assert any(fragment in v for v in validate_spec(spec))


def test_refresh_process_spawns_fresh_agents(two_by_two, short_epochs):
    sim = Simulator(_spec(two_by_two, 'dyn-dam-fe', short_epochs, horizon=500, refresh_probability=1.0))
    sim.run()
    assert sim.incarnations == [1, 10]


def test_refresh_needs_two_queues(single_server):
    assert validate_spec(_spec(single_server, horizon=10, refresh_probability=0.5))


def test_dynamic_refresh_process():
    rng = np.random.default_rng(0)
    assert dynamic_refresh_process(100, 10, 0.0, rng) == (QueueLifetime(1, 1, math.inf),)
    lives = dynamic_refresh_process(100, 10, 1.0, rng)
    assert len(lives) == 10
    assert lives[0] == QueueLifetime(1, 1, 10)
    assert lives[-1] == QueueLifetime(1, 91, math.inf)
    with pytest.raises(ConfigError):
        dynamic_refresh_process(100, 10, 1.5, rng)


def test_schedule_records():
    lives = schedule_from_records([{'queue': 1, 'join': 1, 'leave': 5}, {'queue': 1, 'join': 7}])
    assert lives == (QueueLifetime(1, 1, 5), QueueLifetime(1, 7, math.inf))
    with pytest.raises(ConfigError):
        schedule_from_records([{'join': 1}])


def test_survival_time():
    assert survival_time(QueueLifetime(0, 5, 20), 100) == 16
    assert survival_time(QueueLifetime(0, 5), 10) == 6
    assert survival_time(QueueLifetime(0, 50), 10) == 0


def test_downsampled_trajectories(two_by_two, short_epochs):
    series = run(_spec(two_by_two, 'dam-k', short_epochs, horizon=200, downsample_threshold=100))
    assert list(series.queue_slots) == [1, 51, 101, 151]
    frame = series.slot_frame()
    assert len(frame) == 200
    assert frame['q_0'].notna().sum() == 4
    assert frame['weighted_sum'].notna().all()


def test_time_average():
    series = MetricsSeries(weighted_sum=np.array([1.0, 2.0, 3.0, 4.0]), total_queue=np.zeros(4),
                           queue_slots=np.arange(1, 5), queue_lengths=np.zeros((4, 1)))
    assert series.time_average() == pytest.approx(2.5)
    assert series.time_average(3, 4) == pytest.approx(3.5)


def test_single_replication_matches_run(two_by_two, short_epochs):
    spec = _spec(two_by_two, 'dam-k', short_epochs, horizon=300, master_seed=5)
    summary = run_replications(spec, 1)
    assert summary.seeds == [5]
    assert np.allclose(summary.frame['weighted_sum_mean'], run(spec).weighted_sum)
    assert (summary.frame['weighted_sum_stderr'] == 0.0).all()


def test_replications_use_consecutive_seeds(two_by_two, short_epochs):
    spec = _spec(two_by_two, 'dam-k', short_epochs, horizon=300, master_seed=5)
    assert replication_seeds(spec, 3) == [5, 6, 7]
    with pytest.raises(ValueError):
        replication_seeds(spec, 0)
    summary = run_replications(spec, 3)
    expected = np.mean([r.weighted_sum for r in summary.runs], axis=0)
    assert np.allclose(summary.frame['weighted_sum_mean'], expected)
    assert summary.n_seeds == 3
    assert summary.final_average() == pytest.approx(float(expected.mean()))


def test_aggregate_stderr():
    runs = [MetricsSeries(weighted_sum=np.array([v, v]), total_queue=np.array([v, v]),
                          queue_slots=np.arange(1, 3), queue_lengths=np.zeros((2, 1))) for v in (1.0, 3.0)]
    summary = aggregate(runs, [0, 1])
    assert summary.frame['total_queue_mean'].tolist() == [2.0, 2.0]
    assert summary.frame['total_queue_stderr'].tolist() == pytest.approx([1.0, 1.0])


def test_csv_output_is_byte_identical(tmp_path, two_by_two, short_epochs):
    spec = _spec(two_by_two, 'dam-ucb', short_epochs, horizon=500, master_seed=1)
    first = write_summary(run_replications(spec, 2), str(tmp_path / "a"))
    second = write_summary(run_replications(spec, 2), str(tmp_path / "b"))
    assert set(first) == {'slots', 'epochs', 'aggregate'}
    for key in first:
        with open(first[key], 'rb') as f1, open(second[key], 'rb') as f2:
            assert f1.read() == f2.read()
    with open(first['slots'], encoding='utf-8') as f:
        assert f.readline().strip() == 'slot,weighted_sum,total_queue,q_0,q_1'


def test_write_metrics_and_rows(tmp_path, two_by_two):
    paths = write_metrics(run(_spec(two_by_two, 'fixed', horizon=20)), str(tmp_path), prefix='fixed_')
    assert paths['slots'].endswith('fixed_slots.csv')
    path = write_rows([{'p': 0.5, 'policy': 'dyn-dam-fe', 'time_avg_total_queue': 1.25}],
                      ['p', 'policy', 'time_avg_total_queue'], str(tmp_path / "sweep" / "out.csv"))
    with open(path, encoding='utf-8') as f:
        assert f.read() == 'p,policy,time_avg_total_queue\n0.5,dyn-dam-fe,1.25\n'


def test_forced_converge_small_instance():
    w = np.array([[3.0, 1.0], [2.0, 2.5]])
    result = run_forced_converge(w, check_period=2, step_multiplier=1.0 / 16.0, seed=4)
    assert result.stable
    assert result.matching.is_valid()
    assert check_complementary_slackness(result.matching, result.certificate, w, 1.0 / 16.0) == []
    assert slackness_implies_approx(result.matching, result.certificate, w, 1.0 / 16.0).holds
    assert result.converge_slot - 1 <= converge_bound(2, 2, 2, 1.0)


def test_forced_converge_zero_weights():
    result = run_forced_converge(np.zeros((2, 3)), check_period=3, step_multiplier=0.1)
    assert result.stable
    assert result.matching.assignment == (None, None)
    assert result.converge_slot == 1


def test_converge_bound():
    assert converge_bound(1, 1, 24, 1.0) == 2376
    assert converge_bound(4, 4, 148, 0.25) == 1262720
