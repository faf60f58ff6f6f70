import asyncio
import os

import pytest

from qsim.core.cli.parser import parse_args
from qsim.core.controller.controller import SEED_ENV, QsimController
from qsim.core.utils.errors import ConfigError
from qsim.qsim import main

SYSTEM_YAML = """\
n_queues: 2
n_servers: 2
arrival_rates: [0.3, 0.3]
service_rates:
  - [0.9, 0.3]
  - [0.3, 0.9]
slackness: 0.5
rate_floor: 0.3
initial_lengths: [2, 1]
dynamic_schedule:
  - {queue: 1, join: 1, leave: 300}
  - {queue: 1, join: 401}
"""


@pytest.fixture
def controller():
    return QsimController(silent=True)


@pytest.fixture
def system_file(tmp_path):
    path = tmp_path / "pair.yaml"
    path.write_text(SYSTEM_YAML, encoding='utf-8')
    return str(path)


def test_parser_run_flags():
    args = parse_args(['run', '-i', 'f2', '-p', 'dam-ucb', '--horizon', '100', '--seeds', '2',
                       '--service-mode', 'forced', '-vv'])
    assert args.command == 'run'
    assert (args.instance, args.policy, args.horizon, args.seeds) == ('f2', 'dam-ucb', 100, 2)
    assert args.service_mode == 'forced'
    assert args.verbose == 2
    assert args.seed is None


def test_parser_rejects_bad_input():
    with pytest.raises(SystemExit):
        parse_args(['run', '-i', 'f2', '-c', 'x.yaml'])
    with pytest.raises(SystemExit):
        parse_args(['run', '-p', 'greedy'])


def test_parser_sweep_and_solve():
    args = parse_args(['sweep-refresh', '--exponents', '-2', '0', '--policies', 'dyn-dam-ucb'])
    assert args.exponents == [-2, 0]
    assert args.policies == ['dyn-dam-ucb']
    args = parse_args(['solve', 'w.yaml'])
    assert args.step == pytest.approx(1 / 16)


def test_seed_precedence(controller, monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)
    assert controller.resolve_seed(None) == controller.config.get('master_seed', 0)
    assert controller.resolve_seed(None, 11) == 11
    monkeypatch.setenv(SEED_ENV, '42')
    assert controller.resolve_seed(None, 11) == 42
    assert controller.resolve_seed(7) == 7
    monkeypatch.setenv(SEED_ENV, 'abc')
    with pytest.raises(ConfigError):
        controller.resolve_seed(None)


def test_build_spec_from_catalog(controller):
    label, spec = controller.build_spec(instance='f6', horizon=1000, seed=3)
    assert label == 'f6'
    assert spec.policy.kind == 'dyn-dam-fe'
    assert spec.refresh_probability == 1.0
    assert spec.horizon == 1000
    assert spec.master_seed == 3


def test_build_spec_from_file(controller, system_file):
    label, spec = controller.build_spec(config_file=system_file, policy='dam-k', horizon=500,
                                        service_mode='forced', gamma=0.5)
    assert label == 'pair'
    assert spec.initial_lengths == (2, 1)
    assert len(spec.dynamic_schedule) == 2
    assert spec.service_mode == 'forced'
    assert spec.policy.gamma == 0.5


def test_infeasible_slackness_is_refused(controller, tmp_path):
    path = tmp_path / "tight.yaml"
    path.write_text(SYSTEM_YAML.replace('[0.3, 0.3]', '[0.7, 0.7]'), encoding='utf-8')
    with pytest.raises(ConfigError, match="infeasible"):
        controller.build_spec(config_file=str(path))


def test_config_violations_are_refused(controller, tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text(SYSTEM_YAML.replace('rate_floor: 0.3', 'rate_floor: 0.5'), encoding='utf-8')
    with pytest.raises(ConfigError, match="mu below floor"):
        controller.build_spec(config_file=str(path))


def test_unknown_instance_is_refused(controller):
    with pytest.raises(ConfigError):
        controller.build_spec(instance='nope')


def test_run_writes_csv(controller, system_file, tmp_path):
    result = asyncio.run(controller.run(config_file=system_file, policy='dam-k', horizon=600, seeds=2,
                                        seed=1, out_dir=str(tmp_path / "out")))
    assert result['summary'].n_seeds == 2
    for path in result['paths'].values():
        assert os.path.exists(path)
        assert os.path.dirname(path) == str(tmp_path / "out" / "pair_dam-k")


def test_sweep_refresh(controller, tmp_path):
    result = asyncio.run(controller.sweep_refresh(instance='f6', probabilities=[0.0, 1.0],
                                                  policies=['dyn-dam-ucb'], horizon=500, seeds=1,
                                                  out_dir=str(tmp_path)))
    assert [(row['p'], row['policy']) for row in result['rows']] == [(0.0, 'dyn-dam-ucb'), (1.0, 'dyn-dam-ucb')]
    with open(result['path'], encoding='utf-8') as f:
        assert f.readline().strip() == 'p,policy,time_avg_total_queue'


def test_sweep_rejects_bad_probability(controller, tmp_path):
    with pytest.raises(ConfigError):
        asyncio.run(controller.sweep_refresh(probabilities=[1.5], horizon=10, out_dir=str(tmp_path)))


def test_params_side_by_side(controller):
    tuned, theoretical = controller.params(instance='f1')
    assert (tuned.check_period, tuned.converge_len, tuned.epoch_len) == (148, 3189, 25512)
    assert theoretical.epoch_len == 162890880
    tuned, _ = controller.params(epsilon=1.0, delta=0.5, n_queues=1, n_servers=1)
    assert tuned.epoch_len == 12
    with pytest.raises(ConfigError):
        controller.params(epsilon=0.5)


def test_solve_yaml(controller, tmp_path):
    path = tmp_path / "weights.yaml"
    path.write_text("weights:\n  - [3.0, 1.0]\n  - [2.0, 2.5]\n", encoding='utf-8')
    result = controller.solve(str(path), step=0.25)
    assert result['value'] == pytest.approx(5.5)
    assert result['auction_value'] >= 0.75 * 5.5
    assert result['violations'] == []

    bare = tmp_path / "bare.yaml"
    bare.write_text("- [1.0]\n- [4.0]\n", encoding='utf-8')
    assert controller.solve(str(bare))['matching'].assignment == (None, 0)

    with pytest.raises(ConfigError):
        controller.solve(str(tmp_path / "missing.yaml"))


def test_catalog_rows(controller):
    rows = controller.catalog_rows()
    assert len(rows) == 6
    assert all(row['status'] == 'ok' for row in rows)


def test_main_params(capsys):
    params = asyncio.run(main(['params', '--epsilon', '1', '--delta', '0.5', '-n', '1', '-k', '1', '--silent']))
    assert params[0].converge_len == 6
    assert params[1].converge_len == 2376


def test_main_error_exits_with_status_one():
    with pytest.raises(SystemExit) as exc:
        asyncio.run(main(['run', '-i', 'nope', '--silent']))
    assert exc.value.code == 1


def test_main_params_rejects_bad_delta():
    with pytest.raises(SystemExit) as exc:
        asyncio.run(main(['params', '--epsilon', '0.5', '--delta', '1.0', '-n', '2', '-k', '2', '--silent']))
    assert exc.value.code == 1
