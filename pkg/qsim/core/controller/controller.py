#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
qsim Controller Module
"""

import os
from dataclasses import replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import yaml

from qsim.core.cli.cli import console, print_mapping, print_status, print_table
from qsim.core.config.catalog import catalog, lookup, validate_entry
from qsim.core.handler.policy.factory import PolicySpec
from qsim.core.handler.simulator.dynamic import schedule_from_records
from qsim.core.handler.simulator.engine import (FORCED, SERVICE_MODES, STOCHASTIC, SimulationSpec,
                                                forced_good_event_mode)
from qsim.core.handler.simulator.replication import ReplicationSummary, run_replications, run_replications_async
from qsim.core.handler.simulator.writer import write_rows, write_summary
from qsim.core.matching.auction import centralized_auction
from qsim.core.matching.certificate import check_complementary_slackness
from qsim.core.matching.hungarian import max_weight_matching
from qsim.core.model.params import EpochParams, compute_theoretical_params, compute_tuned_params
from qsim.core.model.slackness import check_slackness, max_slackness
from qsim.core.model.system import SystemConfig, config_from_mapping, load_config_file, validate_config
from qsim.core.utils.errors import ConfigError

SEED_ENV = 'QSIM_SEED'


class QsimController:
    """qsim main controller"""

    def __init__(self, verbose: int = 0, silent: bool = False, config_path: Optional[str] = None):
        self.verbose = verbose
        self.silent = silent
        self.config_path = config_path
        self.config = self._load_config()

    def _load_config(self) -> Dict:
        """Load defaults from config.yaml"""
        config_path = self.config_path or os.path.join(
            os.path.dirname(os.path.dirname(__file__)),
            'config', 'config.yaml'
        )

        if os.path.exists(config_path):
            with open(config_path, 'r', encoding='utf-8') as f:
                return yaml.safe_load(f) or {}
        return {}

    def _info(self, message: str, status: str = "info") -> None:
        if not self.silent:
            print_status(message, status)

    def resolve_seed(self, seed: Optional[int], file_seed: Optional[int] = None) -> int:
        """--seed, then QSIM_SEED, then the instance file, then config.yaml"""
        if seed is not None:
            return seed
        env = os.environ.get(SEED_ENV)
        if env:
            try:
                return int(env)
            except ValueError as e:
                raise ConfigError(f"{SEED_ENV} must be an integer, got '{env}'") from e
        if file_seed is not None:
            return int(file_seed)
        return int(self.config.get('master_seed', 0))

    def _setting(self, value, key: str, overrides: Dict[str, Any], default=None):
        # CLI flag > instance file > config.yaml
        if value is not None:
            return value
        if key in overrides:
            return overrides[key]
        return self.config.get(key, default)

    def _load_source(self, instance: Optional[str], config_file: Optional[str]) -> Tuple[str, SystemConfig, Dict[str, Any]]:
        if config_file:
            data = load_config_file(config_file)
            label = os.path.splitext(os.path.basename(config_file))[0]
            return label, config_from_mapping(data), data
        entry = lookup(instance or 'f2')
        overrides = dict(entry.policy_defaults)
        overrides.setdefault('horizon', entry.horizon)
        if entry.refresh_probability is not None:
            overrides.setdefault('refresh_probability', entry.refresh_probability)
        return entry.name, entry.config, overrides

    def build_spec(self, instance: Optional[str] = None, config_file: Optional[str] = None,
                   policy: Optional[str] = None, horizon: Optional[int] = None, seed: Optional[int] = None,
                   service_mode: Optional[str] = None, mode: Optional[str] = None,
                   gamma: Optional[float] = None, harvest: Optional[bool] = None) -> Tuple[str, SimulationSpec]:
        """Resolve every setting and refuse instances that cannot be simulated as documented"""
        label, cfg, overrides = self._load_source(instance, config_file)

        violations = validate_config(cfg)
        if violations:
            raise ConfigError(f"{label}: " + "; ".join(violations))
        if not check_slackness(cfg, cfg.slackness):
            raise ConfigError(f"{label}: slackness {cfg.slackness} is infeasible "
                              f"(largest feasible value {max_slackness(cfg):.6f})")

        policy_spec = PolicySpec(
            kind=self._setting(policy, 'policy', overrides, 'dam-k'),
            mode=self._setting(mode, 'parameter_mode', overrides, 'tuned'),
            gamma=float(self._setting(gamma, 'gamma', overrides, 0.8)),
            harvest_commit=bool(self._setting(harvest, 'harvest_commit', overrides, True)),
            log_base=str(self._setting(None, 'log_base', overrides, 'e')),
            fixed_servers=tuple(overrides['fixed_servers']) if overrides.get('fixed_servers') else None,
        )
        schedule = overrides.get('dynamic_schedule')
        initial = overrides.get('initial_lengths')
        refresh = overrides.get('refresh_probability')
        spec = SimulationSpec(
            config=cfg,
            policy=policy_spec,
            horizon=int(self._setting(horizon, 'horizon', overrides, 200000)),
            master_seed=self.resolve_seed(seed, overrides.get('master_seed')),
            dynamic_schedule=schedule_from_records(schedule) if schedule else None,
            refresh_probability=None if refresh is None else float(refresh),
            initial_lengths=tuple(int(q) for q in initial) if initial else None,
            downsample_threshold=int(self.config.get('downsample_threshold', 1_000_000)),
            verbose=self.verbose,
        )
        service = self._setting(service_mode, 'service_mode', overrides, STOCHASTIC)
        if service not in SERVICE_MODES:
            raise ConfigError(f"unknown service mode '{service}'")
        if service == FORCED:
            spec = forced_good_event_mode(spec)
        if policy_spec.base_kind == 'dam-ucb' and cfg.has_zero_rate():
            self._info(f"{label}: dam-ucb expects every service rate to be positive", "warning")
        return label, spec

    def get_output_path(self, label: str, policy: str, out_dir: Optional[str] = None) -> str:
        """Output directory for one instance/policy pair"""
        base = out_dir or self.config.get('out_dir', 'results')
        path = os.path.join(base, f"{label}_{policy}")
        os.makedirs(path, exist_ok=True)
        return path

    async def _replicate(self, spec: SimulationSpec, seeds: int, concurrency: int) -> ReplicationSummary:
        if concurrency > 1 and seeds > 1:
            return await run_replications_async(spec, seeds, concurrency)
        return run_replications(spec, seeds)

    async def run(self, instance: Optional[str] = None, config_file: Optional[str] = None,
                  policy: Optional[str] = None, horizon: Optional[int] = None, seeds: Optional[int] = None,
                  seed: Optional[int] = None, service_mode: Optional[str] = None, mode: Optional[str] = None,
                  gamma: Optional[float] = None, harvest: Optional[bool] = None,
                  out_dir: Optional[str] = None, concurrency: Optional[int] = None) -> Dict[str, Any]:
        """Execute a run and write its CSV files"""
        label, spec = self.build_spec(instance, config_file, policy, horizon, seed, service_mode,
                                      mode, gamma, harvest)
        seeds = int(seeds or self.config.get('seeds', 1))
        concurrency = int(concurrency or self.config.get('concurrency', 1))
        self._info(f"Running {spec.policy.kind} on {label}: {spec.horizon} slots, {seeds} seed(s) "
                   f"from {spec.master_seed}")

        summary = await self._replicate(spec, seeds, concurrency)
        paths = write_summary(summary, self.get_output_path(label, spec.policy.kind, out_dir))
        warnings = sorted({w for r in summary.runs for w in r.warnings})
        for warning in warnings[:10]:
            self._info(warning, "warning")
        return {'label': label, 'spec': spec, 'summary': summary, 'paths': paths, 'warnings': warnings}

    async def sweep_refresh(self, instance: Optional[str] = None, probabilities: Optional[List[float]] = None,
                            policies: Optional[List[str]] = None, horizon: Optional[int] = None,
                            seeds: Optional[int] = None, seed: Optional[int] = None,
                            out_dir: Optional[str] = None, concurrency: Optional[int] = None) -> Dict[str, Any]:
        """Time-averaged total queue length per (refresh probability, policy)"""
        sweep = self.config.get('sweep', {})
        instance = instance or sweep.get('instance', 'f6')
        if probabilities is None:
            probabilities = [2.0 ** e for e in sweep.get('exponents', list(range(-19, 1)))]
        policies = policies or sweep.get('policies', ['dyn-dam-fe', 'dyn-dam-ucb'])
        seeds = int(seeds or self.config.get('seeds', 1))
        concurrency = int(concurrency or self.config.get('concurrency', 1))

        rows = []
        for p in probabilities:
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"refresh probability must lie in [0,1], got {p}")
            for policy in policies:
                label, spec = self.build_spec(instance=instance, policy=policy, horizon=horizon, seed=seed)
                spec = replace(spec, refresh_probability=float(p))
                summary = await self._replicate(spec, seeds, concurrency)
                value = summary.final_average('total_queue')
                rows.append({'p': p, 'policy': policy, 'time_avg_total_queue': value})
                if self.verbose >= 1:
                    self._info(f"p={p:.3g} {policy}: {value:.4f}")

        base = out_dir or self.config.get('out_dir', 'results')
        path = write_rows(rows, ['p', 'policy', 'time_avg_total_queue'],
                          os.path.join(base, f"sweep_refresh_{instance}.csv"))
        return {'rows': rows, 'path': path}

    def params(self, epsilon: Optional[float] = None, delta: Optional[float] = None,
               n_queues: Optional[int] = None, n_servers: Optional[int] = None,
               instance: Optional[str] = None, log_base: Optional[str] = None) -> List[EpochParams]:
        """Tuned and theoretical constants side by side"""
        if instance:
            entry = lookup(instance)
            epsilon = entry.epsilon if epsilon is None else epsilon
            delta = entry.delta if delta is None else delta
            n_queues = entry.config.n_queues if n_queues is None else n_queues
            n_servers = entry.config.n_servers if n_servers is None else n_servers
        missing = [name for name, value in (('epsilon', epsilon), ('delta', delta),
                                             ('queues', n_queues), ('servers', n_servers)) if value is None]
        if missing:
            raise ConfigError(f"params needs {', '.join(missing)} (or --instance)")
        base = log_base or str(self.config.get('log_base', 'e'))
        return [compute_tuned_params(epsilon, delta, n_queues, n_servers, base),
                compute_theoretical_params(epsilon, delta, n_queues, n_servers, base)]

    def _read_weights(self, path: str) -> np.ndarray:
        if not os.path.exists(path):
            raise ConfigError(f"weights file not found: {path}")
        with open(path, 'r', encoding='utf-8') as f:
            try:
                data = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigError(f"cannot parse {path}: {e}") from e
        if isinstance(data, dict):
            data = data.get('weights')
        if data is None:
            raise ConfigError(f"{path} holds no weight matrix")
        try:
            return np.asarray(data, dtype=float)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"malformed weight matrix in {path}: {e}") from e

    def solve(self, path: str, step: float = 1.0 / 16.0) -> Dict[str, Any]:
        """Hungarian optimum plus a centralized auction and its certificate check"""
        weights = self._read_weights(path)
        try:
            matching, value = max_weight_matching(weights)
            auction_matching, certificate = centralized_auction(weights, step)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        violations = check_complementary_slackness(auction_matching, certificate, weights, step)
        return {
            'weights': weights,
            'matching': matching,
            'value': value,
            'auction_matching': auction_matching,
            'auction_value': auction_matching.value(weights),
            'certificate': certificate,
            'violations': violations,
        }

    def catalog_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for entry in catalog():
            violations = validate_entry(entry)
            rows.append({
                'name': entry.name,
                'N': entry.config.n_queues,
                'K': entry.config.n_servers,
                'epsilon': entry.epsilon,
                'lp_epsilon': entry.lp_slackness,
                'delta': entry.delta,
                'status': 'ok' if not violations else '; '.join(violations),
                'description': entry.description + (f" ({entry.note})" if entry.note else ''),
            })
        return rows

    def print_run(self, result: Dict[str, Any]) -> None:
        if self.silent:
            return
        summary: ReplicationSummary = result['summary']
        horizon = summary.runs[0].horizon
        q1, q2 = horizon // 4, horizon // 2
        print_table(
            f"{result['label']} / {result['spec'].policy.kind}",
            ["Metric", "Value"],
            [
                ("seeds", summary.n_seeds),
                ("time-avg weighted queue", f"{summary.final_average('weighted_sum'):.4f}"),
                ("time-avg total queue", f"{summary.final_average('total_queue'):.4f}"),
                ("2nd quarter weighted", f"{summary.window_average(q1 + 1, q2):.4f}"),
                ("last quarter weighted", f"{summary.window_average(horizon - q1 + 1, horizon):.4f}"),
            ],
        )
        for name, path in result['paths'].items():
            print_status(f"{name}: {path}", "success")

    def print_params(self, params: List[EpochParams]) -> None:
        if self.silent:
            return
        fields = ('check_period', 'converge_len', 'epoch_len', 'xi', 'step_multiplier')
        print_table("Epoch constants", ["Constant"] + [p.mode for p in params],
                    [(name, *[getattr(p, name) for p in params]) for name in fields])

    def print_solution(self, result: Dict[str, Any]) -> None:
        if self.silent:
            return
        print_mapping("Max-weight matching", {
            'assignment': list(result['matching'].assignment),
            'value': f"{result['value']:.6g}",
            'auction assignment': list(result['auction_matching'].assignment),
            'auction value': f"{result['auction_value']:.6g}",
            'prices': [round(p, 6) for p in result['certificate'].prices],
            'payoffs': [round(p, 6) for p in result['certificate'].payoffs],
        })
        if result['violations']:
            for violation in result['violations']:
                print_status(violation, "warning")
        else:
            print_status("certificate satisfied", "success")

    def print_catalog(self, rows: List[Dict[str, Any]]) -> None:
        if self.silent:
            return
        columns = ['name', 'N', 'K', 'epsilon', 'lp_epsilon', 'delta', 'status', 'description']
        print_table("Instance catalog", columns,
                    [[f"{r[c]:.4f}" if c == 'lp_epsilon' else r[c] for c in columns] for r in rows])
        console.print()
