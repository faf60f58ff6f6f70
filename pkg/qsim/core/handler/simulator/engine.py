#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Slot-by-slot simulation loop
"""

import math
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from qsim.core.cli.cli import print_status
from qsim.core.handler.policy.converge import AgentView
from qsim.core.handler.policy.factory import PolicySpec, build_agent, build_controller
from qsim.core.handler.simulator.dynamic import QueueLifetime, dynamic_refresh_process
from qsim.core.matching.hungarian import max_weight_matching
from qsim.core.model.params import EpochParams, compute_params
from qsim.core.model.system import (Request, SystemConfig, advance_queue, resolve_server,
                                    sample_arrivals, sample_service, validate_config)
from qsim.core.utils.errors import ConfigError
from qsim.core.utils.rng import environment_stream, schedule_stream

STOCHASTIC = 'stochastic'
FORCED = 'forced'
SERVICE_MODES = (STOCHASTIC, FORCED)
DEFAULT_STRIDE = 1000


@dataclass(frozen=True)
class SimulationSpec:
    config: SystemConfig
    policy: PolicySpec = field(default_factory=PolicySpec)
    horizon: int = 200_000
    master_seed: int = 0
    service_mode: str = STOCHASTIC
    dynamic_schedule: Optional[Tuple[QueueLifetime, ...]] = None
    refresh_probability: Optional[float] = None
    initial_lengths: Optional[Tuple[int, ...]] = None
    downsample_threshold: int = 1_000_000
    verbose: int = 0

    def with_seed(self, seed: int) -> "SimulationSpec":
        return replace(self, master_seed=seed)


@dataclass
class EpochRecord:
    epoch: int
    converge_slot: int
    weight_ratio: float
    n_explorers: int


@dataclass
class MetricsSeries:
    """Everything recorded by one run"""

    weighted_sum: np.ndarray
    total_queue: np.ndarray
    queue_slots: np.ndarray
    queue_lengths: np.ndarray
    epochs: List[EpochRecord] = field(default_factory=list)
    final_lengths: List[int] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return len(self.weighted_sum)

    def time_average(self, start: int = 1, end: Optional[int] = None, column: str = 'weighted_sum') -> float:
        """Mean of a per-slot series over slots [start, end]"""
        values = getattr(self, column)
        end = self.horizon if end is None else end
        return float(np.mean(values[start - 1:end]))

    def slot_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({
            'slot': np.arange(1, self.horizon + 1, dtype=np.int64),
            'weighted_sum': self.weighted_sum,
            'total_queue': self.total_queue,
        })
        per_queue = pd.DataFrame(self.queue_lengths,
                                 columns=[f"q_{i}" for i in range(self.queue_lengths.shape[1])])
        per_queue.insert(0, 'slot', self.queue_slots.astype(np.int64))
        return frame.merge(per_queue, on='slot', how='left')

    def epoch_frame(self) -> pd.DataFrame:
        return pd.DataFrame([vars(r) for r in self.epochs],
                            columns=['epoch', 'converge_slot', 'weight_ratio', 'n_explorers'])


def forced_good_event_mode(spec: SimulationSpec) -> SimulationSpec:
    """Same run with every selected request on a positive-rate pair succeeding"""
    return replace(spec, service_mode=FORCED)


def validate_spec(spec: SimulationSpec) -> List[str]:
    cfg = spec.config
    violations = validate_config(cfg)
    if spec.horizon < 1:
        violations.append(f"horizon must be >= 1, got {spec.horizon}")
    if spec.service_mode not in SERVICE_MODES:
        violations.append(f"unknown service mode: {spec.service_mode}")
    if spec.initial_lengths is not None:
        if len(spec.initial_lengths) != cfg.n_queues or any(q < 0 for q in spec.initial_lengths):
            violations.append(f"initial_lengths must hold {cfg.n_queues} nonnegative entries")
    servers = spec.policy.fixed_servers
    if servers is not None and (len(servers) != cfg.n_queues or any(not 0 <= j < cfg.n_servers for j in servers)):
        violations.append(f"fixed_servers must map each of {cfg.n_queues} queues to a server")
    if spec.refresh_probability is not None and cfg.n_queues < 2:
        violations.append("the refresh process needs at least two queues")
    if spec.dynamic_schedule:
        by_row: Dict[int, List[QueueLifetime]] = defaultdict(list)
        for life in spec.dynamic_schedule:
            if not 0 <= life.queue < cfg.n_queues:
                violations.append(f"dynamic schedule names unknown queue {life.queue}")
                continue
            if life.join < 1 or life.leave < life.join:
                violations.append(f"queue {life.queue} lifetime [{life.join}, {life.leave}] is empty")
            by_row[life.queue].append(life)
        for row, lives in by_row.items():
            lives.sort(key=lambda x: x.join)
            for prev, nxt in zip(lives, lives[1:]):
                if nxt.join <= prev.leave:
                    violations.append(f"queue {row} lifetimes overlap at slot {nxt.join}")
    return violations


class Simulator:
    """
    Owns the queues, the servers' selection rule and every agent of one run.
    Within a slot: departures, joins, arrivals, requests, selection, service,
    agent feedback, queue update.
    """

    def __init__(self, spec: SimulationSpec):
        violations = validate_spec(spec)
        if violations:
            raise ConfigError("; ".join(violations))
        self.spec = spec
        self.cfg = spec.config
        self.policy = spec.policy
        self.params: Optional[EpochParams] = self.policy.epoch_params(self.cfg)
        self.verbose = spec.verbose
        self.rng = environment_stream(spec.master_seed)
        self.forced = spec.service_mode == FORCED
        self.warnings: List[str] = []

        n = self.cfg.n_queues
        self.lengths = list(spec.initial_lengths) if spec.initial_lengths else [0] * n
        self.last_served = [False] * n
        self.join_slot = [1] * n
        self.incarnations = [0] * n
        self.controller = build_controller(self.policy, self.cfg) if self.policy.centralized else None
        self.agents: List[Optional[object]] = [None] * n

        self._joins: Dict[int, List[QueueLifetime]] = defaultdict(list)
        self._leaves: Dict[int, List[int]] = defaultdict(list)
        self.schedule = self._lifetimes()
        scheduled_rows = set()
        for life in self.schedule:
            scheduled_rows.add(life.queue)
            self._joins[life.join].append(life)
            if life.leave != math.inf:
                self._leaves[int(life.leave) + 1].append(life.queue)
        self.active = [row not in scheduled_rows for row in range(n)]
        for row in range(n):
            if self.active[row]:
                self._spawn(row, 1, math.inf)

        if self.policy.base_kind == 'dam-ucb' and self.cfg.has_zero_rate():
            self._warn("dam-ucb assumes every service rate is positive; this instance has a zero rate")

    def _lifetimes(self) -> Tuple[QueueLifetime, ...]:
        spec = self.spec
        if spec.dynamic_schedule is not None:
            return tuple(spec.dynamic_schedule)
        if spec.refresh_probability is None:
            return ()
        params = self.params or compute_params(self.cfg.slackness, self.cfg.rate_floor,
                                               self.cfg.n_queues, self.cfg.n_servers)
        return dynamic_refresh_process(spec.horizon, params.epoch_len, spec.refresh_probability,
                                       schedule_stream(spec.master_seed))

    def _warn(self, message: str) -> None:
        self.warnings.append(message)
        if self.verbose >= 1:
            print_status(message, "warning")

    def _spawn(self, row: int, join: int, leave: float) -> None:
        incarnation = self.incarnations[row]
        self.incarnations[row] += 1
        self.join_slot[row] = join
        if self.controller is None:
            self.agents[row] = build_agent(self.policy, self.cfg, self.params, row, self.spec.master_seed,
                                           incarnation, join, leave, self.verbose)

    def _boundary(self, t: int) -> None:
        # departures first, then joins
        for row in self._leaves.get(t, ()):
            self.active[row] = False
            self.lengths[row] = 0
            self.last_served[row] = False
            self._retire(row)
        for life in self._joins.get(t, ()):
            self.active[life.queue] = True
            self.lengths[life.queue] = 0
            self.last_served[life.queue] = False
            self._spawn(life.queue, life.join, life.leave)

    def _retire(self, row: int) -> None:
        agent = self.agents[row]
        if agent is not None:
            self.warnings.extend(agent.warnings)
        self.agents[row] = None

    def _requests(self, t: int) -> List[Request]:
        if self.controller is not None:
            lengths = [q if on else 0 for q, on in zip(self.lengths, self.active)]
            return self.controller.requests(lengths)
        requests = []
        for row, agent in enumerate(self.agents):
            if agent is None or not self.active[row]:
                continue
            view = AgentView(self.lengths[row], self.last_served[row], t, t - self.join_slot[row] + 1)
            requests.append(agent.act(view))
        return requests

    def step(self, t: int) -> Tuple[List[int], List[int], List[Request]]:
        """Advance one slot; returns (arrivals, served, requests)"""
        self._boundary(t)
        return self._slot(t)

    def _slot(self, t: int) -> Tuple[List[int], List[int], List[Request]]:
        arrivals = sample_arrivals(self.cfg, self.rng, t)
        arrivals = [a if on else 0 for a, on in zip(arrivals, self.active)]

        requests = self._requests(t)
        by_server: Dict[int, List[Request]] = defaultdict(list)
        for req in requests:
            if req.target is not None:
                by_server[req.target].append(req)

        served = [0] * self.cfg.n_queues
        for server in sorted(by_server):
            selected = resolve_server(by_server[server])
            outcome = sample_service(selected, server, self.cfg, self.rng, forced=self.forced)
            if outcome:
                served[selected] = 1

        for row, agent in enumerate(self.agents):
            if agent is not None and self.active[row]:
                agent.observe(t, bool(served[row]))
        self.last_served = [bool(s) for s in served]
        self.lengths = [advance_queue(q, a, s) for q, a, s in zip(self.lengths, arrivals, served)]
        return arrivals, served, requests

    def record_epoch_diagnostics(self, t: int, requests: List[Request]) -> EpochRecord:
        """Diagnostics of the converge phase ending at slot t"""
        n, k = self.cfg.n_queues, self.cfg.n_servers
        weights = np.zeros((n, k))
        explorers = 0
        last_change = self.params.epoch_start(self.params.epoch_of(t))
        for row, agent in enumerate(self.agents):
            if agent is None or not self.active[row] or getattr(agent, 'schedule', None) is None:
                continue
            if agent.schedule.epoch_index != self.params.epoch_of(t):
                continue
            if agent.exploring:
                explorers += 1
            elif agent.converge is not None:
                weights[row] = agent.converge.weights
                last_change = max(last_change, agent.converge.last_change)

        by_server: Dict[int, List[Request]] = defaultdict(list)
        for req in requests:
            if req.target is not None:
                by_server[req.target].append(req)
        value = 0.0
        clean = True
        for server, reqs in by_server.items():
            if len(reqs) > 1:
                clean = False
            winner = resolve_server(reqs)
            value += weights[winner, server]
        _, optimum = max_weight_matching(weights)
        ratio = 1.0 if optimum <= 0 else value / optimum
        return EpochRecord(epoch=self.params.epoch_of(t), converge_slot=last_change if clean else -1,
                           weight_ratio=ratio, n_explorers=explorers)

    def run(self) -> MetricsSeries:
        spec = self.spec
        n = self.cfg.n_queues
        horizon = spec.horizon
        weighted = np.zeros(horizon)
        total = np.zeros(horizon)
        stride = 1
        if horizon >= spec.downsample_threshold:
            stride = self.params.epoch_len if self.params is not None else DEFAULT_STRIDE
        sample_slots = np.arange(1, horizon + 1, stride)
        per_queue = np.full((len(sample_slots), n), np.nan)
        epochs: List[EpochRecord] = []

        next_sample = 0
        for t in range(1, horizon + 1):
            self._boundary(t)
            # Q(t) before this slot's arrivals and services
            rates = self.cfg.arrival_rates_at(t)
            w_sum = 0.0
            q_sum = 0
            for row in range(n):
                if self.active[row]:
                    w_sum += rates[row] * self.lengths[row]
                    q_sum += self.lengths[row]
            weighted[t - 1] = w_sum
            total[t - 1] = q_sum
            if next_sample < len(sample_slots) and sample_slots[next_sample] == t:
                for row in range(n):
                    if self.active[row]:
                        per_queue[next_sample, row] = self.lengths[row]
                next_sample += 1

            _, _, requests = self._slot(t)
            if self.params is not None and (t - 1) % self.params.epoch_len == self.params.converge_len - 1:
                record = self.record_epoch_diagnostics(t, requests)
                epochs.append(record)
                if self.verbose >= 2:
                    print_status(f"epoch {record.epoch}: converged at {record.converge_slot}, "
                                 f"weight ratio {record.weight_ratio:.4f}, explorers {record.n_explorers}")

        for agent in self.agents:
            if agent is not None:
                self.warnings.extend(agent.warnings)
        return MetricsSeries(
            weighted_sum=weighted,
            total_queue=total,
            queue_slots=sample_slots,
            queue_lengths=per_queue,
            epochs=epochs,
            final_lengths=[q if on else 0 for q, on in zip(self.lengths, self.active)],
            warnings=list(self.warnings),
        )


def run(spec: SimulationSpec) -> MetricsSeries:
    return Simulator(spec).run()
