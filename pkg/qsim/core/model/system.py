#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Queueing system model: instance definition, arrivals, server selection,
service sampling and queue-length dynamics
"""

import os
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Any

import numpy as np
import yaml

from qsim.core.utils.errors import ConfigError


@dataclass(frozen=True)
class SystemConfig:
    """Immutable problem instance (N queues, K servers)"""

    n_queues: int
    n_servers: int
    arrival_rates: Tuple[float, ...]
    service_rates: Tuple[Tuple[float, ...], ...]
    slackness: float
    rate_floor: float
    # periodic arrival-rate switching; empty means arrival_rates holds forever
    arrival_schedule: Tuple[Tuple[float, ...], ...] = ()
    switch_period: int = 0

    @classmethod
    def from_lists(cls, arrival_rates: Sequence[float], service_rates: Sequence[Sequence[float]],
                   slackness: float, rate_floor: float,
                   arrival_schedule: Optional[Sequence[Sequence[float]]] = None,
                   switch_period: int = 0) -> "SystemConfig":
        """Build a config from plain lists, inferring N and K"""
        mu = tuple(tuple(float(v) for v in row) for row in service_rates)
        return cls(
            n_queues=len(mu),
            n_servers=len(mu[0]) if mu else 0,
            arrival_rates=tuple(float(v) for v in arrival_rates),
            service_rates=mu,
            slackness=float(slackness),
            rate_floor=float(rate_floor),
            arrival_schedule=tuple(tuple(float(v) for v in phase) for phase in (arrival_schedule or ())),
            switch_period=int(switch_period),
        )

    def arrival_rates_at(self, t: int) -> Tuple[float, ...]:
        """Arrival-rate vector in force at slot t (t >= 1)"""
        if not self.arrival_schedule:
            return self.arrival_rates
        phase = ((t - 1) // self.switch_period) % len(self.arrival_schedule)
        return self.arrival_schedule[phase]

    def rate_phases(self) -> Tuple[Tuple[float, ...], ...]:
        """Every arrival-rate vector the instance can be in"""
        return self.arrival_schedule or (self.arrival_rates,)

    def service_matrix(self) -> np.ndarray:
        return np.asarray(self.service_rates, dtype=float).reshape(self.n_queues, self.n_servers)

    def has_zero_rate(self) -> bool:
        return any(mu == 0.0 for row in self.service_rates for mu in row)


class Request(NamedTuple):
    """The only message an agent sends each slot; target None is a no-op"""

    agent: int
    target: Optional[int]
    bid: float


NO_REQUEST_BID = 0.0


def validate_config(cfg: SystemConfig) -> List[str]:
    """Return every invariant violation of cfg; an empty list means ok"""
    violations = []
    if cfg.n_queues < 1:
        violations.append(f"n_queues must be >= 1, got {cfg.n_queues}")
    if cfg.n_servers < 1:
        violations.append(f"n_servers must be >= 1, got {cfg.n_servers}")
    if not 0.0 < cfg.slackness <= 1.0:
        violations.append(f"slackness out of range (0,1]: {cfg.slackness}")
    if not 0.0 < cfg.rate_floor <= 1.0:
        violations.append(f"rate floor out of range (0,1]: {cfg.rate_floor}")

    if len(cfg.service_rates) != cfg.n_queues:
        violations.append(f"service_rates has {len(cfg.service_rates)} rows, expected {cfg.n_queues}")
    for i, row in enumerate(cfg.service_rates):
        if len(row) != cfg.n_servers:
            violations.append(f"service_rates row {i} has {len(row)} entries, expected {cfg.n_servers}")
        for j, mu in enumerate(row):
            if not 0.0 <= mu <= 1.0:
                violations.append(f"service rate out of range: mu[{i}][{j}]={mu}")
            elif 0.0 < mu < cfg.rate_floor:
                violations.append(f"mu below floor: mu[{i}][{j}]={mu} < delta={cfg.rate_floor}")

    phases = [("arrival_rates", cfg.arrival_rates)]
    phases += [(f"arrival_schedule[{k}]", phase) for k, phase in enumerate(cfg.arrival_schedule)]
    for name, rates in phases:
        if len(rates) != cfg.n_queues:
            violations.append(f"{name} has {len(rates)} entries, expected {cfg.n_queues}")
        for i, lam in enumerate(rates):
            if not 0.0 <= lam <= 1.0:
                violations.append(f"arrival rate out of range: {name}[{i}]={lam}")
    if cfg.arrival_schedule and cfg.switch_period < 1:
        violations.append(f"switch_period must be >= 1 with an arrival schedule, got {cfg.switch_period}")
    return violations


def sample_arrivals(cfg: SystemConfig, rng: np.random.Generator, t: int) -> List[int]:
    """Independent Bernoulli(lambda_i) arrival flags for slot t"""
    rates = cfg.arrival_rates_at(t)
    draws = rng.random(cfg.n_queues)
    return [1 if u < lam else 0 for u, lam in zip(draws, rates)]


def resolve_server(requests: Sequence[Request]) -> Optional[int]:
    """Highest bid wins; exact ties go to the lowest agent id"""
    selected = None
    best_bid = 0.0
    for req in requests:
        if req.target is None:
            continue
        if selected is None or req.bid > best_bid or (req.bid == best_bid and req.agent < selected):
            selected = req.agent
            best_bid = req.bid
    return selected


def sample_service(selected: Optional[int], server: int, cfg: SystemConfig,
                   rng: np.random.Generator, forced: bool = False) -> Optional[int]:
    """Service outcome of server for its selected agent; None when idle"""
    if selected is None:
        return None
    mu = cfg.service_rates[selected][server]
    if forced:
        return 1 if mu > 0.0 else 0
    return 1 if rng.random() < mu else 0


def advance_queue(length: int, arrival: int, served: int) -> int:
    """Q(t+1) = (Q(t) + A(t) - S(t))^+"""
    return max(length + arrival - served, 0)


def symmetric_slack_from_gap(gap: float, n_servers: int) -> float:
    """Slackness implied by a symmetric-rate stability gap"""
    if gap < 0:
        raise ConfigError(f"gap must be nonnegative, got {gap}")
    if n_servers < 1:
        raise ConfigError(f"need at least one server, got {n_servers}")
    return gap / n_servers


def symmetric_gap(arrival_rates: Sequence[float], server_rates: Sequence[float]) -> float:
    """min_n sum of the top min(n,K) server rates minus sum of the top n arrival rates"""
    lam = sorted(arrival_rates, reverse=True)
    mu = sorted(server_rates, reverse=True)
    gap = None
    lam_sum = 0.0
    for n, rate in enumerate(lam, start=1):
        lam_sum += rate
        value = sum(mu[:min(n, len(mu))]) - lam_sum
        gap = value if gap is None else min(gap, value)
    return gap if gap is not None else 0.0


_REQUIRED_KEYS = ('n_queues', 'n_servers', 'arrival_rates', 'service_rates', 'slackness', 'rate_floor')


def config_from_mapping(data: Dict[str, Any]) -> SystemConfig:
    """Build a SystemConfig from a parsed key-value mapping"""
    missing = [key for key in _REQUIRED_KEYS if key not in data]
    if missing:
        raise ConfigError(f"config is missing keys: {', '.join(missing)}")
    try:
        cfg = SystemConfig(
            n_queues=int(data['n_queues']),
            n_servers=int(data['n_servers']),
            arrival_rates=tuple(float(v) for v in data['arrival_rates']),
            service_rates=tuple(tuple(float(v) for v in row) for row in data['service_rates']),
            slackness=float(data['slackness']),
            rate_floor=float(data['rate_floor']),
            arrival_schedule=tuple(tuple(float(v) for v in phase) for phase in data.get('arrival_schedule') or ()),
            switch_period=int(data.get('switch_period') or 0),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"malformed config value: {e}") from e
    return cfg


def load_config_file(path: str) -> Dict[str, Any]:
    """Read a YAML config file into a mapping"""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, 'r', encoding='utf-8') as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"cannot parse {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a mapping at top level")
    return data


def load_system_config(path: str) -> SystemConfig:
    return config_from_mapping(load_config_file(path))
