#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Built-in simulation instances
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple

from qsim.core.model.slackness import check_slackness, max_slackness
from qsim.core.model.system import SystemConfig, validate_config
from qsim.core.utils.errors import ConfigError

DEFAULT_HORIZON = 200_000
SWITCH_PERIOD = 10_000


@dataclass(frozen=True)
class InstanceCatalogEntry:
    name: str
    config: SystemConfig
    epsilon: float
    delta: float
    horizon: int = DEFAULT_HORIZON
    policy_defaults: Dict[str, Any] = field(default_factory=dict)
    refresh_probability: Optional[float] = None
    description: str = ''
    note: str = ''

    @property
    def lp_slackness(self) -> float:
        return max_slackness(self.config)


def _floor3(x: float) -> float:
    return math.floor(x * 1000.0) / 1000.0


def _entry(name: str, arrival_rates, service_rates, delta: float, epsilon: Optional[float],
           description: str, note: str = '', **kwargs) -> InstanceCatalogEntry:
    """Builds an entry; a missing epsilon is read off the slackness LP"""
    schedule = kwargs.pop('arrival_schedule', None)
    unscaled = SystemConfig.from_lists(arrival_rates, service_rates, 1.0, delta,
                                       arrival_schedule=schedule, switch_period=SWITCH_PERIOD if schedule else 0)
    if epsilon is None:
        epsilon = min(1.0, _floor3(max_slackness(unscaled)))
    cfg = SystemConfig.from_lists(arrival_rates, service_rates, epsilon, delta,
                                  arrival_schedule=schedule, switch_period=SWITCH_PERIOD if schedule else 0)
    return InstanceCatalogEntry(name=name, config=cfg, epsilon=epsilon, delta=delta,
                                description=description, note=note, **kwargs)


@lru_cache(maxsize=1)
def _build() -> Tuple[InstanceCatalogEntry, ...]:
    n = 4
    f1 = _entry('f1', [(n + 1) / n ** 2] * n,
                [[1.0] + [(n - 1) / n ** 2] * (n - 1) for _ in range(n)],
                delta=0.1875, epsilon=0.25,
                description='N=K=4, one fast server shared by all queues')

    f2 = _entry('f2', [0.4] * 8, [[0.9, 0.9] + [0.4] * 6 for _ in range(8)],
                delta=0.4, epsilon=0.3125,
                description='N=K=8, two fast servers')

    f3 = _entry('f3', [0.3] * 4 + [1.0 / 600.0] * 60, [[1.0, 0.4, 0.4, 0.4] for _ in range(64)],
                delta=0.4, epsilon=None,
                description='N=64, K=4, four heavy queues and sixty light ones',
                note='documented as roughly 0.7; epsilon here comes from the slackness LP')

    phases = [[0.7, 0.5, 0.3], [0.5, 0.5, 0.5], [0.4, 0.8, 0.2]]
    f4 = _entry('f4', phases[0], [[1.0, 0.5, 0.3] for _ in range(3)],
                delta=0.3, epsilon=0.2, arrival_schedule=phases,
                note='equals the slackness LP maximum of the worst phase',
                description=f'N=K=3, arrival rates rotate every {SWITCH_PERIOD} slots')

    f5 = _entry('f5', [5.0 / 6.0, 0.7, 0.5, 0.4],
                [[1.0, 1.0, 1.0, 1.0]] + [[1.0, 0.5, 0.4, 0.2] for _ in range(3)],
                delta=0.2, epsilon=None,
                description='N=K=4, asymmetric service rates')

    f6 = _entry('f6', [0.7, 0.4], [[0.9, 0.3], [0.3, 0.9]],
                delta=0.3, epsilon=0.25, refresh_probability=1.0,
                note='set below the slackness LP maximum of 2/7',
                policy_defaults={'policy': 'dyn-dam-fe'},
                description='N=K=2, queue 2 replaced by a fresh copy at epoch starts')
    return (f1, f2, f3, f4, f5, f6)


def catalog() -> List[InstanceCatalogEntry]:
    return list(_build())


@lru_cache(maxsize=1)
def failure_instance() -> InstanceCatalogEntry:
    """Two identical queues for which any fixed assignment is unstable"""
    return _entry('ex-failure', [0.5, 0.5], [[0.8, 0.4], [0.8, 0.4]],
                  delta=0.4, epsilon=0.2, policy_defaults={'policy': 'fixed'},
                  description='N=K=2, static matchings cannot stabilize it')


def lookup(name: str) -> InstanceCatalogEntry:
    entries = {entry.name: entry for entry in catalog()}
    fixture = failure_instance()
    entries[fixture.name] = fixture
    if name not in entries:
        raise ConfigError(f"unknown instance '{name}', expected one of {', '.join(sorted(entries))}")
    return entries[name]


def validate_entry(entry: InstanceCatalogEntry) -> List[str]:
    violations = validate_config(entry.config)
    if not check_slackness(entry.config, entry.epsilon):
        violations.append(f"{entry.name}: documented slackness {entry.epsilon} is not feasible")
    return violations
