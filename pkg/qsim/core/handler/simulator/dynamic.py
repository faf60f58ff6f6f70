#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Oblivious join/leave schedules for dynamic queues
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from qsim.core.utils.errors import ConfigError


@dataclass(frozen=True)
class QueueLifetime:
    """One incarnation of a queue occupying config row `queue` over [join, leave]"""

    queue: int
    join: int
    leave: float = math.inf


def dynamic_refresh_process(horizon: int, epoch_len: int, probability: float, rng: np.random.Generator,
                            queue: int = 1) -> Tuple[QueueLifetime, ...]:
    """
    At every epoch boundary after the first, with the given probability, the
    queue in row `queue` leaves and an identical fresh queue takes its place.
    """
    if not 0.0 <= probability <= 1.0:
        raise ConfigError(f"refresh probability must lie in [0,1], got {probability}")
    boundaries = np.arange(epoch_len + 1, horizon + 1, epoch_len)
    draws = rng.random(len(boundaries))
    lifetimes = []
    join = 1
    for t0, u in zip(boundaries, draws):
        if u < probability:
            lifetimes.append(QueueLifetime(queue, join, int(t0) - 1))
            join = int(t0)
    lifetimes.append(QueueLifetime(queue, join, math.inf))
    return tuple(lifetimes)


def schedule_from_records(records: Sequence[Dict[str, Any]]) -> Tuple[QueueLifetime, ...]:
    """Parse `{queue, join, leave}` mappings from a config file; leave may be omitted"""
    lifetimes: List[QueueLifetime] = []
    for record in records:
        try:
            leave = record.get('leave')
            lifetimes.append(QueueLifetime(int(record['queue']), int(record['join']),
                                           math.inf if leave is None else int(leave)))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"bad dynamic schedule entry {record!r}: {e}") from e
    return tuple(lifetimes)


def survival_time(life: QueueLifetime, horizon: int) -> int:
    """Slots of [1, horizon] during which the queue is present"""
    return max(0, int(min(horizon, life.leave)) - life.join + 1)
