#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Epoch structure constants: checking period, converge length, epoch length
"""

import math
from dataclasses import dataclass

from qsim.core.utils.errors import ParamsError

THEORETICAL = 'theoretical'
TUNED = 'tuned'
MODES = (THEORETICAL, TUNED)


@dataclass(frozen=True)
class EpochParams:
    """Epoch layout shared by every agent of a run"""

    check_period: int
    converge_len: int
    epoch_len: int
    xi: float
    mode: str
    step_multiplier: float

    @property
    def commit_len(self) -> int:
        return self.epoch_len - self.converge_len

    def epoch_of(self, t: int) -> int:
        """1-based epoch index containing slot t"""
        return (t - 1) // self.epoch_len + 1

    def epoch_start(self, epoch: int) -> int:
        return (epoch - 1) * self.epoch_len + 1

    def in_converge(self, t: int) -> bool:
        return (t - 1) % self.epoch_len < self.converge_len


def _ceil(x: float) -> int:
    # absorbs float noise such as 2376.0000000001
    return int(math.ceil(x - 1e-9 * max(1.0, abs(x))))


def log_term(x: float, base: str) -> float:
    if base == 'e':
        return math.log(x)
    if base == '2':
        return math.log2(x)
    raise ParamsError(f"unknown log base: {base}")


def _check_inputs(epsilon: float, delta: float, n_queues: int, n_servers: int) -> None:
    if not 0.0 < delta < 1.0:
        raise ParamsError(f"rate floor must lie in (0,1), got {delta}")
    if not 0.0 < epsilon <= 1.0:
        raise ParamsError(f"slackness must lie in (0,1], got {epsilon}")
    if n_queues < 1 or n_servers < 1:
        raise ParamsError(f"need N >= 1 and K >= 1, got N={n_queues}, K={n_servers}")


def compute_xi(epsilon: float, n_queues: int, n_servers: int, log_base: str = 'e') -> float:
    return epsilon ** 2 / (3200.0 * n_servers ** 2 * (log_term(n_queues, log_base) + n_servers))


def compute_check_period(delta: float, xi: float) -> int:
    log_miss = math.log(1.0 - delta)
    return _ceil(max(3.0, (2.0 / log_miss) ** 2, 2.0 * math.log(xi) / log_miss))


def compute_theoretical_params(epsilon: float, delta: float, n_queues: int, n_servers: int,
                               log_base: str = 'e') -> EpochParams:
    _check_inputs(epsilon, delta, n_queues, n_servers)
    xi = compute_xi(epsilon, n_queues, n_servers, log_base)
    check_period = compute_check_period(delta, xi)
    log_n = log_term(n_queues, log_base)
    converge_len = _ceil(99.0 * n_servers * check_period * (log_n + n_servers) / epsilon)
    epoch_len = _ceil((32.0 / epsilon + 1.0) * converge_len)
    return EpochParams(check_period, converge_len, epoch_len, xi, THEORETICAL, epsilon / 16.0)


def compute_tuned_params(epsilon: float, delta: float, n_queues: int, n_servers: int,
                         log_base: str = 'e') -> EpochParams:
    _check_inputs(epsilon, delta, n_queues, n_servers)
    xi = compute_xi(epsilon, n_queues, n_servers, log_base)
    check_period = compute_check_period(delta, xi)
    log_n = log_term(n_queues, log_base)
    converge_len = _ceil(n_servers * check_period * (log_n + n_servers) / (4.0 * epsilon))
    epoch_len = _ceil(2.0 * converge_len / epsilon)
    return EpochParams(check_period, converge_len, epoch_len, xi, TUNED, 0.5 * epsilon)


def compute_params(epsilon: float, delta: float, n_queues: int, n_servers: int,
                   mode: str = TUNED, log_base: str = 'e') -> EpochParams:
    if mode == THEORETICAL:
        return compute_theoretical_params(epsilon, delta, n_queues, n_servers, log_base)
    if mode == TUNED:
        return compute_tuned_params(epsilon, delta, n_queues, n_servers, log_base)
    raise ParamsError(f"unknown parameter mode: {mode}")
