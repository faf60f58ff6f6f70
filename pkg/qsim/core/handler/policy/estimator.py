#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Service-rate estimates built from an agent's own request outcomes
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass
class EstimatorState:
    sample_mean: np.ndarray
    sample_count: np.ndarray

    @classmethod
    def empty(cls, n_servers: int) -> "EstimatorState":
        return cls(np.zeros(n_servers), np.zeros(n_servers, dtype=np.int64))


def dam_update(samples: Sequence[int], est: EstimatorState, server: int) -> EstimatorState:
    """
    Fold a window of constant-bid outcomes for one server into the estimate.

    Outcomes up to and including the first success are dropped: before it,
    another agent may have held the server. An all-failure window is ignored.
    """
    flags = np.asarray(samples, dtype=np.int64)
    hits = np.flatnonzero(flags)
    if hits.size == 0:
        return est
    kept = flags[hits[0] + 1:]
    if kept.size == 0:
        return est
    n_old = int(est.sample_count[server])
    n_new = n_old + int(kept.size)
    est.sample_mean[server] = (est.sample_mean[server] * n_old + float(kept.sum())) / n_new
    est.sample_count[server] = n_new
    return est


def forced_exploration_rates(est: EstimatorState, t0: int) -> np.ndarray:
    """Optimistic rates for exploit epochs; unsampled servers count as 0"""
    log_term = math.log(max(float(t0), math.e))
    rates = np.zeros_like(est.sample_mean)
    sampled = est.sample_count > 0
    radius = np.sqrt(3.0 * log_term / est.sample_count[sampled])
    rates[sampled] = np.minimum(1.0, est.sample_mean[sampled] + radius)
    return rates


def ucb_rates(est: EstimatorState, t0: int, n_servers: int, rate_floor: float) -> np.ndarray:
    """Optimistic rates clamped into [rate_floor, 1]; unsampled servers count as 1"""
    log_term = math.log(t0 + n_servers)
    rates = np.ones_like(est.sample_mean)
    sampled = est.sample_count > 0
    radius = np.sqrt(3.0 * log_term / est.sample_count[sampled])
    rates[sampled] = np.minimum(1.0, est.sample_mean[sampled] + radius)
    return np.maximum(rate_floor, rates)


def exploration_probability(n_servers: int, epoch: int, gamma: float) -> float:
    return min(1.0, n_servers / float(epoch) ** gamma)
