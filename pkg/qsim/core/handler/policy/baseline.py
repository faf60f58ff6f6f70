#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Centralized MaxWeight controller and naive per-queue baselines
"""

from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

from qsim.core.handler.policy.converge import AgentView
from qsim.core.matching.hungarian import max_weight_matching
from qsim.core.matching.types import Matching
from qsim.core.model.system import Request


class MaxWeightController:
    """Sees every queue; serves a max-weight matching of Q_i * mu_ij each slot"""

    name = 'maxweight'

    def __init__(self, service_rates, cache_size: int = 65536):
        self.service_rates = np.asarray(service_rates, dtype=float)
        self._solve = lru_cache(maxsize=cache_size)(self._solve_uncached)

    def _solve_uncached(self, lengths: Tuple[int, ...]) -> Matching:
        weights = np.asarray(lengths, dtype=float)[:, None] * self.service_rates
        matching, _ = max_weight_matching(weights)
        return matching

    def assign(self, lengths: Sequence[int]) -> Matching:
        return self._solve(tuple(int(q) for q in lengths))

    def requests(self, lengths: Sequence[int]) -> List[Request]:
        matching = self.assign(lengths)
        return [Request(i, j, float(lengths[i]) * self.service_rates[i, j])
                for i, j in enumerate(matching.assignment) if j is not None]


def maxweight_controller(lengths: Sequence[int], service_rates) -> Matching:
    return MaxWeightController(service_rates).assign(lengths)


class FixedAgent:
    """Always requests one configured server, bidding its own backlog"""

    name = 'fixed'

    def __init__(self, agent: int, server: int):
        self.agent = agent
        self.server = server
        self.warnings: List[str] = []

    def act(self, view: AgentView) -> Request:
        return Request(self.agent, self.server, float(view.own_queue_length))

    def observe(self, t: int, served: bool) -> None:
        pass


class UniformRandomAgent:
    """Requests a uniformly random server every slot, bidding its own backlog"""

    name = 'random'

    def __init__(self, agent: int, n_servers: int, rng: np.random.Generator):
        self.agent = agent
        self.n_servers = n_servers
        self.rng = rng
        self.warnings: List[str] = []

    def act(self, view: AgentView) -> Request:
        return Request(self.agent, int(self.rng.integers(self.n_servers)), float(view.own_queue_length))

    def observe(self, t: int, served: bool) -> None:
        pass


def baseline_policy(kind: str, agent: int, n_servers: int, rng: np.random.Generator = None,
                    server: int = None):
    if kind == 'fixed':
        return FixedAgent(agent, agent % n_servers if server is None else server)
    if kind == 'random':
        return UniformRandomAgent(agent, n_servers, rng)
    raise ValueError(f"unknown baseline kind: {kind}")
