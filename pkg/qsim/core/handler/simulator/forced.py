#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
One converge phase of decentralized agents on a fixed weight matrix with
every selected request succeeding
"""

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from qsim.core.handler.policy.converge import ConvergeState, converge_observe, converge_step
from qsim.core.handler.policy.dam import draw_perturbation
from qsim.core.matching.types import DualCertificate, Matching, as_weight_matrix
from qsim.core.model.params import log_term
from qsim.core.model.system import Request, resolve_server
from qsim.core.utils.rng import agent_stream


@dataclass
class ForcedConvergeResult:
    matching: Matching
    certificate: DualCertificate
    converge_slot: Optional[int]
    slots_run: int
    stable: bool
    prices: np.ndarray


def converge_bound(n_queues: int, n_servers: int, check_period: int, epsilon: float,
                   log_base: str = 'e') -> int:
    """Slot budget within which a converge phase settles under forced service"""
    log_n = log_term(n_queues, log_base)
    return int(math.ceil(99.0 * n_servers * check_period * (log_n + n_servers) / epsilon))


def _profile(requests: List[Request]) -> Tuple[Tuple[Optional[int], float], ...]:
    return tuple((r.target, r.bid) for r in requests)


def _settled(requests: List[Request]) -> bool:
    targets = [r.target for r in requests if r.target is not None]
    return len(targets) == len(set(targets))


def run_forced_converge(weights, check_period: int, step_multiplier: float, max_slots: int = 1_000_000,
                        seed: int = 0) -> ForcedConvergeResult:
    """
    Runs every row of `weights` as an agent from slot 1 until each server
    receives at most one request, then check_period + 1 further slots to
    confirm the request profile no longer moves.
    """
    w = as_weight_matrix(weights)
    n_queues, n_servers = w.shape
    states = [ConvergeState.fresh(i, w[i], 1, check_period, step_multiplier,
                                  draw_perturbation(agent_stream(seed, i)))
              for i in range(n_queues)]

    converge_slot = None
    settled_profile = None
    stable = False
    t = 0
    requests: List[Request] = []
    while t < max_slots:
        t += 1
        requests = [converge_step(state, t) for state in states]
        by_server: Dict[int, List[Request]] = defaultdict(list)
        for req in requests:
            if req.target is not None:
                by_server[req.target].append(req)
        served = [False] * n_queues
        for server, reqs in by_server.items():
            winner = resolve_server(reqs)
            served[winner] = w[winner, server] > 0
        for state, ok in zip(states, served):
            converge_observe(state, t, ok)

        profile = _profile(requests)
        if not _settled(requests):
            converge_slot, settled_profile = None, None
        elif profile != settled_profile:
            converge_slot, settled_profile = t, profile
        elif t >= converge_slot + check_period + 1:
            stable = True
            break

    assignment = [r.target for r in requests]
    prices = np.zeros(n_servers)
    for req in requests:
        if req.target is not None:
            prices[req.target] = max(prices[req.target], states[req.agent].prices[req.target])
    return ForcedConvergeResult(
        matching=Matching.from_list(assignment),
        certificate=DualCertificate.from_prices(w, prices),
        converge_slot=converge_slot,
        slots_run=t,
        stable=stable,
        prices=np.vstack([s.prices for s in states]) if states else np.zeros((0, n_servers)),
    )
