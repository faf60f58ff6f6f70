#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Decentralized price-ascent (converge) and commit steps of one agent
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from qsim.core.model.system import NO_REQUEST_BID, Request


@dataclass
class AgentView:
    """Everything an agent may look at; nothing about other agents"""

    own_queue_length: int
    own_request_served: bool
    current_slot: int
    slots_since_join: Optional[int] = None


@dataclass
class ConvergeState:
    """Private auction memory of one agent for the converge phase of one epoch"""

    agent: int
    weights: np.ndarray
    prices: np.ndarray
    event_log: int
    perturbation: float
    phase_start: int
    check_period: int
    step_multiplier: float
    current_target: Optional[int] = None
    current_bid: float = NO_REQUEST_BID
    price_changed: bool = False
    # slot at which (target, bid) last changed
    last_change: int = 0
    served_slots: int = field(default=0)

    @classmethod
    def fresh(cls, agent: int, weights, t0: int, check_period: int, step_multiplier: float,
              perturbation: float) -> "ConvergeState":
        weights = np.asarray(weights, dtype=float)
        return cls(
            agent=agent,
            weights=weights,
            prices=np.zeros_like(weights),
            event_log=t0 - 1,
            perturbation=perturbation,
            phase_start=t0,
            check_period=check_period,
            step_multiplier=step_multiplier,
            last_change=t0,
        )

    def increment(self, server: int) -> float:
        return self.step_multiplier * (1.0 - self.perturbation) * self.weights[server]

    def request(self) -> Request:
        return Request(self.agent, self.current_target, self.current_bid)


def converge_step(state: ConvergeState, t: int, view: Optional[AgentView] = None) -> Request:
    """One slot of price ascent; emits exactly one request"""
    state.price_changed = False
    if t > state.phase_start and t - state.event_log <= state.check_period:
        return state.request()

    previous = (state.current_target, state.current_bid)
    surplus = state.weights - state.prices
    best = int(np.argmax(surplus)) if surplus.size else 0
    if surplus.size and surplus[best] > 0:
        state.prices[best] += state.increment(best)
        state.price_changed = True
        state.current_target = best
        state.current_bid = float(state.prices[best])
    else:
        state.current_target = None
        state.current_bid = NO_REQUEST_BID

    if (state.current_target, state.current_bid) != previous:
        state.last_change = t
    return state.request()


def converge_observe(state: ConvergeState, t: int, served: bool) -> ConvergeState:
    if state.price_changed or served:
        state.event_log = t
    if served:
        state.served_slots += 1
    return state


def commit_step(committed: Tuple[Optional[int], float], t: int, agent: int = 0) -> Request:
    """Repeat the committed (server, bid) for the rest of the epoch"""
    server, bid = committed
    if server is None:
        return Request(agent, None, NO_REQUEST_BID)
    return Request(agent, server, bid)
