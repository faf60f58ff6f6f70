#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Decentralized auction agents: known rates, forced exploration and UCB
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from qsim.core.cli.cli import print_status
from qsim.core.handler.policy.converge import (AgentView, ConvergeState, commit_step,
                                               converge_observe, converge_step)
from qsim.core.handler.policy.estimator import (EstimatorState, dam_update, exploration_probability,
                                                forced_exploration_rates, ucb_rates)
from qsim.core.model.params import EpochParams
from qsim.core.model.system import NO_REQUEST_BID, Request

PERTURBATION_MAX = 1e-9
CONVERGE = 'converge'
COMMIT = 'commit'


def draw_perturbation(rng: np.random.Generator) -> float:
    """Uniform draw from the open interval (0, 1e-9)"""
    eta = 0.0
    while eta == 0.0:
        eta = float(rng.uniform(0.0, PERTURBATION_MAX))
    return eta


@dataclass
class EpochSchedule:
    """Where an agent stands in the global epoch grid"""

    params: EpochParams
    epoch_index: int = 0
    phase: str = CONVERGE
    committed: Tuple[Optional[int], float] = (None, NO_REQUEST_BID)

    @property
    def start(self) -> int:
        return self.params.epoch_start(self.epoch_index)

    @property
    def last_slot(self) -> int:
        return self.start + self.params.epoch_len - 1

    def phase_at(self, t: int) -> str:
        return CONVERGE if t - self.start < self.params.converge_len else COMMIT


@dataclass
class EpochPlan:
    """What an agent does for one epoch: explore a server, or auction with rates"""

    explore: bool
    server: Optional[int] = None
    bid: float = NO_REQUEST_BID
    rates: Optional[np.ndarray] = None


def dam_k_epoch_init(view: AgentView, params: EpochParams, true_rates: Sequence[float],
                     agent: int = 0, perturbation: float = 0.0) -> ConvergeState:
    """Fresh auction state with weights rate * Q(t0); prices start at zero"""
    t0 = params.epoch_start(params.epoch_of(view.current_slot))
    weights = np.asarray(true_rates, dtype=float) * view.own_queue_length
    return ConvergeState.fresh(agent, weights, t0, params.check_period, params.step_multiplier, perturbation)


def dam_fe_epoch(sched: EpochSchedule, est: EstimatorState, rng: np.random.Generator, gamma: float,
                 n_servers: int, epochs_since_join: int, clock: int, perturbation: float) -> EpochPlan:
    """Explore w.p. min(1, K/l^gamma) with a dominating bid, else exploit optimistic rates"""
    if rng.random() < exploration_probability(n_servers, epochs_since_join, gamma):
        server = int(rng.integers(n_servers))
        bid = (sched.start + sched.params.epoch_len + 1) * (1.0 + perturbation)
        return EpochPlan(explore=True, server=server, bid=bid)
    return EpochPlan(explore=False, rates=forced_exploration_rates(est, clock))


def dam_ucb_epoch(sched: EpochSchedule, est: EstimatorState, rate_floor: float, n_servers: int,
                  clock: int) -> EpochPlan:
    return EpochPlan(explore=False, rates=ucb_rates(est, clock, n_servers, rate_floor))


class EpochAgent:
    """Epoch bookkeeping shared by every auction agent"""

    name = 'dam'

    def __init__(self, agent: int, n_servers: int, params: EpochParams, rng: np.random.Generator,
                 join_slot: int = 1, verbose: int = 0):
        self.agent = agent
        self.n_servers = n_servers
        self.params = params
        self.rng = rng
        self.join_slot = join_slot
        self.verbose = verbose
        self.perturbation = draw_perturbation(rng)
        self.warnings: List[str] = []

        self.schedule = EpochSchedule(params)
        self.epochs_run = 0
        self.converge: Optional[ConvergeState] = None
        self.plan = EpochPlan(explore=False)
        self._window: List[int] = []
        self._last_request: Optional[Request] = None

    @property
    def exploring(self) -> bool:
        return self.plan.explore

    def local_clock(self) -> int:
        """Epoch start measured from the slot this agent joined"""
        return self.schedule.start - self.join_slot + 1

    def _plan_epoch(self) -> EpochPlan:
        raise NotImplementedError

    def _harvest_commit(self) -> bool:
        return False

    def _fold_samples(self, samples: Sequence[int], server: int) -> None:
        pass

    def _start_epoch(self, view: AgentView) -> None:
        self.schedule.epoch_index = self.params.epoch_of(view.current_slot)
        self.schedule.phase = CONVERGE
        self.schedule.committed = (None, NO_REQUEST_BID)
        self.epochs_run += 1
        self._window = []

        self.plan = self._plan_epoch()
        if self.plan.explore:
            self.converge = None
            return
        self.converge = dam_k_epoch_init(view, self.params, self.plan.rates, self.agent, self.perturbation)

    def _commit(self) -> None:
        self.schedule.phase = COMMIT
        self.schedule.committed = (self.converge.current_target, self.converge.current_bid)
        server, bid = self.schedule.committed
        ceiling = self.schedule.start + self.params.epoch_len + 1
        if server is not None and bid >= ceiling:
            message = (f"agent {self.agent}: exploit bid {bid:.3f} reaches the exploration bid "
                       f"floor {ceiling} in epoch starting at {self.schedule.start}")
            self.warnings.append(message)
            if self.verbose >= 1:
                print_status(message, "warning")

    def act(self, view: AgentView) -> Request:
        t = view.current_slot
        if self.params.epoch_of(t) != self.schedule.epoch_index:
            self._start_epoch(view)

        if self.plan.explore:
            request = Request(self.agent, self.plan.server, self.plan.bid)
        elif self.schedule.phase_at(t) == CONVERGE:
            request = converge_step(self.converge, t, view)
        else:
            if self.schedule.phase != COMMIT:
                self._commit()
            request = commit_step(self.schedule.committed, t, self.agent)
        self._last_request = request
        return request

    def observe(self, t: int, served: bool) -> None:
        if self._last_request is None:
            return
        if self.plan.explore:
            self._window.append(int(served))
        elif self.schedule.phase_at(t) == CONVERGE:
            converge_observe(self.converge, t, served)
        elif self._harvest_commit() and self.schedule.committed[0] is not None:
            self._window.append(int(served))

        if t == self.schedule.last_slot:
            self._end_epoch()

    def _end_epoch(self) -> None:
        server = self.plan.server if self.plan.explore else self.schedule.committed[0]
        if server is not None and self._window:
            self._fold_samples(self._window, server)
        self._window = []


class DamKAgent(EpochAgent):
    """Auction agent that knows its own service rates"""

    name = 'dam-k'

    def __init__(self, agent: int, service_rates: Sequence[float], params: EpochParams,
                 rng: np.random.Generator, join_slot: int = 1, verbose: int = 0):
        super().__init__(agent, len(service_rates), params, rng, join_slot, verbose)
        self.service_rates = np.asarray(service_rates, dtype=float)

    def _plan_epoch(self) -> EpochPlan:
        return EpochPlan(explore=False, rates=self.service_rates)


class _LearningAgent(EpochAgent):

    def __init__(self, agent: int, n_servers: int, params: EpochParams, rng: np.random.Generator,
                 join_slot: int = 1, verbose: int = 0):
        super().__init__(agent, n_servers, params, rng, join_slot, verbose)
        self.estimator = EstimatorState.empty(n_servers)

    def _fold_samples(self, samples: Sequence[int], server: int) -> None:
        dam_update(samples, self.estimator, server)


class DamFEAgent(_LearningAgent):
    """Forced exploration: random high-bid epochs interleaved with optimistic auctions"""

    name = 'dam-fe'

    def __init__(self, agent: int, n_servers: int, params: EpochParams, rng: np.random.Generator,
                 gamma: float = 0.8, harvest_commit: bool = True, join_slot: int = 1, verbose: int = 0):
        super().__init__(agent, n_servers, params, rng, join_slot, verbose)
        self.gamma = gamma
        self.harvest_commit = harvest_commit
        self.explored_epochs = 0

    def _harvest_commit(self) -> bool:
        return self.harvest_commit

    def _plan_epoch(self) -> EpochPlan:
        plan = dam_fe_epoch(self.schedule, self.estimator, self.rng, self.gamma, self.n_servers,
                            self.epochs_run, self.local_clock(), self.perturbation)
        if plan.explore:
            self.explored_epochs += 1
        return plan


class DamUCBAgent(_LearningAgent):
    """Optimistic auction weights, no dedicated exploration epochs"""

    name = 'dam-ucb'

    def __init__(self, agent: int, n_servers: int, params: EpochParams, rng: np.random.Generator,
                 rate_floor: float, join_slot: int = 1, verbose: int = 0):
        super().__init__(agent, n_servers, params, rng, join_slot, verbose)
        self.rate_floor = rate_floor

    def _harvest_commit(self) -> bool:
        return True

    def _plan_epoch(self) -> EpochPlan:
        return dam_ucb_epoch(self.schedule, self.estimator, self.rate_floor, self.n_servers, self.local_clock())
