#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Policy selection: names, hyperparameters and agent construction
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from qsim.core.handler.policy.baseline import MaxWeightController, baseline_policy
from qsim.core.handler.policy.dam import DamFEAgent, DamKAgent, DamUCBAgent
from qsim.core.handler.policy.dynamic import dynamic_wrap
from qsim.core.model.params import MODES, TUNED, EpochParams, compute_params
from qsim.core.model.system import SystemConfig
from qsim.core.utils.errors import ConfigError
from qsim.core.utils.rng import agent_stream

POLICY_KINDS = ('dam-k', 'dam-fe', 'dam-ucb', 'dyn-dam-ucb', 'dyn-dam-fe', 'maxweight', 'fixed', 'random')
EPOCH_KINDS = ('dam-k', 'dam-fe', 'dam-ucb', 'dyn-dam-ucb', 'dyn-dam-fe')


@dataclass(frozen=True)
class PolicySpec:
    """Policy kind plus the hyperparameters it reads"""

    kind: str = 'dam-k'
    mode: str = TUNED
    gamma: float = 0.8
    harvest_commit: bool = True
    log_base: str = 'e'
    fixed_servers: Optional[Tuple[int, ...]] = None
    # explicit epoch layout; computed from the instance when absent
    params: Optional[EpochParams] = None

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ConfigError(f"unknown policy '{self.kind}', expected one of {', '.join(POLICY_KINDS)}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown parameter mode '{self.mode}', expected one of {', '.join(MODES)}")

    @property
    def uses_epochs(self) -> bool:
        return self.kind in EPOCH_KINDS

    @property
    def centralized(self) -> bool:
        return self.kind == 'maxweight'

    @property
    def base_kind(self) -> str:
        return self.kind[len('dyn-'):] if self.kind.startswith('dyn-') else self.kind

    def epoch_params(self, cfg: SystemConfig) -> Optional[EpochParams]:
        if not self.uses_epochs:
            return None
        if self.params is not None:
            return self.params
        return compute_params(cfg.slackness, cfg.rate_floor, cfg.n_queues, cfg.n_servers,
                              mode=self.mode, log_base=self.log_base)


def build_controller(policy: PolicySpec, cfg: SystemConfig) -> MaxWeightController:
    return MaxWeightController(cfg.service_rates)


def build_agent(policy: PolicySpec, cfg: SystemConfig, params: Optional[EpochParams], row: int,
                master_seed: int, incarnation: int = 0, join_slot: int = 1,
                leave_slot: float = math.inf, verbose: int = 0):
    """One agent for config row `row`; every incarnation draws from its own stream"""
    rng = agent_stream(master_seed, row, incarnation)
    kind = policy.base_kind

    if kind in ('fixed', 'random'):
        servers = policy.fixed_servers
        return baseline_policy(kind, row, cfg.n_servers, rng, servers[row] if servers is not None else None)

    if kind == 'dam-k':
        agent = DamKAgent(row, cfg.service_rates[row], params, rng, join_slot, verbose)
    elif kind == 'dam-fe':
        agent = DamFEAgent(row, cfg.n_servers, params, rng, policy.gamma, policy.harvest_commit,
                           join_slot, verbose)
    elif kind == 'dam-ucb':
        agent = DamUCBAgent(row, cfg.n_servers, params, rng, cfg.rate_floor, join_slot, verbose)
    else:
        raise ConfigError(f"policy '{policy.kind}' has no per-queue agent")

    if join_slot > 1 or leave_slot != math.inf:
        return dynamic_wrap(agent, join_slot, leave_slot, params.epoch_len)
    return agent
