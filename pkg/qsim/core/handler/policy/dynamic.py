#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Lifecycle wrapper for queues that join and leave during a run
"""

import math

from qsim.core.handler.policy.converge import AgentView
from qsim.core.model.system import NO_REQUEST_BID, Request


def activation_slot(join_slot: int, epoch_len: int) -> int:
    """First epoch boundary at or after join_slot"""
    return math.ceil((join_slot - 1) / epoch_len) * epoch_len + 1


class DynamicAgent:
    """
    Keeps a learning agent silent until the first epoch boundary after it
    joined and drops it once its queue leaves. The wrapped agent is built
    with join_slot so its confidence clock starts at the join.
    """

    def __init__(self, inner, join_slot: int, leave_slot: float, epoch_len: int):
        if leave_slot < join_slot:
            raise ValueError(f"leave slot {leave_slot} precedes join slot {join_slot}")
        self.inner = inner
        self.agent = inner.agent
        self.join_slot = join_slot
        self.leave_slot = leave_slot
        self.start_slot = activation_slot(join_slot, epoch_len)
        self.warnings = inner.warnings

    @property
    def name(self) -> str:
        return f"dyn-{self.inner.name}"

    def running(self, t: int) -> bool:
        return self.start_slot <= t <= self.leave_slot

    def act(self, view: AgentView) -> Request:
        if not self.running(view.current_slot):
            return Request(self.agent, None, NO_REQUEST_BID)
        return self.inner.act(view)

    def observe(self, t: int, served: bool) -> None:
        if self.running(t):
            self.inner.observe(t, served)

    def __getattr__(self, item):
        # expose wrapped agent diagnostics (converge, plan, estimator, ...)
        if item == "inner":
            raise AttributeError(item)
        return getattr(self.inner, item)


def dynamic_wrap(inner, join_slot: int, leave_slot: float, epoch_len: int) -> DynamicAgent:
    return DynamicAgent(inner, join_slot, leave_slot, epoch_len)
