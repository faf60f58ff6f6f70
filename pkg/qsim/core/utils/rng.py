#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Seeded random streams derived from one master seed

Every consumer (environment, each agent incarnation, schedule generator) gets
its own numpy Generator keyed by a fixed spawn key, so no two components ever
share a stream and a run replays bit-for-bit from the master seed.
"""

import numpy as np

ENVIRONMENT_KEY = 0
AGENT_KEY = 1
SCHEDULE_KEY = 2


def derive_stream(master_seed: int, *keys: int) -> np.random.Generator:
    """Return the Generator for (master_seed, keys)"""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.default_rng(seq)


def environment_stream(master_seed: int) -> np.random.Generator:
    return derive_stream(master_seed, ENVIRONMENT_KEY)


def agent_stream(master_seed: int, queue: int, incarnation: int = 0) -> np.random.Generator:
    return derive_stream(master_seed, AGENT_KEY, queue, incarnation)


def schedule_stream(master_seed: int) -> np.random.Generator:
    return derive_stream(master_seed, SCHEDULE_KEY)


