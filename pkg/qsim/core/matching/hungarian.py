#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Max-weight bipartite matching: Hungarian method and an exhaustive oracle
"""

import math
from itertools import permutations
from typing import Tuple

import numpy as np

from qsim.core.matching.types import Matching, as_weight_matrix
from qsim.core.utils.errors import MatchingSizeError

BRUTE_FORCE_MAX_SIDE = 8
BRUTE_FORCE_MAX_CANDIDATES = 2_000_000


def _min_cost_assignment(cost: np.ndarray) -> np.ndarray:
    """
    Shortest augmenting path Hungarian method with row/column potentials on
    a square cost matrix. Returns row -> column.
    """
    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    owner = np.zeros(n + 1, dtype=int)     # column -> row, 1-based, 0 = free
    way = np.zeros(n + 1, dtype=int)

    for row in range(1, n + 1):
        owner[0] = row
        col0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[col0] = True
            row0 = owner[col0]
            free = np.flatnonzero(~used[1:]) + 1
            reduced = cost[row0 - 1, free - 1] - u[row0] - v[free]
            better = reduced < minv[free]
            minv[free[better]] = reduced[better]
            way[free[better]] = col0
            col1 = int(free[np.argmin(minv[free])])
            delta = minv[col1]

            used_cols = np.flatnonzero(used)
            u[owner[used_cols]] += delta
            v[used_cols] -= delta
            minv[free] -= delta

            col0 = col1
            if owner[col0] == 0:
                break
        # flip the alternating path
        while col0:
            col1 = way[col0]
            owner[col0] = owner[col1]
            col0 = col1

    assignment = np.zeros(n, dtype=int)
    for col in range(1, n + 1):
        assignment[owner[col] - 1] = col - 1
    return assignment


def max_weight_matching(w) -> Tuple[Matching, float]:
    """Integral optimum of the assignment LP; zero-weight pairs stay unmatched"""
    w = as_weight_matrix(w)
    n_queues, n_servers = w.shape
    if n_queues == 0 or n_servers == 0:
        return Matching.empty(n_queues), 0.0

    size = max(n_queues, n_servers)
    padded = np.zeros((size, size))
    padded[:n_queues, :n_servers] = w
    cost = padded.max() - padded
    rows = _min_cost_assignment(cost)

    assignment = []
    for i in range(n_queues):
        j = int(rows[i])
        assignment.append(j if j < n_servers and w[i, j] > 0 else None)
    matching = Matching.from_list(assignment)
    return matching, matching.value(w)


def brute_force_fits(n_queues: int, n_servers: int) -> bool:
    small, large = min(n_queues, n_servers), max(n_queues, n_servers)
    return small <= BRUTE_FORCE_MAX_SIDE and math.perm(large, small) <= BRUTE_FORCE_MAX_CANDIDATES


def brute_force_matching(w) -> Tuple[Matching, float]:
    """Exact optimum by enumerating injective assignments of the smaller side"""
    w = as_weight_matrix(w)
    n_queues, n_servers = w.shape
    small, large = min(n_queues, n_servers), max(n_queues, n_servers)
    if not brute_force_fits(n_queues, n_servers):
        raise MatchingSizeError(f"brute force refused for a {n_queues}x{n_servers} matrix")
    if small == 0:
        return Matching.empty(n_queues), 0.0

    # nonnegative weights make a full injection of the smaller side optimal
    candidates = np.array(list(permutations(range(large), small)), dtype=int)
    if n_queues <= n_servers:
        values = w[np.arange(n_queues)[None, :], candidates].sum(axis=1)
        best = candidates[int(np.argmax(values))]
        assignment = [int(best[i]) if w[i, best[i]] > 0 else None for i in range(n_queues)]
    else:
        values = w[candidates, np.arange(n_servers)[None, :]].sum(axis=1)
        best = candidates[int(np.argmax(values))]
        assignment = [None] * n_queues
        for j, i in enumerate(best):
            if w[i, j] > 0:
                assignment[int(i)] = j
    matching = Matching.from_list(assignment)
    return matching, matching.value(w)
