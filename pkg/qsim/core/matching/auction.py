#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Centralized ascending-price auction with synchronous bidding rounds
"""

from typing import Tuple

import numpy as np

from qsim.core.matching.types import DualCertificate, Matching, as_weight_matrix
from qsim.core.utils.errors import AuctionDivergenceError

MAX_ROUNDS = 1_000_000


def centralized_auction(w, step_fraction: float, max_rounds: int = MAX_ROUNDS) -> Tuple[Matching, DualCertificate]:
    """
    Every unmatched queue with a positive surplus bids on its best server,
    raising that server's price by step_fraction times its own weight. A
    server keeps the highest bid of the round (lowest queue id on ties) and
    releases its previous holder.
    """
    if not 0.0 < step_fraction < 1.0:
        raise ValueError(f"step_fraction must lie in (0,1), got {step_fraction}")
    w = as_weight_matrix(w)
    n_queues, n_servers = w.shape
    prices = np.zeros(n_servers)
    holder = [None] * n_servers
    assignment = [None] * n_queues

    for _ in range(max_rounds):
        bids = {}
        for i in range(n_queues):
            if assignment[i] is not None or n_servers == 0:
                continue
            surplus = w[i] - prices
            j = int(np.argmax(surplus))
            if surplus[j] <= 0:
                continue
            bid = prices[j] + step_fraction * w[i, j]
            best = bids.get(j)
            if best is None or bid > best[0]:
                bids[j] = (bid, i)

        if not bids:
            return Matching.from_list(assignment), DualCertificate.from_prices(w, prices)

        for j, (bid, i) in bids.items():
            if holder[j] is not None:
                assignment[holder[j]] = None
            holder[j] = i
            assignment[i] = j
            prices[j] = bid

    raise AuctionDivergenceError(f"auction exceeded {max_rounds} rounds")
