#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Approximate complementary slackness checks for an assignment and its prices
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from qsim.core.matching.hungarian import brute_force_fits, brute_force_matching, max_weight_matching
from qsim.core.matching.types import DualCertificate, Matching, as_weight_matrix

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class ApproxReport:
    value: float
    optimum: float
    ratio: float
    bound: float
    holds: bool


def check_complementary_slackness(matching: Matching, cert: DualCertificate, w, alpha: float,
                                  tol: float = DEFAULT_TOL) -> List[str]:
    """Every violated condition as a readable string; empty means certified"""
    w = as_weight_matrix(w)
    n_queues, n_servers = w.shape
    prices = np.asarray(cert.prices, dtype=float)
    payoffs = np.asarray(cert.payoffs, dtype=float)
    violations = []

    if len(matching) != n_queues or prices.shape != (n_servers,) or payoffs.shape != (n_queues,):
        return [f"dimension mismatch: matching {len(matching)}, prices {prices.shape}, "
                f"payoffs {payoffs.shape}, weights {w.shape}"]
    if not matching.is_valid():
        violations.append(f"not a matching: {matching.assignment}")
    if np.any(prices < -tol) or np.any(payoffs < -tol):
        violations.append("negative dual variable")

    matched = set(matching.matched_servers())
    for j in range(n_servers):
        if j not in matched and abs(prices[j]) > tol:
            violations.append(f"(i) unmatched server {j} has price {prices[j]}")

    for i in range(n_queues):
        best = max(float(np.max(w[i] - prices)) if n_servers else 0.0, 0.0)
        if abs(payoffs[i] - best) > tol:
            violations.append(f"(ii) queue {i} payoff {payoffs[i]} != best surplus {best}")

        j = matching.assignment[i]
        if j is None:
            if abs(payoffs[i]) > tol:
                violations.append(f"(iii) unmatched queue {i} has payoff {payoffs[i]}")
            continue
        if w[i, j] <= 0:
            violations.append(f"(iii) queue {i} matched to server {j} with zero weight")
        elif payoffs[i] + prices[j] > (1.0 + alpha) * w[i, j] + tol:
            violations.append(f"(iii) queue {i}: payoff + price {payoffs[i] + prices[j]} "
                              f"exceeds (1+{alpha})*{w[i, j]}")
    return violations


def slackness_implies_approx(matching: Matching, cert: DualCertificate, w, alpha: float,
                             tol: float = DEFAULT_TOL) -> ApproxReport:
    """Compare the certified matching against the exact optimum"""
    w = as_weight_matrix(w)
    if brute_force_fits(*w.shape):
        _, optimum = brute_force_matching(w)
    else:
        _, optimum = max_weight_matching(w)
    value = matching.value(w)
    ratio = 1.0 if optimum <= 0 else value / optimum
    bound = (1.0 - alpha) * optimum
    return ApproxReport(value=value, optimum=optimum, ratio=ratio, bound=bound, holds=value >= bound - tol)
