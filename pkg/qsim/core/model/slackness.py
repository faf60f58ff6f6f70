#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Traffic slackness of an instance, decided by a small dense simplex over the
doubly-substochastic service allocations
"""

import math
from typing import Sequence, Tuple

import numpy as np

from qsim.core.model.system import SystemConfig

PIVOT_EPS = 1e-12
FEASIBILITY_TOL = 1e-7
# scaling factor cap used when maximizing; reaching it means "unbounded"
THETA_CAP = 1e6


class UnboundedProgram(Exception):
    pass


def simplex_max(c: np.ndarray, A: np.ndarray, b: np.ndarray, max_pivots: int = 50000) -> Tuple[float, np.ndarray]:
    """
    Maximize c.x subject to A x <= b, x >= 0 with b >= 0.

    The origin is feasible so a single phase suffices. Bland's rule picks the
    entering column by lowest index and breaks ratio ties by lowest basic
    variable, which rules out cycling on the degenerate vertices these
    allocation polytopes are full of.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    if np.any(b < 0):
        raise ValueError("right-hand side must be nonnegative")

    tableau = np.zeros((m + 1, n + m + 1))
    tableau[:m, :n] = A
    tableau[:m, n:n + m] = np.eye(m)
    tableau[:m, -1] = b
    tableau[m, :n] = -c
    basis = list(range(n, n + m))

    for _ in range(max_pivots):
        reduced = tableau[m, :-1]
        candidates = np.flatnonzero(reduced < -PIVOT_EPS)
        if candidates.size == 0:
            break
        col = int(candidates[0])

        column = tableau[:m, col]
        rows = np.flatnonzero(column > PIVOT_EPS)
        if rows.size == 0:
            raise UnboundedProgram("objective is unbounded")
        ratios = tableau[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + PIVOT_EPS]
        row = int(min(tied, key=lambda r: basis[r]))

        tableau[row] /= tableau[row, col]
        for r in range(m + 1):
            if r != row and tableau[r, col] != 0.0:
                tableau[r] -= tableau[r, col] * tableau[row]
        basis[row] = col
    else:
        raise RuntimeError("simplex pivot limit reached")

    x = np.zeros(n + m)
    for r, var in enumerate(basis):
        x[var] = tableau[r, -1]
    return float(tableau[m, -1]), x[:n]


def _scaling_program(arrival_rates: Sequence[float], service: np.ndarray, inflation: float,
                     cap: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    # variables: phi (row-major N*K), then theta
    n_queues, n_servers = service.shape
    n_vars = n_queues * n_servers + 1
    rows = []
    rhs = []

    for i, lam in enumerate(arrival_rates):
        row = np.zeros(n_vars)
        row[i * n_servers:(i + 1) * n_servers] = -service[i]
        row[-1] = (1.0 + inflation) * lam
        rows.append(row)
        rhs.append(0.0)
    for i in range(n_queues):
        row = np.zeros(n_vars)
        row[i * n_servers:(i + 1) * n_servers] = 1.0
        rows.append(row)
        rhs.append(1.0)
    for j in range(n_servers):
        row = np.zeros(n_vars)
        row[j:n_queues * n_servers:n_servers] = 1.0
        rows.append(row)
        rhs.append(1.0)
    cap_row = np.zeros(n_vars)
    cap_row[-1] = 1.0
    rows.append(cap_row)
    rhs.append(cap)

    c = np.zeros(n_vars)
    c[-1] = 1.0
    return c, np.vstack(rows), np.asarray(rhs)


def max_scaling(arrival_rates: Sequence[float], service: np.ndarray, inflation: float = 0.0,
                cap: float = THETA_CAP) -> float:
    """Largest theta <= cap with theta*(1+inflation)*lambda inside the service region"""
    c, A, b = _scaling_program(arrival_rates, np.asarray(service, dtype=float), inflation, cap)
    value, _ = simplex_max(c, A, b)
    return value


def check_slackness(cfg: SystemConfig, epsilon: float, tol: float = FEASIBILITY_TOL) -> bool:
    """True iff (1+epsilon)*lambda is servable in every arrival phase of cfg"""
    if epsilon < 0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    service = cfg.service_matrix()
    for rates in cfg.rate_phases():
        if max_scaling(rates, service, inflation=epsilon, cap=1.0) < 1.0 - tol:
            return False
    return True


def max_slackness(cfg: SystemConfig) -> float:
    """Largest epsilon for which cfg has traffic slackness; inf with no arrivals"""
    service = cfg.service_matrix()
    best = math.inf
    for rates in cfg.rate_phases():
        theta = max_scaling(rates, service, inflation=0.0, cap=THETA_CAP)
        if theta >= THETA_CAP - FEASIBILITY_TOL:
            continue
        best = min(best, theta - 1.0)
    return best
