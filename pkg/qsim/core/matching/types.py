#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Assignment and dual certificate value types
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np


def as_weight_matrix(w) -> np.ndarray:
    """Coerce w to a finite, nonnegative 2-D float array"""
    arr = np.asarray(w, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"weight matrix must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("weight matrix has non-finite entries")
    if np.any(arr < 0):
        raise ValueError("weight matrix has negative entries")
    return arr


@dataclass(frozen=True)
class Matching:
    """Per-queue server assignment, None for unmatched"""

    assignment: Tuple[Optional[int], ...]

    @classmethod
    def empty(cls, n_queues: int) -> "Matching":
        return cls(tuple([None] * n_queues))

    @classmethod
    def from_list(cls, assignment: Sequence[Optional[int]]) -> "Matching":
        return cls(tuple(None if j is None else int(j) for j in assignment))

    def is_valid(self) -> bool:
        used = [j for j in self.assignment if j is not None]
        return len(used) == len(set(used))

    def matched_servers(self) -> List[int]:
        return [j for j in self.assignment if j is not None]

    def value(self, w) -> float:
        w = np.asarray(w, dtype=float)
        return float(sum(w[i, j] for i, j in enumerate(self.assignment) if j is not None))

    def __len__(self) -> int:
        return len(self.assignment)


@dataclass(frozen=True)
class DualCertificate:
    prices: Tuple[float, ...]
    payoffs: Tuple[float, ...]

    @classmethod
    def from_prices(cls, w, prices: Sequence[float]) -> "DualCertificate":
        """Certificate whose payoffs are the best nonnegative surplus at the given prices"""
        w = np.asarray(w, dtype=float)
        p = np.asarray(prices, dtype=float)
        if w.shape[1] == 0:
            payoffs = np.zeros(w.shape[0])
        else:
            payoffs = np.maximum((w - p[None, :]).max(axis=1), 0.0)
        return cls(tuple(float(x) for x in p), tuple(float(x) for x in payoffs))
