#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Seeded replications of one simulation and their pointwise aggregate
"""

import asyncio
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List

import numpy as np
import pandas as pd

from qsim.core.handler.simulator.engine import MetricsSeries, SimulationSpec, run


@dataclass
class ReplicationSummary:
    """Per-slot mean and standard error across seeds, plus the raw runs"""

    frame: pd.DataFrame
    runs: List[MetricsSeries]
    seeds: List[int]

    @property
    def n_seeds(self) -> int:
        return len(self.runs)

    def final_average(self, column: str = 'weighted_sum') -> float:
        """Time-averaged value over the whole horizon, averaged over seeds"""
        return float(np.mean([r.time_average(column=column) for r in self.runs]))

    def window_average(self, start: int, end: int, column: str = 'weighted_sum') -> float:
        return float(np.mean([r.time_average(start, end, column) for r in self.runs]))


def aggregate(runs: List[MetricsSeries], seeds: List[int]) -> ReplicationSummary:
    frame = pd.DataFrame({'slot': np.arange(1, runs[0].horizon + 1, dtype=np.int64)})
    for column in ('weighted_sum', 'total_queue'):
        table = pd.DataFrame({seed: getattr(r, column) for seed, r in zip(seeds, runs)})
        frame[f"{column}_mean"] = table.mean(axis=1)
        if len(runs) > 1:
            frame[f"{column}_stderr"] = table.std(axis=1, ddof=1) / np.sqrt(len(runs))
        else:
            frame[f"{column}_stderr"] = 0.0
    return ReplicationSummary(frame=frame, runs=runs, seeds=seeds)


def replication_seeds(spec: SimulationSpec, n_seeds: int) -> List[int]:
    if n_seeds < 1:
        raise ValueError(f"n_seeds must be >= 1, got {n_seeds}")
    return [spec.master_seed + k for k in range(n_seeds)]


async def run_replications_async(spec: SimulationSpec, n_seeds: int, concurrency: int = 4) -> ReplicationSummary:
    """Runs seeds in worker processes, at most `concurrency` at a time"""
    seeds = replication_seeds(spec, n_seeds)
    loop = asyncio.get_running_loop()
    semaphore = asyncio.Semaphore(concurrency)

    with ProcessPoolExecutor(max_workers=concurrency) as pool:
        async def run_seed(seed: int) -> MetricsSeries:
            async with semaphore:
                return await loop.run_in_executor(pool, run, spec.with_seed(seed))

        runs = await asyncio.gather(*(run_seed(seed) for seed in seeds))
    return aggregate(list(runs), seeds)


def run_replications(spec: SimulationSpec, n_seeds: int, concurrency: int = 1) -> ReplicationSummary:
    seeds = replication_seeds(spec, n_seeds)
    if concurrency > 1 and n_seeds > 1:
        return asyncio.run(run_replications_async(spec, n_seeds, concurrency))
    return aggregate([run(spec.with_seed(seed)) for seed in seeds], seeds)
