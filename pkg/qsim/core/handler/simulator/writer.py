#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
CSV emission for run metrics and sweeps
"""

import os
from typing import Dict, List

import pandas as pd

from qsim.core.handler.simulator.engine import MetricsSeries
from qsim.core.handler.simulator.replication import ReplicationSummary

FLOAT_FORMAT = '%.10g'


def _write(frame: pd.DataFrame, path: str) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    return path


def write_metrics(series: MetricsSeries, out_dir: str, prefix: str = '') -> Dict[str, str]:
    """slots.csv and epochs.csv for a single run"""
    return {
        'slots': _write(series.slot_frame(), os.path.join(out_dir, f"{prefix}slots.csv")),
        'epochs': _write(series.epoch_frame(), os.path.join(out_dir, f"{prefix}epochs.csv")),
    }


def write_summary(summary: ReplicationSummary, out_dir: str, prefix: str = '') -> Dict[str, str]:
    """
    Seed-0 style per-slot and per-epoch files for the first replication plus
    the across-seed aggregate
    """
    paths = write_metrics(summary.runs[0], out_dir, prefix)
    paths['aggregate'] = _write(summary.frame, os.path.join(out_dir, f"{prefix}aggregate.csv"))
    return paths


def write_rows(rows: List[Dict], columns: List[str], path: str) -> str:
    return _write(pd.DataFrame(rows, columns=columns), path)
