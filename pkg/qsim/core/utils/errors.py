#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Exception types shared across qsim
"""


class QsimError(Exception):
    """Base class for every error qsim raises on purpose"""


class ConfigError(QsimError, ValueError):
    """Invalid system config, schedule, instance or policy selection"""


class ParamsError(QsimError, ValueError):
    """Epoch parameters cannot be derived from the given inputs"""


class MatchingSizeError(QsimError, ValueError):
    """Instance too large for exhaustive matching enumeration"""


class AuctionDivergenceError(QsimError, RuntimeError):
    """Centralized auction exceeded its iteration cap"""
