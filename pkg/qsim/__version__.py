#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Version information for qsim"""

__version__ = "0.1.0"
