"""
qsim - Decentralized Queueing Simulator
"""

__version__ = "0.1.0"
