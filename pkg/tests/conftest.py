import numpy as np
import pytest

from qsim.core.model.params import EpochParams
from qsim.core.model.system import SystemConfig


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def single_server():
    return SystemConfig.from_lists([0.5], [[1.0]], slackness=1.0, rate_floor=0.5)


@pytest.fixture
def two_by_two():
    """Diagonal-heavy 2x2 instance with plenty of slack"""
    return SystemConfig.from_lists([0.3, 0.3], [[0.9, 0.3], [0.3, 0.9]], slackness=0.5, rate_floor=0.3)


@pytest.fixture
def short_epochs():
    return EpochParams(check_period=3, converge_len=20, epoch_len=50, xi=1e-3, mode='tuned',
                       step_multiplier=0.25)
