import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'src'))

from twocrystal_opo.utils.config import parse_config  # noqa: E402

MINIMAL_RUN = """
[cavity]
kappa = 0.01
g = 0.001

[drive]
sigma = 1
"""


@pytest.fixture
def omega_grid():
    """200 log-spaced analysis frequencies on [0.01, 100]."""
    return np.logspace(-2, 2, 200)


@pytest.fixture
def minimal_text():
    return MINIMAL_RUN


@pytest.fixture
def minimal_config():
    return parse_config(MINIMAL_RUN)


@pytest.fixture
def small_sweep_config(tmp_path):
    return parse_config(MINIMAL_RUN + f"""
[sweep]
omega_min = 0.1
omega_max = 10
omega_points = 21
sigma_list = 1, 1.5
c_list = 0, 1

[output]
path = {tmp_path / 'sweep.csv'}
""")
