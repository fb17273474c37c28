import math

import numpy as np
import pytest

from supinf_lab.bubble import BubbleParams, bubble_profile
from supinf_lab.core import uniform_grid
from supinf_lab.curvature import CurvatureProfile
from supinf_lab.emden_fowler import to_ef

LOG2 = math.log(2.0)


def analysis_grid(t_min=-8.0, h=1e-3):
    """``(t_min, t_max, nodes)`` with nodes on ``t_min + j h`` and ``t_max <= -log 2``."""
    count = int(math.floor((-LOG2 - t_min) / h + 1e-9))
    return t_min, t_min + count * h, count + 1


def bubble_ef(n=4, lam=1.0, t_min=-8.0, t_max=None, h=1e-3, r_step=1e-3, offset=0.0):
    """EF profile of an exact bubble about the origin; ``t_max=None`` means the analysis domain."""
    if t_max is None:
        t_min, t_max, nodes = analysis_grid(t_min, h)
    else:
        nodes = int(round((t_max - t_min) / h)) + 1
    r_top = math.exp(t_max)
    prof = bubble_profile(BubbleParams(n, lam, offset), uniform_grid(r_top + 10 * r_step, r_step))
    return to_ef(prof, 0.0, t_min, t_max, nodes, allow_extended=t_max > -LOG2 + 1e-14)


@pytest.fixture
def V8():
    return CurvatureProfile("constant", V0=8.0, a=8.0, b=8.0, radius=100.0)


@pytest.fixture(scope="session")
def w_bubble():
    return bubble_ef()


@pytest.fixture(scope="session")
def w_symmetric():
    return bubble_ef(t_min=-3.0, t_max=3.0, h=1e-3, r_step=1e-3)
