import numpy as np
import pytest

from riskbench import PointSet, make_rng

from helpers import random_in_ball


@pytest.fixture
def rng():
    return make_rng(20240901)


@pytest.fixture
def ball_points(rng):
    def make(n, d, radius=1.0, name=""):
        return PointSet(random_in_ball(rng, n, d, radius), name=name)
    return make
