import numpy as np
import pytest

from gmic import Sample, rank_transform


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def ranked(xs, ys):
    return rank_transform(Sample(xs, ys))
