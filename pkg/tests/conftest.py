import numpy as np
import pytest

from vplab.radial import make_gaussian


@pytest.fixture(scope="session")
def gaussian():
    return make_gaussian()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
