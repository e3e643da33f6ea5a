import numpy as np
import pytest

from attokit.instances import random_blaschke, random_unimodular, random_vector


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture
def random_product():
    def make(rng, degree, **kw):
        return random_blaschke(rng, degree, **kw)
    return make
