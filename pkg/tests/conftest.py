import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from metric_bounds import Dataset

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


@st.composite
def sym_matrices(draw, min_d=1, max_d=6, d=None):
    if d is None:
        d = draw(st.integers(min_d, max_d))
    A = draw(arrays(np.float64, (d, d), elements=finite))
    return (A + A.T) / 2.0


@st.composite
def sym_pairs(draw, max_d=6):
    d = draw(st.integers(1, max_d))
    return draw(sym_matrices(d=d)), draw(sym_matrices(d=d))


def random_sym(rng, d, scale=1.0):
    A = rng.normal(scale=scale, size=(d, d))
    return (A + A.T) / 2.0


def random_dataset(rng, n, d, classes=2):
    return Dataset(rng.uniform(0, 1, size=(n, d)), rng.integers(0, classes, size=n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
