import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from symcone.jordan import SpinFactor, SymMatrix, direct_sum

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

PANEL = [
    SymMatrix(1),
    SymMatrix(2),
    SymMatrix(3),
    SymMatrix(4),
    SpinFactor(2),
    SpinFactor(3),
    SpinFactor(5),
    direct_sum(SymMatrix(2), SpinFactor(3)),
    direct_sum(SymMatrix(3), SpinFactor(4), SymMatrix(1)),
]

algebras = st.sampled_from(PANEL)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rel(a, b):
    return np.linalg.norm(np.asarray(a) - np.asarray(b)) / np.linalg.norm(np.asarray(b))
