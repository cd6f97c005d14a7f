import numpy as np
import pytest

from mvcoreset.core import Dataset


def make_missing_instance(rng, n, d, j, scale=10.0):
    """Random dataset with at most j missing coordinates per point."""
    assert j <= d - 1
    values = rng.normal(0.0, scale, size=(n, d))
    for row in range(n):
        n_miss = rng.integers(0, j + 1)
        if n_miss:
            cols = rng.choice(d, size=n_miss, replace=False)
            values[row, cols] = np.nan
    return Dataset(values)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
