import numpy as np
import pytest

from varbatch import make_least_squares


@pytest.fixture
def ls5():
    """1-D least squares with unit features and targets 1..5.

    Component gradients at x are x - 1, ..., x - 5, so the full gradient is
    x - 3 and the component-gradient variance is 2 at every x.
    """
    return make_least_squares(np.ones((5, 1)), np.arange(1.0, 6.0))


@pytest.fixture
def random_ls():
    """Factory for random dense least-squares problems."""

    def build(n, d=2, seed=0):
        rng = np.random.default_rng(seed)
        return make_least_squares(rng.normal(size=(n, d)), rng.normal(size=n))

    return build
