import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240809)


def random_problems(count, n_range, d_range, seed, nonzero_residual=False):
    """Random regression instances (X, y) with n > d."""
    gen = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(gen.integers(*n_range))
        d = int(gen.integers(*d_range))
        if n <= d:
            continue
        x = gen.standard_normal((n, d))
        y = gen.standard_normal(n)
        out.append((x, y))
    return out
