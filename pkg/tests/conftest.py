import numpy as np
import pytest

from sphera.quadrature import sphere_rule


@pytest.fixture(scope="session")
def fine_rule():
    """Product rule fine enough to act as an integration oracle."""
    return sphere_rule(128, 256)


def random_angles(rng, n):
    theta = np.arccos(rng.uniform(-1.0, 1.0, n))
    phi = rng.uniform(0.0, 2.0 * np.pi, n)
    return theta, phi


def max_coeff_diff(a, b, max_degree=None):
    lmax = max_degree if max_degree is not None else min(a.max_degree, b.max_degree)
    return max(abs(a.get(l, m) - b.get(l, m))
               for l in range(lmax + 1) for m in range(-l, l + 1))
