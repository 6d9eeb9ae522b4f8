import numpy as np
import pytest

# Weight-decay / momentum grid used across suites; every pair satisfies
# beta < alpha.
ALPHA_BETA_GRID = [
    (1.0, 0.0),
    (1.0, 0.5),
    (1.0, 0.9),
    (0.999, 0.0),
    (0.999, 0.5),
    (0.999, 0.9),
    (0.99, 0.0),
    (0.99, 0.5),
    (0.99, 0.9),
]

# The three optimizer settings the error-comparison figures use.
FIGURE_SETTINGS = [(1.0, 0.0), (1.0, 0.9), (0.999, 0.0)]


def dense_ltt(coeffs, n):
    """Dense lower-triangular Toeplitz matrix from first-column coefficients.

    Test oracle only; keep n small.
    """
    c = np.zeros(n)
    c[: min(len(coeffs), n)] = np.asarray(coeffs, dtype=float)[:n]
    m = np.zeros((n, n))
    for j in range(n):
        m[j:, j] = c[: n - j]
    return m


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
