import numpy as np
import pytest

from starres.quantum import TwoQubitFano, fano_positivity


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_bell_diagonal(rng, scale=1.0):
    """t-vector uniform in the Bell-state tetrahedron (rejection)."""
    while True:
        t = rng.uniform(-1.0, 1.0, size=3) * scale
        signs = np.array([[-1, -1, -1], [-1, 1, 1], [1, -1, 1], [1, 1, -1]], dtype=float)
        if np.all(1.0 + signs @ t >= 0.0):
            return t


def random_diagonal_state(rng, scale=0.6):
    """Positive two-qubit state with diagonal correlation matrix."""
    while True:
        s = TwoQubitFano(
            x=rng.uniform(-1, 1, 3) * scale,
            y=rng.uniform(-1, 1, 3) * scale,
            T=np.diag(rng.uniform(-1, 1, 3) * scale),
        )
        if fano_positivity(s):
            return s
