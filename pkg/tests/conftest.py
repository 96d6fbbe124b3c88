"""Shared fixtures: small hand-checkable systems used across the suite."""

import numpy as np
import pytest

from quadisrk import StateSpaceModel


@pytest.fixture
def scalar_model():
    """H(s) = 1/(s+1)."""
    return StateSpaceModel(E=[[1.0]], A=[[-1.0]], B=[1.0], C=[1.0])


@pytest.fixture
def scaled_scalar_model():
    """H(s) = 1/(2s+1): E=2, A=-1."""
    return StateSpaceModel(E=[[2.0]], A=[[-1.0]], B=[1.0], C=[1.0])


@pytest.fixture
def diag2_model():
    """H(s) = 1/(s+1) + 1/(s+2)."""
    return StateSpaceModel(
        E=np.eye(2), A=np.diag([-1.0, -2.0]), B=[1.0, 1.0], C=[1.0, 1.0]
    )


def random_stable_model(n, seed, abscissa=-0.05):
    """Seeded dense stable test model with a mildly perturbed E."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    E = np.eye(n) + 0.1 * rng.standard_normal((n, n)) / np.sqrt(n)
    shift = np.max(np.linalg.eigvals(np.linalg.solve(E, A)).real)
    A = A - (shift - abscissa) * E
    B = rng.standard_normal(n)
    C = rng.standard_normal(n)
    return StateSpaceModel(E=E, A=A, B=B, C=C)
