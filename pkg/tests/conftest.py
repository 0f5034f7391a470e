import numpy as np
import pytest

from spinrestore.states import ExcitationState


def random_state(rng: np.random.Generator, dim: int) -> ExcitationState:
    """Random full-rank (0,1)-excitation density matrix."""
    a = rng.normal(size=(dim + 1, dim + 1)) + 1j * rng.normal(size=(dim + 1, dim + 1))
    m = a @ a.conj().T
    return ExcitationState(dim, m / np.trace(m).real)


def random_pure_state(rng: np.random.Generator, dim: int) -> ExcitationState:
    a = rng.normal(size=dim + 1) + 1j * rng.normal(size=dim + 1)
    return ExcitationState.from_pure(a)


@pytest.fixture
def rng():
    return np.random.default_rng(20240824)
