import numpy as np
import pytest
import scipy.linalg

from spinrestore.chain import (
    ConfigurationError,
    Layout,
    build_couplings,
    propagator,
    single_excitation_hamiltonian,
)
from spinrestore.control import apply_transform
from spinrestore.states import embed_computational, from_computational

from conftest import random_state


def test_layout_validation():
    Layout(N=10, N_S=2, N_R=2, N_ER=3)
    with pytest.raises(ConfigurationError):
        Layout(N=10, N_S=2, N_R=3, N_ER=4)  # sender/receiver mismatch
    with pytest.raises(ConfigurationError):
        Layout(N=10, N_S=3, N_R=3, N_ER=2)  # N_ER < N_R
    with pytest.raises(ConfigurationError, match="controllability bound"):
        Layout(N=10, N_S=3, N_R=3, N_ER=3)  # 6 <= 12
    with pytest.raises(ConfigurationError):
        Layout(N=1, N_S=1, N_R=1, N_ER=1)


def test_couplings_inverse_cube():
    lay = Layout(N=4, N_S=1, N_R=1, N_ER=2)
    D = build_couplings(lay)
    assert D[0, 1] == 1.0
    assert D[0, 2] == pytest.approx(1 / 8)
    assert D[0, 3] == pytest.approx(1 / 27)
    np.testing.assert_array_equal(D, D.T)
    assert np.all(np.diag(D) == 0)


def test_couplings_n2():
    lay = Layout(N=2, N_S=1, N_R=1, N_ER=1)
    np.testing.assert_array_equal(build_couplings(lay), [[0.0, 1.0], [1.0, 0.0]])


def _pauli_ops(N):
    sx = np.array([[0, 1], [1, 0]], dtype=complex) / 2
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex) / 2

    def site(op, k):
        m = np.eye(1)
        for q in range(N):
            m = np.kron(m, op if q == k else np.eye(2))
        return m

    return sx, sy, site


def full_space_hamiltonian(D):
    """Brute-force 2^N Hamiltonian from the spin operators, all pairs."""
    N = D.shape[0]
    sx, sy, site = _pauli_ops(N)
    H = np.zeros((2**N, 2**N), dtype=complex)
    for i in range(N):
        for j in range(i + 1, N):
            H += D[i, j] * (site(sx, i) @ site(sx, j) + site(sy, i) @ site(sy, j))
    return H


@pytest.mark.parametrize("N", [2, 3])
def test_h1_matches_full_space_block(N):
    lay = Layout(N=N, N_S=1, N_R=1, N_ER=min(2, N - 1))
    D = build_couplings(lay)
    H1 = single_excitation_hamiltonian(D)
    H = full_space_hamiltonian(D)
    idx = [1 << (N - k) for k in range(1, N + 1)]
    np.testing.assert_allclose(H[np.ix_(idx, idx)], H1, atol=1e-14)
    # vacuum block is the scalar 0
    assert abs(H[0, 0]) < 1e-14
    assert np.all(np.diag(H1) == 0)


def test_h1_known_entries():
    lay = Layout(N=3, N_S=1, N_R=1, N_ER=2)
    H1 = single_excitation_hamiltonian(build_couplings(lay))
    assert H1[0, 1] == pytest.approx(0.5)
    assert H1[0, 2] == pytest.approx(1 / 16)


def test_propagator_tau0_identity():
    lay = Layout(N=5, N_S=1, N_R=1, N_ER=2)
    H1 = single_excitation_hamiltonian(build_couplings(lay))
    np.testing.assert_allclose(propagator(H1, 0.0).V1, np.eye(5), atol=1e-14)


def test_propagator_n2_full_transfer():
    H1 = np.array([[0.0, 0.5], [0.5, 0.0]])
    V1 = propagator(H1, np.pi).V1
    assert abs(V1[0, 1]) == pytest.approx(1.0)
    # closed form: cos(tau/2) I - i sin(tau/2) * swap
    tau = 1.7
    V = propagator(H1, tau).V1
    expect = np.cos(tau / 2) * np.eye(2) - 1j * np.sin(tau / 2) * np.array([[0, 1], [1, 0]])
    np.testing.assert_allclose(V, expect, atol=1e-12)


def test_propagator_group_property(rng):
    lay = Layout(N=6, N_S=1, N_R=1, N_ER=2)
    H1 = single_excitation_hamiltonian(build_couplings(lay))
    for tau in rng.uniform(0, 30, 5):
        V = propagator(H1, tau).V1
        Vm = propagator(H1, -tau).V1
        np.testing.assert_allclose(V @ Vm, np.eye(6), atol=1e-12)
        np.testing.assert_allclose(V @ V.conj().T, np.eye(6), atol=1e-12)


def test_propagator_matches_scaling_squaring(rng):
    lay = Layout(N=8, N_S=1, N_R=1, N_ER=2)
    H1 = single_excitation_hamiltonian(build_couplings(lay))
    for tau in rng.uniform(0, 50, 5):
        V = propagator(H1, tau).V1
        oracle = scipy.linalg.expm(-1j * H1 * tau)
        assert np.max(np.abs(V - oracle)) < 1e-10


@pytest.mark.parametrize("N", [3, 4, 5])
def test_sector_evolution_matches_full_space(N, rng):
    """(0,1)-sector evolution against the brute-force 2^N propagator."""
    lay = Layout(N=N, N_S=1, N_R=1, N_ER=2)
    D = build_couplings(lay)
    H1 = single_excitation_hamiltonian(D)
    H = full_space_hamiltonian(D)
    for tau in [0.9, 4.2, 11.0]:
        Vfull = scipy.linalg.expm(-1j * H * tau)
        s = random_state(rng, N)
        sector = apply_transform(s, propagator(H1, tau).V1)
        brute = Vfull @ embed_computational(s, N) @ Vfull.conj().T
        np.testing.assert_allclose(
            from_computational(brute, N).matrix, sector.matrix, atol=1e-10)


def test_excitation_probability_conserved(rng):
    lay = Layout(N=6, N_S=1, N_R=1, N_ER=2)
    H1 = single_excitation_hamiltonian(build_couplings(lay))
    s = random_state(rng, 6)
    p0 = np.trace(s.matrix[1:, 1:]).real
    for tau in rng.uniform(0, 40, 5):
        evolved = apply_transform(s, propagator(H1, tau).V1)
        assert abs(np.trace(evolved.matrix[1:, 1:]).real - p0) < 1e-12
