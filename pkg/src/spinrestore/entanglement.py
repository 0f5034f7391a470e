"""Wootters concurrence, closed-form pair concurrence, and PPT double negativity."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .states import ExcitationState, embed_computational, partial_trace

_SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]])
_SYSY = np.kron(_SIGMA_Y, _SIGMA_Y)


class UndefinedRatioError(ValueError):
    """Sender pair concurrence is zero, the scaling ratio is undefined."""


@dataclass(frozen=True)
class PairConcurrence:
    i: int
    j: int
    value: float


@dataclass(frozen=True)
class NegativityReport:
    value: float
    negative_eigenvalues: list


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh(rho)
    evals = np.clip(evals, 0.0, None)
    evals[evals < 1e-14 * evals.max()] = 0.0  # exact null space, no sqrt blow-up
    return (evecs * np.sqrt(evals)) @ evecs.conj().T


def wootters_concurrence(rho2: np.ndarray) -> float:
    """Concurrence of a two-qubit density matrix.

    The eigenvalues of the non-Hermitian product rho (sy x sy) rho* (sy x sy)
    are computed as the singular values of sqrt(rho) (sy x sy) sqrt(rho)*,
    an equivalent Hermitian-similarity form that keeps them real and accurate
    near zero.
    """
    rho2 = np.asarray(rho2, dtype=complex)
    if rho2.shape != (4, 4):
        raise ValueError("expected a 4x4 two-qubit density matrix")
    if np.max(np.abs(rho2 - rho2.conj().T)) > 1e-10:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho2).real - 1.0) > 1e-10:
        raise ValueError("density matrix trace differs from 1")
    if np.linalg.eigvalsh(rho2)[0] < -1e-10:
        raise ValueError("density matrix is not PSD")
    sq = _psd_sqrt(rho2)
    lam = np.linalg.svd(sq @ _SYSY @ sq.conj(), compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def pair_concurrence(state: ExcitationState, i: int, j: int) -> PairConcurrence:
    """Concurrence between spins i and j of a (0,1) state: 2|s_ij| in closed form."""
    if not (1 <= i < j <= state.dim):
        raise ValueError(f"need 1 <= i < j <= {state.dim}, got ({i}, {j})")
    reduced = partial_trace(state, [i, j])
    return PairConcurrence(i, j, 2.0 * abs(reduced.matrix[1, 2]))


def concurrence_ratio(sender: ExcitationState, receiver: ExcitationState,
                      i: int, j: int) -> float:
    """Receiver-over-sender concurrence for the spin pair (i, j)."""
    cs = pair_concurrence(sender, i, j).value
    if cs == 0.0:
        raise UndefinedRatioError(f"sender concurrence for pair ({i}, {j}) is zero")
    cr = pair_concurrence(receiver, i, j).value
    return cr / cs


def double_negativity(rho_sr: ExcitationState, split: tuple[int, int]) -> NegativityReport:
    """Double negativity of the S-R bipartition: 2 * sum of |negative eigenvalues|
    of the partial transpose over the sender factor."""
    n_s, n_r = split
    n = n_s + n_r
    if rho_sr.dim != n:
        raise ValueError(f"state covers {rho_sr.dim} spins, split implies {n}")
    full = embed_computational(rho_sr, n)
    t = full.reshape([2] * (2 * n))
    # swap the sender bra and ket axes (spin 1 = axis 0)
    perm = list(range(n, n + n_s)) + list(range(n_s, n)) \
        + list(range(n_s)) + list(range(n + n_s, 2 * n))
    pt = t.transpose(perm).reshape(2**n, 2**n)
    evals = np.linalg.eigvalsh(pt)
    neg = [float(v) for v in evals if v < -1e-12]
    return NegativityReport(2.0 * sum(-v for v in neg), neg)
