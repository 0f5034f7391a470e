"""Chain geometry, dipole-dipole couplings, single-excitation Hamiltonian, propagator.

Couplings are dimensionless, normalized to the nearest-neighbor value
(D_12 = 1), so the dimensionless time tau coincides with physical time in
those units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ConfigurationError(Exception):
    """Chain layout violates a structural constraint."""


@dataclass(frozen=True)
class Layout:
    """Node layout: sender | transmission line | extended receiver ⊇ receiver.

    The sender occupies nodes 1..N_S, the receiver the last N_R nodes, the
    extended receiver the last N_ER nodes.
    """

    N: int
    N_S: int
    N_R: int
    N_ER: int

    def __post_init__(self):
        if self.N < 2:
            raise ConfigurationError(f"chain needs at least 2 nodes, got N={self.N}")
        if self.N_S != self.N_R:
            raise ConfigurationError(
                f"sender and receiver sizes must match: N_S={self.N_S}, N_R={self.N_R}"
            )
        if not self.N_R <= self.N_ER <= self.N - self.N_S:
            raise ConfigurationError(
                f"need N_R <= N_ER <= N - N_S, got N_R={self.N_R}, "
                f"N_ER={self.N_ER}, N - N_S={self.N - self.N_S}"
            )
        # hard error only when strictly below; equality only occurs at the
        # degenerate N_S=1, N_ER=1 layout where there is nothing to solve
        lhs = self.N_ER * (self.N_ER - 1)
        rhs = 2 * self.N_S * (self.N_S - 1)
        if lhs < rhs:
            raise ConfigurationError(
                "controllability bound violated: need "
                f"N_ER(N_ER-1) > 2 N_S(N_S-1), got {lhs} <= {rhs} "
                f"(N_ER={self.N_ER}, N_S={self.N_S})"
            )

    @property
    def N_TL(self) -> int:
        return self.N - self.N_S - self.N_R


@dataclass(frozen=True)
class Propagator:
    """Single-excitation block of the evolution operator at dimensionless time tau."""

    tau: float
    V1: np.ndarray


def build_couplings(layout: Layout) -> np.ndarray:
    """All-pair dipole couplings D_ij = |i-j|^-3, normalized so D_12 = 1."""
    N = layout.N
    i, j = np.indices((N, N))
    dist = np.abs(i - j)
    with np.errstate(divide="ignore"):
        D = 1.0 / dist.astype(float) ** 3
    np.fill_diagonal(D, 0.0)
    return D


def single_excitation_hamiltonian(D: np.ndarray) -> np.ndarray:
    """Single-excitation block: the flip-flop terms give D_ij/2 off-diagonal."""
    return np.asarray(D, dtype=float) / 2.0


def propagator(H1: np.ndarray, tau: float) -> Propagator:
    """exp(-i H1 tau) via spectral decomposition of the real symmetric H1."""
    evals, evecs = np.linalg.eigh(H1)
    V1 = (evecs * np.exp(-1j * evals * tau)) @ evecs.T.conj()
    return Propagator(tau, V1)
