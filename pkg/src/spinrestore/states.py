"""Density matrices restricted to the (0,1)-excitation subspace of a spin chain.

Basis convention: index 0 is the vacuum (all spins down), index k >= 1 is the
state with spin k excited and all others down.  A state over n spins is an
(n+1) x (n+1) complex Hermitian, PSD, trace-1 matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10


@dataclass(frozen=True)
class ExcitationState:
    """A (0,1)-excitation density matrix over `dim` spins."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.dim + 1, self.dim + 1):
            raise ValueError(
                f"matrix shape {m.shape} does not match dim={self.dim}"
            )
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise ValueError("matrix is not Hermitian within 1e-12")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL or abs(np.trace(m).imag) > TRACE_TOL:
            raise ValueError("trace differs from 1 by more than 1e-12")
        evals = np.linalg.eigvalsh(m)
        if evals[0] < PSD_TOL:
            raise ValueError(
                f"matrix is not PSD: smallest eigenvalue {evals[0]:.3e}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def vacuum(cls, dim: int) -> "ExcitationState":
        m = np.zeros((dim + 1, dim + 1), dtype=complex)
        m[0, 0] = 1.0
        return cls(dim, m)

    @classmethod
    def from_pure(cls, amplitudes) -> "ExcitationState":
        """Density matrix of a pure state given by dim+1 basis amplitudes."""
        a = np.asarray(amplitudes, dtype=complex)
        a = a / np.linalg.norm(a)
        return cls(len(a) - 1, np.outer(a, a.conj()))


@dataclass(frozen=True)
class CoherenceBlock:
    """One coherence order of an ExcitationState.

    `entries` has the full (dim+1, dim+1) shape with all positions outside
    the block zeroed, so the three blocks sum back to the original matrix.
    """

    order: int
    entries: np.ndarray


def coherence_block(state: ExcitationState, order: int) -> CoherenceBlock:
    """Extract the coherence block of the given order (-1, 0 or +1)."""
    if order not in (-1, 0, 1):
        raise ValueError(f"coherence order must be -1, 0 or +1, got {order}")
    m = state.matrix
    out = np.zeros_like(m)
    if order == 1:
        out[0, 1:] = m[0, 1:]
    elif order == -1:
        out[1:, 0] = m[1:, 0]
    else:
        out[0, 0] = m[0, 0]
        out[1:, 1:] = m[1:, 1:]
    return CoherenceBlock(order, out)


def embed_computational(state: ExcitationState, qubit_count: int) -> np.ndarray:
    """Embed into the full 2^n computational basis.

    Basis |k> (spin k excited) maps to the bitstring with bit k set,
    spin 1 being the most significant bit.  All entries involving Hamming
    weight >= 2 are zero.
    """
    n = state.dim
    if qubit_count != n:
        raise ValueError(f"qubit_count={qubit_count} must equal state.dim={n}")
    idx = _basis_indices(n)
    out = np.zeros((2**n, 2**n), dtype=complex)
    out[np.ix_(idx, idx)] = state.matrix
    return out


def from_computational(matrix: np.ndarray, qubit_count: int) -> ExcitationState:
    """Project a 2^n density matrix back onto the (0,1)-excitation basis."""
    n = qubit_count
    if matrix.shape != (2**n, 2**n):
        raise ValueError("matrix size does not match qubit_count")
    idx = _basis_indices(n)
    return ExcitationState(n, np.asarray(matrix, dtype=complex)[np.ix_(idx, idx)])


def _basis_indices(n: int) -> list[int]:
    # computational index of |0>, |1>, ..., |n>
    return [0] + [1 << (n - k) for k in range(1, n + 1)]


def partial_trace(state: ExcitationState, keep) -> ExcitationState:
    """Trace out all spins not in `keep`, via the closed-form block rule.

    The vacuum population absorbs the populations of discarded excitations;
    every coherence touching a discarded excitation vanishes.
    """
    keep = list(keep)
    if not keep:
        raise ValueError("keep set must be nonempty")
    if len(set(keep)) != len(keep):
        raise ValueError("keep set has repeated indices")
    for k in keep:
        if not 1 <= k <= state.dim:
            raise ValueError(f"spin index {k} out of range 1..{state.dim}")
    m = state.matrix
    nk = len(keep)
    out = np.zeros((nk + 1, nk + 1), dtype=complex)
    dropped = [j for j in range(1, state.dim + 1) if j not in keep]
    out[0, 0] = m[0, 0] + sum(m[j, j] for j in dropped)
    for a, i in enumerate(keep):
        out[0, a + 1] = m[0, i]
        out[a + 1, 0] = m[i, 0]
        for b, j in enumerate(keep):
            out[a + 1, b + 1] = m[i, j]
    return ExcitationState(nk, out)


def sender_embed(sender: ExcitationState, N: int) -> ExcitationState:
    """Extend a sender state to the full chain: the rest starts in the vacuum."""
    if N < sender.dim:
        raise ValueError(f"chain length {N} smaller than sender dim {sender.dim}")
    out = np.zeros((N + 1, N + 1), dtype=complex)
    ns = sender.dim
    out[: ns + 1, : ns + 1] = sender.matrix
    return ExcitationState(N, out)


def _fmt17(x: float) -> str:
    return format(float(x), ".17g")


def to_json(state: ExcitationState) -> str:
    """Serialize as {"dim": n, "re": [[...]], "im": [[...]]}, 17 significant digits."""
    re_rows = [
        "[" + ", ".join(_fmt17(v) for v in row) + "]" for row in state.matrix.real
    ]
    im_rows = [
        "[" + ", ".join(_fmt17(v) for v in row) + "]" for row in state.matrix.imag
    ]
    return (
        '{"dim": %d, "re": [%s], "im": [%s]}'
        % (state.dim, ", ".join(re_rows), ", ".join(im_rows))
    )


def from_json(text: str) -> ExcitationState:
    obj = json.loads(text)
    m = np.array(obj["re"], dtype=float) + 1j * np.array(obj["im"], dtype=float)
    return ExcitationState(obj["dim"], m)
