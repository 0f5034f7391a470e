"""Extended-receiver control unitary, composite transform, restoring solver.

The control unitary acts on the last N_ER excitation coordinates and is a
product of two-level exponentials, one real angle each.  Restoring requires
the receiver-rows x sender-columns slice of the composite single-excitation
transform to be diagonal; the solver drives its off-diagonal entries to zero
by multi-start damped least squares.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .chain import Layout, Propagator, build_couplings, propagator, single_excitation_hamiltonian
from .states import ExcitationState

ACCEPT_TOL = 1e-8
FD_STEP = 1e-7
MAX_ITER = 500


def param_count(n_er: int) -> int:
    return n_er * (n_er - 1)


def generator_order(n_er: int) -> list[tuple[int, int, str]]:
    """Canonical generator order: lexicographic pairs, 'sym' before 'anti'.

    'sym' is the real symmetric two-level generator |p><q| + |q><p|,
    'anti' the imaginary antisymmetric one i(|q><p| - |p><q|).
    """
    order = []
    for p in range(n_er - 1):
        for q in range(p + 1, n_er):
            order.append((p, q, "sym"))
            order.append((p, q, "anti"))
    return order


def control_unitary(phi: np.ndarray, n_er: int) -> np.ndarray:
    """Ordered product of two-level exponentials exp(i*A_j(phi_j))."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (param_count(n_er),):
        raise ValueError(
            f"expected {param_count(n_er)} angles for N_ER={n_er}, got {phi.shape}"
        )
    U = np.eye(n_er, dtype=complex)
    for (p, q, kind), a in zip(generator_order(n_er), phi):
        c, s = np.cos(a), np.sin(a)
        if kind == "sym":
            g = np.array([[c, 1j * s], [1j * s, c]])
        else:
            g = np.array([[c, s], [-s, c]])
        U[:, [p, q]] = U[:, [p, q]] @ g
    return U


@dataclass(frozen=True)
class CompositeTransform:
    tau: float
    W1: np.ndarray


def composite_transform(V1: Propagator, U1: np.ndarray, layout: Layout) -> CompositeTransform:
    """W1 = diag(I, U1) . V1 with U1 acting on the last N_ER coordinates."""
    n_er = layout.N_ER
    if U1.shape != (n_er, n_er):
        raise ValueError(f"U1 shape {U1.shape} does not match N_ER={n_er}")
    W1 = V1.V1.copy()
    W1[-n_er:, :] = U1 @ W1[-n_er:, :]
    return CompositeTransform(V1.tau, W1)


def transfer_slice(W: CompositeTransform, layout: Layout) -> np.ndarray:
    """Receiver rows x sender columns of W1 (the block that must be diagonal)."""
    return W.W1[layout.N - layout.N_R :, : layout.N_S].copy()


def apply_transform(state: ExcitationState, W1: np.ndarray) -> ExcitationState:
    """Conjugate a full-chain (0,1) state by diag(1, W1)."""
    m = state.matrix
    out = np.empty_like(m)
    out[0, 0] = m[0, 0]
    out[0, 1:] = m[0, 1:] @ W1.conj().T
    out[1:, 0] = out[0, 1:].conj()
    out[1:, 1:] = W1 @ m[1:, 1:] @ W1.conj().T
    return ExcitationState(state.dim, out)


@dataclass(frozen=True)
class ScaleFactors:
    """Diagonal transfer amplitudes and the rank-1 matrix scaling 0-order coherences."""

    lambda1: np.ndarray
    lambda0: np.ndarray = field(init=False)

    def __post_init__(self):
        l0 = np.outer(self.lambda1, self.lambda1.conj())
        l0.setflags(write=False)
        object.__setattr__(self, "lambda0", l0)


def scale_factors(B: np.ndarray) -> ScaleFactors:
    off = B - np.diag(np.diag(B))
    if np.abs(off).max() > 1e-6:
        warnings.warn("slice not diagonal; lambda approximate")
    return ScaleFactors(np.diag(B).copy())


@dataclass(frozen=True)
class SolveResult:
    phi: np.ndarray
    residual_norm: float
    scale: ScaleFactors
    tau: float
    start_index: int
    seed: int
    converged: bool


class _SliceProblem:
    """Residual machinery for one (layout, tau): B(phi) off-diagonals -> 0."""

    def __init__(self, layout: Layout, tau: float, H1: np.ndarray | None = None):
        self.layout = layout
        self.tau = tau
        if H1 is None:
            H1 = single_excitation_hamiltonian(build_couplings(layout))
        V1 = propagator(H1, tau).V1
        # only the ER rows x sender columns of V1 feed the slice
        self._v1_slice = V1[-layout.N_ER :, : layout.N_S]
        self._offdiag = ~np.eye(layout.N_R, layout.N_S, dtype=bool)

    def slice(self, phi: np.ndarray) -> np.ndarray:
        U1 = control_unitary(phi, self.layout.N_ER)
        return (U1 @ self._v1_slice)[-self.layout.N_R :, :]

    def residual(self, phi: np.ndarray) -> np.ndarray:
        b = self.slice(phi)[self._offdiag]
        return np.concatenate([b.real, b.imag]).reshape(2, -1).T.ravel()


def restore_residual(phi: np.ndarray, tau: float, layout: Layout,
                     H1: np.ndarray | None = None) -> np.ndarray:
    """Re/Im parts of the off-diagonal slice entries, row-major, length 2 N_S(N_S-1)."""
    return _SliceProblem(layout, tau, H1).residual(np.asarray(phi, dtype=float))


def solve_restoring(tau: float, layout: Layout, starts: int, seed: int,
                    H1: np.ndarray | None = None) -> list[SolveResult]:
    """Multi-start least squares on the off-diagonal slice entries.

    Each start draws its initial angles from an independent RNG stream keyed
    by (seed, start_index), so results are reproducible and order-independent.
    Non-convergence is reported, not raised.
    """
    problem = _SliceProblem(layout, tau, H1)
    dim = param_count(layout.N_ER)
    results = []
    for start in range(starts):
        rng = np.random.default_rng(np.random.SeedSequence((seed, start)))
        phi0 = rng.uniform(0.0, 2.0 * np.pi, dim)
        if layout.N_S == 1:
            phi, norm = phi0, 0.0
        else:
            sol = least_squares(
                problem.residual, phi0, method="trf", jac="2-point",
                diff_step=FD_STEP, xtol=1e-14, ftol=1e-14, gtol=1e-14,
                max_nfev=MAX_ITER,
            )
            phi = np.mod(sol.x, 2.0 * np.pi)
            norm = float(np.linalg.norm(problem.residual(phi)))
        B = problem.slice(phi)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            scale = scale_factors(B)
        results.append(SolveResult(
            phi=phi, residual_norm=norm, scale=scale, tau=tau,
            start_index=start, seed=seed, converged=norm < ACCEPT_TOL,
        ))
    results.sort(key=lambda r: (r.residual_norm, r.start_index))
    return results
