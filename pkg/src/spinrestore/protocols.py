"""Experiment procedures: scale-factor scan over chain length, concurrence-ratio
maximization, random pure-sender sampling, and the averaged negativity profile.

All procedures are seeded and emit rows suitable for the CSV writers at the
bottom of this module; identical (config, seed) reproduces identical bytes.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .chain import Layout, build_couplings, single_excitation_hamiltonian, propagator
from .control import SolveResult, apply_transform, composite_transform, control_unitary, solve_restoring
from .entanglement import double_negativity
from .states import ExcitationState, partial_trace, sender_embed

log = logging.getLogger(__name__)

DEFAULT_TAU_STEP = 0.25
DEFAULT_STARTS = 50


@dataclass(frozen=True)
class ScanConfig:
    N_range: list[int]
    N_S: int
    N_ER: int
    tau_max_factor: float = 1.5
    tau_step: float = DEFAULT_TAU_STEP
    starts: int = DEFAULT_STARTS
    seed: int = 0

    def __post_init__(self):
        if self.tau_step <= 0:
            raise ValueError("tau_step must be positive")
        if self.starts < 1:
            raise ValueError("starts must be >= 1")


@dataclass(frozen=True)
class LambdaCurvePoint:
    N: int
    lambda_N: float
    tau_N: float
    best_start: int
    missing: bool = False


@dataclass(frozen=True)
class PureSenderSample:
    amplitudes: np.ndarray
    psi: np.ndarray
    phi: np.ndarray


def tau_grid(tau_max: float, step: float) -> list[float]:
    n = int(math.floor(tau_max / step + 1e-9))
    return [k * step for k in range(n + 1)]


def _min_abs_lambda(res: SolveResult) -> float:
    return float(np.min(np.abs(res.scale.lambda1)))


def _solve_one_tau(args):
    layout, tau, starts, seed = args
    H1 = single_excitation_hamiltonian(build_couplings(layout))
    return solve_restoring(tau, layout, starts, seed, H1=H1)


def solve_grid(layout: Layout, taus, starts: int, seed: int,
               threads: int = 1) -> list[list[SolveResult]]:
    """solve_restoring at each tau, optionally in a process pool; output order
    follows the tau order regardless of scheduling."""
    jobs = [(layout, t, starts, seed) for t in taus]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_solve_one_tau, jobs))
    H1 = single_excitation_hamiltonian(build_couplings(layout))
    return [solve_restoring(t, layout, starts, seed, H1=H1) for t in taus]


def lambda_scan(cfg: ScanConfig, threads: int = 1) -> list[LambdaCurvePoint]:
    """For each N, maximize min_n |lambda1_n| over the tau grid and starts.

    Ties break toward smaller tau, then smaller start index.
    """
    points = []
    for N in cfg.N_range:
        layout = Layout(N=N, N_S=cfg.N_S, N_R=cfg.N_S, N_ER=cfg.N_ER)
        taus = tau_grid(cfg.tau_max_factor * N, cfg.tau_step)
        best = None  # (-lambda_min, tau, start)
        for tau, results in zip(taus, solve_grid(layout, taus, cfg.starts,
                                                 cfg.seed, threads)):
            for r in results:
                if not r.converged:
                    continue
                key = (-_min_abs_lambda(r), tau, r.start_index)
                if best is None or key < best:
                    best = key
        if best is None:
            log.warning("no converged solution for N=%d; point marked missing", N)
            points.append(LambdaCurvePoint(N, math.nan, math.nan, -1, missing=True))
        else:
            points.append(LambdaCurvePoint(N, -best[0], best[1], best[2]))
    return points


@dataclass(frozen=True)
class RatioRow:
    i: int
    j: int
    tau: float
    ratio: float
    ratio_x2: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "ratio_x2", 2.0 * self.ratio)


def ratio_optimize(layout: Layout, taus, starts: int, seed: int,
                   threads: int = 1) -> list[RatioRow]:
    """Maximize |lambda1_i lambda1_j| per sender pair over converged solutions
    and the tau grid."""
    if layout.N_S < 2:
        raise ValueError("ratio optimization needs at least a 2-qubit sender")
    pairs = [(i, j) for i in range(1, layout.N_S + 1)
             for j in range(i + 1, layout.N_S + 1)]
    best = {p: None for p in pairs}
    for tau, results in zip(taus, solve_grid(layout, taus, starts, seed, threads)):
        for r in results:
            if not r.converged:
                continue
            lam = np.abs(r.scale.lambda1)
            for (i, j) in pairs:
                v = float(lam[i - 1] * lam[j - 1])
                if best[(i, j)] is None or v > best[(i, j)][0]:
                    best[(i, j)] = (v, tau)
    rows = []
    for (i, j) in pairs:
        if best[(i, j)] is None:
            log.warning("no converged solution for pair (%d, %d)", i, j)
            continue
        v, tau = best[(i, j)]
        rows.append(RatioRow(i, j, tau, v))
    return rows


def sample_pure_sender(rng: np.random.Generator, N_S: int) -> PureSenderSample:
    """Random pure (0,1) sender state with hyperspherical amplitudes."""
    if N_S < 1:
        raise ValueError("sender needs at least one spin")
    psi = rng.uniform(0.0, np.pi / 2.0, N_S)
    ph = rng.uniform(0.0, 2.0 * np.pi, N_S)
    a = np.empty(N_S + 1, dtype=complex)
    a[0] = np.prod(np.cos(psi))
    for m in range(1, N_S + 1):
        a[m] = np.sin(psi[m - 1]) * np.prod(np.cos(psi[m:])) * np.exp(1j * ph[m - 1])
    return PureSenderSample(a, psi, ph)


def best_solution(results: list[SolveResult]) -> SolveResult | None:
    """Converged solution maximizing min_n |lambda1_n|; ties by start index."""
    conv = [r for r in results if r.converged]
    if not conv:
        return None
    return min(conv, key=lambda r: (-_min_abs_lambda(r), r.start_index))


def evolve_sender(sender: ExcitationState, layout: Layout, tau: float,
                  phi: np.ndarray) -> ExcitationState:
    """Full-chain state after the propagator and the ER control unitary."""
    H1 = single_excitation_hamiltonian(build_couplings(layout))
    W = composite_transform(propagator(H1, tau),
                            control_unitary(phi, layout.N_ER), layout)
    return apply_transform(sender_embed(sender, layout.N), W.W1)


def negativity_samples(layout: Layout, tau: float, phi: np.ndarray,
                       senders) -> np.ndarray:
    """Double negativity between S and R for each pure sender state."""
    keep = list(range(1, layout.N_S + 1)) + \
        list(range(layout.N - layout.N_R + 1, layout.N + 1))
    out = []
    for sample in senders:
        full = evolve_sender(ExcitationState.from_pure(sample.amplitudes),
                             layout, tau, phi)
        rho_sr = partial_trace(full, keep)
        out.append(double_negativity(rho_sr, (layout.N_S, layout.N_R)).value)
    return np.array(out)


def negativity_profile(layout: Layout, taus, starts: int, n_states: int,
                       seed: int, threads: int = 1) -> list[tuple[float, float, int]]:
    """Mean S-R double negativity over sampled pure senders at each tau,
    using the best converged restoring solution there."""
    state_rng = np.random.default_rng(np.random.SeedSequence((seed, 0xA11)))
    senders = [sample_pure_sender(state_rng, layout.N_S) for _ in range(n_states)]
    rows = []
    for tau, results in zip(taus, solve_grid(layout, taus, starts, seed, threads)):
        sol = best_solution(results)
        if sol is None:
            log.warning("no converged solution at tau=%g; point skipped", tau)
            continue
        vals = negativity_samples(layout, tau, sol.phi, senders)
        rows.append((tau, float(np.mean(vals)), n_states))
    return rows


def _fmt12(x: float) -> str:
    return format(float(x), ".12g")


def write_lambda_curve_csv(path, points: list[LambdaCurvePoint]):
    with open(path, "w", newline="\n") as f:
        f.write("N,lambda_N,tau_N,best_start\n")
        for p in points:
            f.write(f"{p.N},{_fmt12(p.lambda_N)},{_fmt12(p.tau_N)},{p.best_start}\n")


def write_ratio_table_csv(path, rows: list[RatioRow]):
    with open(path, "w", newline="\n") as f:
        f.write("i,j,tau,ratio,ratio_x2\n")
        for r in rows:
            f.write(f"{r.i},{r.j},{_fmt12(r.tau)},{_fmt12(r.ratio)},{_fmt12(r.ratio_x2)}\n")


def write_negativity_csv(path, rows):
    with open(path, "w", newline="\n") as f:
        f.write("tau,mean_nsr,n_states\n")
        for tau, mean, n in rows:
            f.write(f"{_fmt12(tau)},{_fmt12(mean)},{n}\n")
