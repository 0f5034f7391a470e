import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinrestore.chain import Layout
from spinrestore.protocols import (
    LambdaCurvePoint,
    RatioRow,
    ScanConfig,
    best_solution,
    lambda_scan,
    negativity_profile,
    negativity_samples,
    ratio_optimize,
    sample_pure_sender,
    tau_grid,
    write_lambda_curve_csv,
    write_negativity_csv,
    write_ratio_table_csv,
)


def test_tau_grid():
    assert tau_grid(1.0, 0.25) == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert tau_grid(0.9, 0.25) == [0.0, 0.25, 0.5, 0.75]


def test_scan_config_validation():
    with pytest.raises(ValueError):
        ScanConfig(N_range=[5], N_S=2, N_ER=3, tau_step=0.0)
    with pytest.raises(ValueError):
        ScanConfig(N_range=[5], N_S=2, N_ER=3, starts=0)


def test_sample_pure_sender_norm_and_edges(rng):
    for _ in range(100):
        s = sample_pure_sender(rng, 3)
        assert abs(np.sum(np.abs(s.amplitudes) ** 2) - 1) < 1e-12
        assert s.amplitudes.shape == (4,)


def test_sample_pure_sender_closed_form():
    class FixedRng:
        def __init__(self, psi, ph):
            self.vals = [np.asarray(psi, dtype=float), np.asarray(ph, dtype=float)]

        def uniform(self, lo, hi, n):
            return self.vals.pop(0)

    # all psi = 0 -> vacuum
    s = sample_pure_sender(FixedRng([0, 0, 0], [0, 0, 0]), 3)
    np.testing.assert_allclose(s.amplitudes, [1, 0, 0, 0], atol=1e-15)
    # last psi = pi/2 saturates the last amplitude
    s = sample_pure_sender(FixedRng([0.3, 0.8, np.pi / 2], [0, 0, 1.0]), 3)
    assert abs(s.amplitudes[3]) == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(s.amplitudes[:3])) < 1e-12
    # hyperspherical layout for generic angles
    psi, ph = [0.4, 1.1, 0.7], [0.5, 2.2, 4.0]
    s = sample_pure_sender(FixedRng(psi, ph), 3)
    a0 = np.cos(0.4) * np.cos(1.1) * np.cos(0.7)
    a2 = np.sin(1.1) * np.cos(0.7) * np.exp(2.2j)
    assert s.amplitudes[0] == pytest.approx(a0, abs=1e-14)
    assert s.amplitudes[2] == pytest.approx(a2, abs=1e-14)


SMALL_SCAN = ScanConfig(N_range=[5, 6], N_S=2, N_ER=3, tau_max_factor=1.5,
                        tau_step=0.5, starts=5, seed=3)


def test_lambda_scan_small():
    points = lambda_scan(SMALL_SCAN)
    assert [p.N for p in points] == [5, 6]
    for p in points:
        assert not p.missing
        assert 0 <= p.lambda_N <= 1
        assert 0 <= p.tau_N <= 1.5 * p.N


def test_lambda_scan_deterministic():
    a = lambda_scan(SMALL_SCAN)
    b = lambda_scan(SMALL_SCAN)
    assert a == b


def test_ratio_optimize_small():
    layout = Layout(N=6, N_S=2, N_R=2, N_ER=3)
    rows = ratio_optimize(layout, [4.0, 6.0, 8.0], starts=5, seed=9)
    assert len(rows) == 1
    row = rows[0]
    assert (row.i, row.j) == (1, 2)
    assert 0 <= row.ratio <= 1
    assert row.ratio_x2 == pytest.approx(2 * row.ratio)
    assert row.tau in (4.0, 6.0, 8.0)
    with pytest.raises(ValueError):
        ratio_optimize(Layout(N=6, N_S=1, N_R=1, N_ER=2), [4.0], 1, 0)


def test_best_solution_selects_min_lambda_max():
    from spinrestore.control import solve_restoring
    layout = Layout(N=6, N_S=2, N_R=2, N_ER=3)
    results = solve_restoring(6.0, layout, 10, seed=2)
    best = best_solution(results)
    assert best.converged
    best_min = np.min(np.abs(best.scale.lambda1))
    for r in results:
        if r.converged:
            assert np.min(np.abs(r.scale.lambda1)) <= best_min + 1e-15


def test_negativity_profile_tau0_zero():
    layout = Layout(N=6, N_S=2, N_R=2, N_ER=3)
    rows = negativity_profile(layout, [0.0, 3.0], starts=5, n_states=5, seed=4)
    by_tau = dict((t, v) for t, v, _ in rows)
    assert by_tau[0.0] == pytest.approx(0.0, abs=1e-12)


def test_negativity_samples_nonnegative(rng):
    layout = Layout(N=6, N_S=2, N_R=2, N_ER=3)
    from spinrestore.control import solve_restoring
    sol = best_solution(solve_restoring(5.0, layout, 5, seed=4))
    senders = [sample_pure_sender(rng, 2) for _ in range(5)]
    vals = negativity_samples(layout, 5.0, sol.phi, senders)
    assert np.all(vals >= 0)


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_sample_norm_property(seed):
    s = sample_pure_sender(np.random.default_rng(seed), 4)
    assert abs(np.linalg.norm(s.amplitudes) - 1) < 1e-12


def test_csv_writers_format(tmp_path):
    p = tmp_path / "lambda_curve.csv"
    write_lambda_curve_csv(p, [LambdaCurvePoint(5, 0.123456789012345, 6.5, 2)])
    text = p.read_text()
    assert text.splitlines()[0] == "N,lambda_N,tau_N,best_start"
    assert "0.123456789012" in text

    p = tmp_path / "ratio_table.csv"
    write_ratio_table_csv(p, [RatioRow(1, 2, 10.0, 0.25)])
    lines = p.read_text().splitlines()
    assert lines[0] == "i,j,tau,ratio,ratio_x2"
    assert lines[1] == "1,2,10,0.25,0.5"

    p = tmp_path / "negativity_profile.csv"
    write_negativity_csv(p, [(0.5, 0.0625, 50)])
    lines = p.read_text().splitlines()
    assert lines[0] == "tau,mean_nsr,n_states"
    assert lines[1] == "0.5,0.0625,50"


def test_threaded_solve_grid_matches_serial():
    from spinrestore.protocols import solve_grid
    layout = Layout(N=6, N_S=2, N_R=2, N_ER=3)
    serial = solve_grid(layout, [2.0, 4.0], 3, 5, threads=1)
    pooled = solve_grid(layout, [2.0, 4.0], 3, 5, threads=2)
    for a, b in zip(serial, pooled):
        for ra, rb in zip(a, b):
            np.testing.assert_array_equal(ra.phi, rb.phi)
            assert ra.residual_norm == rb.residual_norm
