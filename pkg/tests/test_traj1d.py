import numpy as np
import pytest

from conftest import cfg1d, unit_cfg
from matraj.crb import Regime, classify_regime, crb_1d, crb_time_constrained
from matraj.traj1d import (
    benchmark_1d,
    group_sizes,
    mirror,
    optimal_trajectory,
    optimal_trajectory_sc,
    optimal_trajectory_tc,
    oracle_max_variance,
    oracle_resolution_bound,
    sc_variance,
    tc_variance,
)


def test_tc_example():
    cfg = unit_cfg(3, 10.0)
    t = optimal_trajectory_tc(cfg)
    assert t.positions_m == pytest.approx([0, 1, 2])
    assert t.velocities_mps == pytest.approx([1, 1])
    assert crb_1d(t, cfg).crb_u == pytest.approx(crb_time_constrained(cfg), rel=1e-10)


def test_tc_variance_random(rng):
    for _ in range(20):
        N = int(rng.integers(2, 500))
        vm = rng.uniform(0.1, 10)
        cfg = cfg1d(N=N, vm=vm, A=N * vm * 1e-5)
        assert np.var(optimal_trajectory_tc(cfg).positions_m) == pytest.approx(
            tc_variance(N, cfg.step), rel=1e-10)


def test_tc_shift_and_range():
    cfg = unit_cfg(4, 6.0)
    a = crb_1d(optimal_trajectory_tc(cfg, 0.0), cfg).crb_u
    b = crb_1d(optimal_trajectory_tc(cfg, 3.0), cfg).crb_u
    assert a == pytest.approx(b, rel=1e-12)
    with pytest.raises(ValueError):
        optimal_trajectory_tc(cfg, 3.5)
    with pytest.raises(ValueError):
        optimal_trajectory_tc(unit_cfg(5, 2.0))
    with pytest.raises(ValueError):
        optimal_trajectory_sc(unit_cfg(3, 10.0))


def test_sc_example():
    cfg = unit_cfg(5, 2.0)
    g = group_sizes(cfg)
    assert (g.n_left, g.n_mid, g.n_right) == (2, 1, 2)
    t = optimal_trajectory_sc(cfg)
    assert t.positions_m == pytest.approx([0, 0, 1, 2, 2])
    assert t.velocities_mps == pytest.approx([0, 1, 1, 0])
    assert t.violations(cfg) == []


def test_sc_fractional_step():
    cfg = unit_cfg(6, 2.5)
    t = optimal_trajectory_sc(cfg)
    assert t.positions_m == pytest.approx([0, 0, 1, 2, 2.5, 2.5])
    assert t.velocities_mps == pytest.approx([0, 1, 1, 0.5, 0])
    assert t.violations(cfg) == []


def test_sc_single_left_group():
    # N_L = 1: the leading stationary branch is empty
    cfg = unit_cfg(4, 2.5)
    g = group_sizes(cfg)
    assert g.n_left == 1
    t = optimal_trajectory_sc(cfg)
    assert t.violations(cfg) == []
    assert t.positions_m == pytest.approx([0, 1, 2, 2.5])


def test_sc_closed_form_variance(rng):
    for _ in range(30):
        N = int(rng.integers(3, 3000))
        A = rng.uniform(0.05, 0.9) * (N - 1) * 1e-4
        cfg = cfg1d(N=N, A=A)
        assert np.var(optimal_trajectory_sc(cfg).positions_m) == pytest.approx(sc_variance(cfg), rel=1e-10)


def test_sc_beats_benchmarks(rng):
    for _ in range(50):
        N = int(rng.integers(5, 2000))
        A = rng.uniform(0.05, 0.95) * (N - 1) * 1e-4
        cfg = cfg1d(N=N, A=A)
        best = np.var(optimal_trajectory(cfg).positions_m)
        for kind in ("move_forward", "back_and_forth"):
            bench = benchmark_1d(kind, cfg)
            assert bench.violations(cfg) == []
            assert np.var(bench.positions_m) <= best * (1 + 1e-12)


def test_mirror():
    A = 2.5
    cfg = unit_cfg(6, A)
    t = optimal_trajectory(cfg)
    m = mirror(t, cfg)
    assert m.violations(cfg) == []
    assert mirror(m, cfg).positions_m == pytest.approx(t.positions_m)
    assert crb_1d(m, cfg).crb_u == crb_1d(t, cfg).crb_u
    cfg_tc = unit_cfg(3, 10.0)
    mt = mirror(optimal_trajectory_tc(cfg_tc), cfg_tc)
    assert mt.positions_m == pytest.approx([8, 9, 10])
    assert mt.velocities_mps == pytest.approx([1, 1])


def test_move_forward_example():
    cfg = unit_cfg(5, 4.0)
    t = benchmark_1d("move_forward", cfg)
    assert t.positions_m == pytest.approx([0, 0.8, 1.6, 2.4, 3.2])
    with pytest.raises(ValueError):
        benchmark_1d("move_forward", unit_cfg(5, 6.0))


def test_back_and_forth():
    cfg = unit_cfg(5, 4.0)
    assert benchmark_1d("back_and_forth", cfg).positions_m == pytest.approx([0, 1, 2, 3, 4])
    cfg = unit_cfg(7, 2.5)
    assert benchmark_1d("back_and_forth", cfg).positions_m == pytest.approx([0, 1, 2, 2.5, 1.5, 0.5, 0])


def test_oracle_small_cases():
    r = oracle_max_variance(unit_cfg(2, 0.5), 10)
    assert np.ptp(r.positions) == pytest.approx(0.5)
    r = oracle_max_variance(unit_cfg(2, 3.0), 10)
    assert np.ptp(r.positions) == pytest.approx(1.0)
    r = oracle_max_variance(unit_cfg(3, 3.0), 20)
    assert r.variance == pytest.approx(2 / 3, abs=oracle_resolution_bound(unit_cfg(3, 3.0), 20))


def test_oracle_sc_near_boundary():
    A = 2.0 - 1e-3
    cfg = unit_cfg(5, A)
    r = oracle_max_variance(cfg, 40)
    assert abs(r.variance - sc_variance(cfg)) <= oracle_resolution_bound(cfg, 40)


def test_monotone_reduction():
    # letting the grid path turn back never helps
    for N, A in [(3, 1.5), (4, 2.3), (4, 1.2)]:
        cfg = unit_cfg(N, A)
        a = oracle_max_variance(cfg, 10, monotone=True)
        b = oracle_max_variance(cfg, 10, monotone=False)
        assert b.variance == pytest.approx(a.variance, rel=1e-12)


def test_oracle_deterministic_and_budget():
    a = oracle_max_variance(unit_cfg(4, 1.5), 10)
    b = oracle_max_variance(unit_cfg(4, 1.5), 10)
    assert np.array_equal(a.positions, b.positions)
    with pytest.raises(ValueError):
        oracle_max_variance(unit_cfg(10, 5.0), 100, budget=1000)


def test_regimes_dispatch():
    assert classify_regime(unit_cfg(5, 4.0)) is Regime.TIME_CONSTRAINED
    assert optimal_trajectory(unit_cfg(5, 4.0)).positions_m == pytest.approx([0, 1, 2, 3, 4])
