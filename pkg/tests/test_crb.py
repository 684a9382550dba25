import math

import numpy as np
import pytest

from conftest import cfg1d, cfg2d, unit_cfg
from matraj.crb import (
    Regime,
    classify_regime,
    crb_1d,
    crb_2d,
    crb_circle,
    crb_circle_asymptotic,
    crb_fpa_ula,
    crb_fpa_upa,
    crb_from_variance,
    crb_time_constrained,
    ula_positions,
    ula_variance,
    upa_positions,
)
from matraj.model import Trajectory1D, Trajectory2D
from matraj.traj1d import optimal_trajectory_tc
from matraj.traj2d import benchmark_2d


def test_constant_trajectory_infinite():
    cfg = cfg1d(N=5)
    rep = crb_1d(Trajectory1D(np.full(5, 0.3), np.zeros(4)), cfg)
    assert rep.crb_u == math.inf and rep.var_x == 0.0


def test_tc_two_paths(rng):
    for _ in range(20):
        N = int(rng.integers(2, 5000))
        lam = rng.uniform(0.01, 0.5)
        snr = 10 ** rng.uniform(-3, 2)
        vm = rng.uniform(0.5, 20)
        cfg = cfg1d(N=N, lam=lam, vm=vm, snr=snr, A=(N - 1) * vm * 1e-5 * 1.5)
        rep = crb_1d(optimal_trajectory_tc(cfg), cfg)
        assert rep.crb_u == pytest.approx(crb_time_constrained(cfg), rel=1e-10)


def test_snr_scaling():
    cfg = cfg1d(N=50, A=1.0)
    t = optimal_trajectory_tc(cfg)
    assert crb_1d(t, cfg.replace(snr_linear=2.0)).crb_u == pytest.approx(crb_1d(t, cfg).crb_u / 2)


def test_monotone_in_variance():
    cfg = cfg1d(N=4, A=1.0)
    prev = math.inf
    for s in (1e-5, 2e-5, 5e-5, 1e-4):
        val = crb_1d(Trajectory1D.from_positions(s * np.arange(4), cfg.snapshot_interval_s), cfg).crb_u
        assert val < prev
        prev = val


def test_circle_two_paths(rng):
    for _ in range(20):
        N = int(rng.integers(3, 3000))
        vm = rng.uniform(0.5, 20)
        cfg = cfg2d(N=N, W=10.0, vm=vm, lam=rng.uniform(0.01, 0.2), snr=10 ** rng.uniform(-2, 2))
        rep = crb_2d(benchmark_2d("circle", cfg), cfg)
        assert rep.crb_u == pytest.approx(crb_circle(cfg), rel=1e-9)
        assert rep.crb_v == pytest.approx(crb_circle(cfg), rel=1e-9)


def test_circle_asymptotic_within_one_percent():
    cfg = cfg2d(N=10_000, W=10.0)
    assert crb_circle(cfg) / crb_circle_asymptotic(cfg) == pytest.approx(1.0, rel=0.01)


def test_x_axis_only_and_swap(rng):
    cfg = cfg2d(N=20, W=1.0)
    x = np.cumsum(rng.uniform(0, 1e-4, 20))
    t = Trajectory2D.from_positions(np.vstack([x, np.zeros(20)]), cfg.snapshot_interval_s)
    rep = crb_2d(t, cfg)
    assert rep.crb_v == math.inf
    # 1D embedding: the cov^2/var(y) term vanishes
    assert rep.crb_u == pytest.approx(crb_1d(Trajectory1D.from_positions(x, cfg.snapshot_interval_s),
                                             cfg1d(N=20)).crb_u)
    r = np.vstack([x, rng.uniform(0, 1e-3, 20)])
    a = crb_2d(Trajectory2D.from_positions(r, 1.0), cfg)
    b = crb_2d(Trajectory2D.from_positions(r[::-1], 1.0), cfg)
    assert (a.crb_u, a.crb_v) == (b.crb_v, b.crb_u)


def test_correlated_rows_infinite():
    cfg = cfg2d(N=10)
    x = np.linspace(0, 1e-3, 10)
    rep = crb_2d(Trajectory2D.from_positions(np.vstack([x, 2 * x]), 1.0), cfg)
    assert rep.crb_u == math.inf and rep.crb_v == math.inf


def test_ula_closed_forms():
    cfg = cfg1d(N=7, lam=0.1, snr=3.0)
    assert crb_fpa_ula(2, cfg) == pytest.approx(1.0 / (math.pi ** 2 * 3.0 * 7))
    for M in (2, 5, 16, 64):
        x = ula_positions(M, cfg.wavelength_m)
        assert np.var(x) == pytest.approx(ula_variance(M, cfg.wavelength_m))
        direct = crb_from_variance(np.var(x), cfg, array_gain=M)
        assert direct == pytest.approx(crb_fpa_ula(M, cfg), rel=1e-10)
    assert crb_fpa_ula(8, cfg.replace(num_snapshots=14)) == pytest.approx(crb_fpa_ula(8, cfg) / 2)
    with pytest.raises(ValueError):
        crb_fpa_ula(1, cfg)


def test_upa_closed_forms():
    cfg = cfg2d(N=9, lam=0.1, snr=2.0)
    assert crb_fpa_upa(4, cfg) == pytest.approx(6 / (math.pi ** 2 * 2.0 * 9 * 12))
    assert crb_fpa_upa(4, cfg) / crb_fpa_upa(16, cfg) == pytest.approx(20.0)
    for M in (4, 9, 16, 64):
        r = upa_positions(M, cfg.wavelength_m)
        vx = np.var(r[0])
        assert crb_from_variance(vx, cfg, array_gain=M) == pytest.approx(crb_fpa_upa(M, cfg), rel=1e-10)
        rep = crb_2d(Trajectory2D(r, np.zeros((2, M - 1))), cfg.replace(num_snapshots=M))
        # one snapshot over M elements, then the N-fold snapshot gain
        assert rep.crb_u / cfg.num_snapshots == pytest.approx(crb_fpa_upa(M, cfg), rel=1e-10)
    with pytest.raises(ValueError):
        crb_fpa_upa(8, cfg)


def test_regime_classification():
    assert classify_regime(unit_cfg(5, 10.0)) is Regime.TIME_CONSTRAINED
    assert classify_regime(unit_cfg(5, 2.0)) is Regime.SPACE_CONSTRAINED
    assert classify_regime(unit_cfg(5, 4.0)) is Regime.TIME_CONSTRAINED


def test_report_dict():
    cfg = cfg1d(N=10, A=1.0)
    d = crb_1d(optimal_trajectory_tc(cfg), cfg).to_dict()
    assert d["regime"] == "time_constrained"
    assert d["effective_aperture_m"] == pytest.approx(9 * cfg.step)
