import numpy as np
import pytest

from matraj.model import Region1D, Region2D, SensingConfig

LAM = 0.05
TS = 1e-5
VM = 10.0


def cfg1d(N=100, A=1.0, lam=LAM, ts=TS, vm=VM, snr=1.0):
    return SensingConfig(wavelength_m=lam, snapshot_interval_s=ts, num_snapshots=N,
                         max_speed_mps=vm, snr_linear=snr, region=Region1D(A))


def cfg2d(N=100, W=1.0, H=None, lam=LAM, ts=TS, vm=VM, snr=1.0):
    return SensingConfig(wavelength_m=lam, snapshot_interval_s=ts, num_snapshots=N,
                         max_speed_mps=vm, snr_linear=snr, region=Region2D(W, W if H is None else H))


def unit_cfg(N, A, dim=1):
    """Delta = 1: wavelength 1 m, T_s = 1 s, v_max = 1 m/s."""
    reg = Region1D(A) if dim == 1 else Region2D(A, A)
    return SensingConfig(wavelength_m=1.0, snapshot_interval_s=1.0, num_snapshots=N,
                         max_speed_mps=1.0, snr_linear=1.0, region=reg)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
