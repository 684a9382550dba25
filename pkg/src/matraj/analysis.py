"""Steering-vector correlation patterns, power-law fits and MA/FPA crossover times."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage, stats

from . import kernels
from .crb import crb_circle, crb_fpa_ula, crb_fpa_upa, crb_time_constrained
from .estimator import _planar_values
from .model import SensingConfig, SpatialAoA, Trajectory1D, Trajectory2D

__all__ = [
    "CorrelationPattern",
    "CorrelationPattern2D",
    "FitResult",
    "CrossoverReport",
    "correlation_1d",
    "correlation_2d",
    "correlation_value",
    "half_power_width",
    "scaling_fit",
    "crossover_time",
    "verify_crossover",
]


@dataclass(frozen=True)
class CorrelationPattern:
    grid: np.ndarray
    values: np.ndarray
    main_lobe_width: float
    peak_sidelobe: float
    peak_value: float


@dataclass(frozen=True)
class CorrelationPattern2D:
    grid_u: np.ndarray
    grid_v: np.ndarray
    values: np.ndarray  # shape (len(grid_u), len(grid_v))
    half_power_area: float
    width_u: float
    width_v: float
    peak_value: float


def _positions(traj) -> np.ndarray:
    return np.atleast_2d(traj.positions_m)


def correlation_value(traj, true_aoa: SpatialAoA, probe: SpatialAoA, cfg: SensingConfig) -> float:
    """``|a(true)^H a(probe)|^2 / N^2`` at a single probe direction."""
    r = _positions(traj)
    d = np.array([probe.u - true_aoa.u] + ([probe.v - true_aoa.v] if r.shape[0] == 2 else []))
    phase = cfg.wavenumber * (d @ r)
    s = np.exp(1j * phase).sum()
    return float((s.real ** 2 + s.imag ** 2) / r.shape[1] ** 2)


def _crossing(grid, values, i, j):
    # linear interpolation of the q = 1/2 crossing between samples i and j
    qi, qj = values[i], values[j]
    return grid[i] + (0.5 - qi) * (grid[j] - grid[i]) / (qj - qi)


def half_power_width(grid: np.ndarray, values: np.ndarray, peak: int) -> float:
    """Distance between the half-power crossings around ``values[peak]``.

    Returns ``inf`` when the pattern does not drop below one half on both
    sides inside the grid.
    """
    below = values < 0.5
    left = np.flatnonzero(below[:peak])
    right = np.flatnonzero(below[peak + 1 :])
    if left.size == 0 or right.size == 0:
        return math.inf
    li = left[-1]
    ri = peak + 1 + right[0]
    return float(_crossing(grid, values, ri - 1, ri) - _crossing(grid, values, li, li + 1))


def _sidelobe(values: np.ndarray, peak: int) -> float:
    lo = peak
    while lo > 0 and values[lo - 1] <= values[lo]:
        lo -= 1
    hi = peak
    while hi < values.size - 1 and values[hi + 1] <= values[hi]:
        hi += 1
    rest = np.concatenate([values[:lo], values[hi + 1 :]])
    return float(rest.max()) if rest.size else 0.0


def correlation_1d(traj: Trajectory1D, true_u: float, cfg: SensingConfig, probe_grid=None,
                   step: float = 1e-4) -> CorrelationPattern:
    """Correlation ``q(u_bar | u)`` over a probe grid (default: ``[-1, 1]`` at ``step``)."""
    x = np.asarray(traj.positions_m, dtype=float)
    N = x.size
    phase = cfg.wavenumber * x
    weights = np.exp(-1j * phase * true_u)
    if probe_grid is None:
        count = int(round(2.0 / step)) + 1
        grid = -1.0 + step * np.arange(count)
        vals = kernels.scan_1d(weights, phase, -1.0, step, count)
    else:
        grid = np.asarray(probe_grid, dtype=float)
        vals = np.empty(grid.size)
        for i, g in enumerate(grid):
            s = weights @ np.exp(1j * phase * g)
            vals[i] = s.real ** 2 + s.imag ** 2
    vals = vals / N ** 2
    peak = int(np.argmin(np.abs(grid - true_u)))
    width = half_power_width(grid, vals, peak)
    peak_value = correlation_value(traj, SpatialAoA(true_u), SpatialAoA(true_u), cfg)
    return CorrelationPattern(grid=grid, values=vals, main_lobe_width=width,
                              peak_sidelobe=_sidelobe(vals, peak), peak_value=peak_value)


def correlation_2d(traj: Trajectory2D, true_eta: SpatialAoA, cfg: SensingConfig, grid_u=None,
                   grid_v=None, step: float = 1e-2) -> CorrelationPattern2D:
    """Planar correlation on a probe grid (default: ``[-1, 1]^2`` at ``step``).

    The half-power area is the cell count of the connected ``q >= 1/2``
    region containing the sample nearest the true AoA, times the cell area.
    """
    r = np.asarray(traj.positions_m, dtype=float)
    N = r.shape[1]
    if grid_u is None:
        grid_u = -1.0 + step * np.arange(int(round(2.0 / step)) + 1)
    if grid_v is None:
        grid_v = -1.0 + step * np.arange(int(round(2.0 / step)) + 1)
    grid_u = np.asarray(grid_u, dtype=float)
    grid_v = np.asarray(grid_v, dtype=float)
    k = cfg.wavenumber
    w = np.exp(-1j * k * (r[0] * true_eta.u + r[1] * true_eta.v))
    vals = _planar_values(w, k * r[0], k * r[1], grid_u, grid_v) / N ** 2
    i = int(np.argmin(np.abs(grid_u - true_eta.u)))
    j = int(np.argmin(np.abs(grid_v - true_eta.v)))
    labels, _ = ndimage.label(vals >= 0.5)
    du = np.diff(grid_u).mean() if grid_u.size > 1 else 0.0
    dv = np.diff(grid_v).mean() if grid_v.size > 1 else 0.0
    area = float(np.count_nonzero(labels == labels[i, j]) * du * dv) if labels[i, j] else 0.0
    return CorrelationPattern2D(grid_u=grid_u, grid_v=grid_v, values=vals, half_power_area=area,
                                width_u=half_power_width(grid_u, vals[:, j], i),
                                width_v=half_power_width(grid_v, vals[i, :], j),
                                peak_value=correlation_value(traj, true_eta, true_eta, cfg))


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r2: float


def scaling_fit(xs, ys, log_log: bool = True) -> FitResult:
    """Least-squares line through ``(log x, log y)`` (or the raw values)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.size < 2:
        raise ValueError("need at least two matching points")
    if log_log:
        if np.any(xs <= 0) or np.any(ys <= 0):
            raise ValueError("log-log fit needs positive data")
        xs, ys = np.log(xs), np.log(ys)
    fit = stats.linregress(xs, ys)
    return FitResult(slope=float(fit.slope), intercept=float(fit.intercept), r2=float(fit.rvalue ** 2))


def crossover_time(dim: str, M: int, cfg: SensingConfig) -> float:
    """Sensing time beyond which a moving antenna beats an ``M``-element array.

    Uses the large-N, large-M approximations; only the wavelength and speed
    limit of ``cfg`` matter.
    """
    dim = str(dim).lower()
    if M < 1:
        raise ValueError("M must be >= 1")
    scale = cfg.wavelength_m / cfg.max_speed_mps
    if dim == "1d":
        return M ** 1.5 / 2.0 * scale
    if dim == "2d":
        return math.pi * M / math.sqrt(6.0) * scale
    raise ValueError(f"dim must be '1d' or '2d', got {dim!r}")


@dataclass(frozen=True)
class CrossoverReport:
    threshold_s: float
    crossing_s: float
    verified_below: bool
    verified_above: bool

    @property
    def relative_gap(self) -> float:
        return abs(self.crossing_s - self.threshold_s) / self.threshold_s

    def to_dict(self) -> dict:
        return {"threshold_s": self.threshold_s, "crossing_s": self.crossing_s,
                "verified_below": self.verified_below, "verified_above": self.verified_above,
                "relative_gap": self.relative_gap}


def _exact_pair(dim: str, M: int, cfg: SensingConfig, n: int):
    c = cfg.replace(num_snapshots=n)
    if dim == "1d":
        ma = crb_time_constrained(c)
        fpa = crb_fpa_ula(M, c) if M >= 2 else math.inf
    else:
        ma = crb_circle(c) if n >= 3 else math.inf
        fpa = crb_fpa_upa(M, c) if M >= 4 else math.inf
    return ma, fpa


def verify_crossover(dim: str, M: int, cfg: SensingConfig, margin: float = 0.05) -> CrossoverReport:
    """Check the threshold against the exact (non-asymptotic) CRB expressions.

    ``verified_below``: at ``(1 + margin)`` times the threshold the moving
    antenna's CRB is lower. ``verified_above``: at ``(1 - margin)`` times it
    is higher. ``crossing_s`` is the first snapshot count (times ``T_s``) at
    which the exact curves cross.
    """
    dim = str(dim).lower()
    thr = crossover_time(dim, M, cfg)
    Ts = cfg.snapshot_interval_s

    def ma_wins(n):
        ma, fpa = _exact_pair(dim, M, cfg, n)
        return ma < fpa

    def n_at(t):
        return max(1, int(round(t / Ts)))

    below = ma_wins(n_at(thr * (1 + margin)))
    above = not ma_wins(n_at(thr * (1 - margin)))
    lo, hi = 1, max(n_at(thr), 2)
    while not ma_wins(hi):
        hi *= 2
    # the snapshot CRB ratio is monotone in N, so bisection finds the first win
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ma_wins(mid):
            hi = mid
        else:
            lo = mid
    if ma_wins(lo):
        hi = lo
    return CrossoverReport(threshold_s=thr, crossing_s=hi * Ts, verified_below=below,
                           verified_above=above)
