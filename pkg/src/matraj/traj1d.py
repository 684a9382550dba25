"""Globally optimal 1D trajectories, benchmarks and a grid-search oracle.

The CRB on a line is inversely proportional to the position variance, so
every routine here is really about maximizing ``var(x)`` under a speed limit
and a segment ``[0, A]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .crb import Regime, classify_regime
from .model import SensingConfig, Trajectory1D

__all__ = [
    "GroupSizes",
    "BenchmarkKind1D",
    "OracleResult",
    "group_sizes",
    "optimal_trajectory",
    "optimal_trajectory_tc",
    "optimal_trajectory_sc",
    "sc_variance",
    "tc_variance",
    "mirror",
    "benchmark_1d",
    "oracle_max_variance",
    "oracle_resolution_bound",
]


def _ceil_ratio(a: float, b: float) -> int:
    # ceil(a/b) that treats ratios within rounding of an integer as that integer
    r = a / b
    k = round(r)
    if abs(r - k) <= 1e-9 * max(1.0, abs(r)):
        return int(k)
    return math.ceil(r)


@dataclass(frozen=True)
class GroupSizes:
    n_left: int
    n_mid: int
    n_right: int

    @property
    def total(self) -> int:
        return self.n_left + self.n_mid + self.n_right


def group_sizes(cfg: SensingConfig) -> GroupSizes:
    """Sizes of the parked-left, full-speed and parked-right snapshot groups."""
    N = cfg.num_snapshots
    n_mid = _ceil_ratio(cfg.region.extent, cfg.step) - 1
    rest = N - n_mid
    return GroupSizes(n_left=(rest + 1) // 2, n_mid=n_mid, n_right=rest // 2)


def tc_variance(N: int, step: float) -> float:
    """Variance of an ``N``-point ramp with spacing ``step``."""
    return (N * N - 1) * step * step / 12.0


def sc_variance(cfg: SensingConfig) -> float:
    """Closed-form variance of the space-constrained optimum."""
    N = cfg.num_snapshots
    A, d = cfg.region.extent, cfg.step
    g = group_sizes(cfg)
    nm, nr = g.n_mid, g.n_right
    return (d * d * nm * (nm + 1) * (2 * nm + 1) / (6.0 * N)
            + A * A * nr / N
            - (0.5 * d * nm * (nm + 1) + nr * A) ** 2 / N ** 2)


def optimal_trajectory_tc(cfg: SensingConfig, x1: float = 0.0) -> Trajectory1D:
    """Full-speed ramp ``x_n = x1 + (n-1) * step``."""
    if classify_regime(cfg) is not Regime.TIME_CONSTRAINED:
        raise ValueError("segment too short for a full-speed ramp (space-constrained regime)")
    N, d, A = cfg.num_snapshots, cfg.step, cfg.region.extent
    slack = A - (N - 1) * d
    if not -1e-12 * max(A, d) <= x1 <= max(slack, 0.0) + 1e-12 * max(A, d):
        raise ValueError(f"x1={x1} outside [0, {slack}]")
    x = x1 + d * np.arange(N)
    v = np.full(N - 1, cfg.max_speed_mps)
    return Trajectory1D(x, v)


def optimal_trajectory_sc(cfg: SensingConfig) -> Trajectory1D:
    """Park, ramp at full speed, park: the optimum when ``A < (N-1) * step``."""
    if classify_regime(cfg) is not Regime.SPACE_CONSTRAINED:
        raise ValueError("segment admits a full-speed ramp (time-constrained regime)")
    N, d, A, Ts = cfg.num_snapshots, cfg.step, cfg.region.extent, cfg.snapshot_interval_s
    g = group_sizes(cfg)
    x = np.empty(N)
    x[: g.n_left] = 0.0
    x[g.n_left : N - g.n_right] = d * np.arange(1, g.n_mid + 1)
    x[N - g.n_right :] = A
    # velocity index n (1-based) moves x_n -> x_{n+1}
    v = np.zeros(N - 1)
    v[g.n_left - 1 : N - g.n_right - 1] = cfg.max_speed_mps
    v[N - g.n_right - 1] = (A - g.n_mid * d) / Ts
    return Trajectory1D(x, v)


def optimal_trajectory(cfg: SensingConfig, x1: float = 0.0) -> Trajectory1D:
    if classify_regime(cfg) is Regime.TIME_CONSTRAINED:
        return optimal_trajectory_tc(cfg, x1)
    return optimal_trajectory_sc(cfg)


def mirror(traj: Trajectory1D, cfg: SensingConfig) -> Trajectory1D:
    """Reflect about the segment center and run time backwards."""
    A = cfg.region.extent
    return Trajectory1D(A - traj.positions_m[::-1], traj.velocities_mps[::-1].copy())


class BenchmarkKind1D(str, enum.Enum):
    MOVE_FORWARD = "move_forward"
    BACK_AND_FORTH = "back_and_forth"


def benchmark_1d(kind, cfg: SensingConfig) -> Trajectory1D:
    """Reference trajectories: constant-speed sweep, or full-speed shuttling."""
    kind = BenchmarkKind1D(kind)
    N, Ts, A, vm = cfg.num_snapshots, cfg.snapshot_interval_s, cfg.region.extent, cfg.max_speed_mps
    if kind is BenchmarkKind1D.MOVE_FORWARD:
        speed = A / (Ts * N)
        if speed > vm * (1 + 1e-12):
            raise ValueError(f"sweep speed {speed} exceeds v_max={vm}")
        return Trajectory1D.from_velocities(0.0, np.full(N - 1, speed), Ts)

    d = cfg.step
    x = np.empty(N)
    x[0] = 0.0
    direction = 1.0
    snap = 1e-9 * d  # absorb rounding drift so turns land exactly on the ends
    for n in range(1, N):
        nxt = x[n - 1] + direction * d
        if nxt >= A - snap:
            nxt, direction = A, -1.0
        elif nxt <= snap:
            nxt, direction = 0.0, 1.0
        x[n] = nxt
    return Trajectory1D.from_positions(x, Ts)


@dataclass(frozen=True)
class OracleResult:
    positions: np.ndarray
    variance: float
    grid_step: float


def oracle_resolution_bound(cfg: SensingConfig, grid_points_per_delta: int) -> float:
    """Allowed closed-form vs grid-optimum gap, ``3 * A * (step / G) * N``."""
    return 3.0 * cfg.region.extent * (cfg.step / grid_points_per_delta) * cfg.num_snapshots


def oracle_max_variance(cfg: SensingConfig, grid_points_per_delta: int = 50,
                        monotone: bool = True, budget: int = 50_000_000) -> OracleResult:
    """Exact maximum of ``var(x)`` over trajectories on a uniform position grid.

    The grid is ``{0, h, 2h, ..., A}`` with ``h = A / (G * ceil(A / step))``, and
    consecutive positions may differ by at most ``step``. With
    ``monotone=True`` only nondecreasing paths are searched. Ties are broken
    towards the lexicographically smallest position vector.
    """
    N, A, d = cfg.num_snapshots, cfg.region.extent, cfg.step
    G = int(grid_points_per_delta)
    if G < 1:
        raise ValueError("grid_points_per_delta must be >= 1")
    if N == 1 or A == 0.0:
        return OracleResult(np.zeros(N), 0.0, 0.0)
    cells = G * _ceil_ratio(A, d)
    h = A / cells
    M = cells + 1
    max_step = int(math.floor(d / h + 1e-9))
    states = N * M * (N * (M - 1) + 1)
    if states > budget:
        raise ValueError(f"oracle search space {states} exceeds budget {budget}")

    V = kernels.dp_tables(M, N, max_step, monotone)
    p = np.arange(M)
    first = N * p * p + V[0, p, p]
    path = [int(np.argmax(first))]
    S = path[0]
    target = int(first[path[0]])
    for n in range(N - 1):
        cur = path[-1]
        lo = cur if monotone else max(cur - max_step, 0)
        hi = min(cur + max_step, M - 1)
        want = V[n, cur, S]
        for q in range(lo, hi + 1):
            if N * q * q + V[n + 1, q, S + q] == want:
                path.append(q)
                S += q
                break
        else:  # pragma: no cover - tables are self-consistent
            raise RuntimeError("oracle backtrack failed")
    idx = np.array(path)
    assert N * int(idx @ idx) - int(idx.sum()) ** 2 == target
    x = idx * h
    return OracleResult(x, float(np.var(x)), h)
