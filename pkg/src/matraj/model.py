"""Shared domain types, trajectory kinematics and signal synthesis.

Positions are in meters, velocities in m/s and directions in spatial-frequency
units (``u = cos(theta)`` for a line, ``(u, v) = (sin(theta)cos(phi), cos(theta))``
for a plane). The noise variance is fixed to one, so the configured SNR is the
squared magnitude of the effective path gain.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Region1D",
    "Region2D",
    "SensingConfig",
    "Trajectory1D",
    "Trajectory2D",
    "SpatialAoA",
    "VarianceStats",
    "TrajectoryError",
    "steering_1d",
    "steering_2d",
    "synthesize_received",
    "variance_stats",
    "center",
]

KINEMATIC_RTOL = 1e-9


class TrajectoryError(ValueError):
    """A trajectory violates its kinematic or region constraints."""


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Region1D:
    length_m: float

    def __post_init__(self):
        if not (self.length_m >= 0 and math.isfinite(self.length_m)):
            raise ValueError(f"segment length must be finite and >= 0, got {self.length_m}")

    @property
    def extent(self) -> float:
        return float(self.length_m)


@dataclass(frozen=True)
class Region2D:
    """Axis-aligned rectangle ``[0, width] x [0, height]``."""

    width_m: float
    height_m: float

    def __post_init__(self):
        for name in ("width_m", "height_m"):
            val = getattr(self, name)
            if not (val >= 0 and math.isfinite(val)):
                raise ValueError(f"{name} must be finite and >= 0, got {val}")

    @property
    def extent(self) -> float:
        return float(max(self.width_m, self.height_m))

    @property
    def inscribed_radius(self) -> float:
        return 0.5 * min(self.width_m, self.height_m)

    def contains(self, points: np.ndarray, tol: float = 0.0) -> bool:
        pts = np.asarray(points, dtype=float)
        return bool(
            np.all(pts[0] >= -tol) and np.all(pts[0] <= self.width_m + tol)
            and np.all(pts[1] >= -tol) and np.all(pts[1] <= self.height_m + tol)
        )


Region = Union[Region1D, Region2D]


@dataclass(frozen=True)
class SensingConfig:
    wavelength_m: float
    snapshot_interval_s: float
    num_snapshots: int
    max_speed_mps: float
    snr_linear: float
    region: Region

    def __post_init__(self):
        for name in ("wavelength_m", "snapshot_interval_s", "max_speed_mps", "snr_linear"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and val > 0 and math.isfinite(val)):
                raise ValueError(f"{name} must be a positive finite number, got {val!r}")
        if int(self.num_snapshots) != self.num_snapshots or self.num_snapshots < 1:
            raise ValueError(f"num_snapshots must be a positive integer, got {self.num_snapshots!r}")
        object.__setattr__(self, "num_snapshots", int(self.num_snapshots))
        if not isinstance(self.region, (Region1D, Region2D)):
            raise TypeError("region must be Region1D or Region2D")

    @classmethod
    def from_time(cls, total_time_s: float, snapshot_interval_s: float, **kwargs) -> "SensingConfig":
        """Build a config whose snapshot count is ``round(T / T_s)``."""
        n = int(round(total_time_s / snapshot_interval_s))
        return cls(snapshot_interval_s=snapshot_interval_s, num_snapshots=max(n, 1), **kwargs)

    @property
    def step(self) -> float:
        """Largest displacement between consecutive snapshots (``v_max * T_s``)."""
        return self.max_speed_mps * self.snapshot_interval_s

    @property
    def total_time(self) -> float:
        return self.num_snapshots * self.snapshot_interval_s

    @property
    def noise_var(self) -> float:
        return 1.0

    @property
    def is_2d(self) -> bool:
        return isinstance(self.region, Region2D)

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength_m

    def replace(self, **changes) -> "SensingConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class SpatialAoA:
    u: float
    v: float | None = None

    def __post_init__(self):
        if not -1.0 <= self.u <= 1.0:
            raise ValueError(f"u must lie in [-1, 1], got {self.u}")
        if self.v is not None:
            if not -1.0 <= self.v <= 1.0:
                raise ValueError(f"v must lie in [-1, 1], got {self.v}")
            if self.u ** 2 + self.v ** 2 > 1.0 + 1e-12:
                raise ValueError("u^2 + v^2 must not exceed 1")

    @classmethod
    def from_angle(cls, theta: float) -> "SpatialAoA":
        """Line geometry: ``theta`` in radians measured from the segment axis."""
        return cls(float(np.clip(math.cos(theta), -1.0, 1.0)))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "SpatialAoA":
        """Planar geometry: elevation ``theta`` and azimuth ``phi`` in radians."""
        return cls(math.sin(theta) * math.cos(phi), math.cos(theta))

    @property
    def is_2d(self) -> bool:
        return self.v is not None

    def as_array(self) -> np.ndarray:
        return np.array([self.u] if self.v is None else [self.u, self.v])


@dataclass(frozen=True)
class Trajectory1D:
    positions_m: np.ndarray
    velocities_mps: np.ndarray

    def __post_init__(self):
        x = _frozen(self.positions_m)
        v = _frozen(self.velocities_mps)
        if x.ndim != 1 or v.ndim != 1 or v.size != max(x.size - 1, 0):
            raise ValueError("need N positions and N-1 velocities")
        object.__setattr__(self, "positions_m", x)
        object.__setattr__(self, "velocities_mps", v)

    @classmethod
    def from_velocities(cls, x1: float, velocities, snapshot_interval_s: float) -> "Trajectory1D":
        v = np.asarray(velocities, dtype=float)
        x = x1 + snapshot_interval_s * np.concatenate([[0.0], np.cumsum(v)])
        return cls(x, v)

    @classmethod
    def from_positions(cls, positions, snapshot_interval_s: float) -> "Trajectory1D":
        x = np.asarray(positions, dtype=float)
        return cls(x, np.diff(x) / snapshot_interval_s)

    def __len__(self):
        return self.positions_m.size

    def violations(self, cfg: SensingConfig, tol: float | None = None) -> list[str]:
        """List every violated invariant (empty when feasible)."""
        x, v = self.positions_m, self.velocities_mps
        A = cfg.region.extent
        atol = KINEMATIC_RTOL * max(A, cfg.step) if tol is None else tol
        out = []
        if x.size != cfg.num_snapshots:
            out.append(f"length {x.size} != N={cfg.num_snapshots}")
            return out
        if np.any(x < -atol) or np.any(x > A + atol):
            out.append("position outside [0, A]")
        if np.any(np.abs(v) > cfg.max_speed_mps * (1 + KINEMATIC_RTOL)):
            out.append("speed above v_max")
        rebuilt = x[0] + cfg.snapshot_interval_s * np.concatenate([[0.0], np.cumsum(v)])
        if np.max(np.abs(rebuilt - x), initial=0.0) > atol:
            out.append("positions inconsistent with velocities")
        return out

    def check(self, cfg: SensingConfig, tol: float | None = None) -> "Trajectory1D":
        bad = self.violations(cfg, tol)
        if bad:
            raise TrajectoryError("; ".join(bad))
        return self


@dataclass(frozen=True)
class Trajectory2D:
    positions_m: np.ndarray
    velocities_mps: np.ndarray

    def __post_init__(self):
        r = _frozen(self.positions_m)
        v = _frozen(self.velocities_mps)
        if r.ndim != 2 or r.shape[0] != 2 or v.shape != (2, max(r.shape[1] - 1, 0)):
            raise ValueError("need a 2 x N position matrix and 2 x (N-1) velocities")
        object.__setattr__(self, "positions_m", r)
        object.__setattr__(self, "velocities_mps", v)

    @classmethod
    def from_velocities(cls, r1, velocities, snapshot_interval_s: float) -> "Trajectory2D":
        v = np.asarray(velocities, dtype=float).reshape(2, -1)
        steps = np.concatenate([np.zeros((2, 1)), np.cumsum(v, axis=1)], axis=1)
        r = np.asarray(r1, dtype=float).reshape(2, 1) + snapshot_interval_s * steps
        return cls(r, v)

    @classmethod
    def from_positions(cls, positions, snapshot_interval_s: float) -> "Trajectory2D":
        r = np.asarray(positions, dtype=float)
        return cls(r, np.diff(r, axis=1) / snapshot_interval_s)

    @property
    def x(self) -> np.ndarray:
        return self.positions_m[0]

    @property
    def y(self) -> np.ndarray:
        return self.positions_m[1]

    def __len__(self):
        return self.positions_m.shape[1]

    def swapped(self) -> "Trajectory2D":
        return Trajectory2D(self.positions_m[::-1], self.velocities_mps[::-1])

    def violations(self, cfg: SensingConfig, tol: float | None = None) -> list[str]:
        r, v = self.positions_m, self.velocities_mps
        reg = cfg.region
        if not isinstance(reg, Region2D):
            return ["config region is not planar"]
        atol = KINEMATIC_RTOL * max(reg.extent, cfg.step) if tol is None else tol
        out = []
        if r.shape[1] != cfg.num_snapshots:
            return [f"length {r.shape[1]} != N={cfg.num_snapshots}"]
        if not reg.contains(r, atol):
            out.append("position outside region")
        if np.any(np.hypot(v[0], v[1]) > cfg.max_speed_mps * (1 + KINEMATIC_RTOL)):
            out.append("speed above v_max")
        steps = np.concatenate([np.zeros((2, 1)), np.cumsum(v, axis=1)], axis=1)
        rebuilt = r[:, :1] + cfg.snapshot_interval_s * steps
        if np.max(np.abs(rebuilt - r), initial=0.0) > atol:
            out.append("positions inconsistent with velocities")
        return out

    def check(self, cfg: SensingConfig, tol: float | None = None) -> "Trajectory2D":
        bad = self.violations(cfg, tol)
        if bad:
            raise TrajectoryError("; ".join(bad))
        return self


def center(x: np.ndarray) -> np.ndarray:
    """Apply the centering operator ``B = I/N - 11^T/N^2`` without forming it."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    return (x - x.mean(axis=-1, keepdims=True)) / n


def steering_1d(traj: Trajectory1D, aoa: SpatialAoA, cfg: SensingConfig) -> np.ndarray:
    x = traj.positions_m
    if x.size != cfg.num_snapshots:
        raise ValueError(f"trajectory has {x.size} snapshots, config expects {cfg.num_snapshots}")
    return np.exp(1j * cfg.wavenumber * x * aoa.u)


def steering_2d(traj: Trajectory2D, aoa: SpatialAoA, cfg: SensingConfig) -> np.ndarray:
    r = traj.positions_m
    if r.shape[1] != cfg.num_snapshots:
        raise ValueError(f"trajectory has {r.shape[1]} snapshots, config expects {cfg.num_snapshots}")
    if aoa.v is None:
        raise ValueError("planar steering needs both u and v")
    return np.exp(1j * cfg.wavenumber * (r[0] * aoa.u + r[1] * aoa.v))


def steering(traj, aoa: SpatialAoA, cfg: SensingConfig) -> np.ndarray:
    if isinstance(traj, Trajectory2D):
        return steering_2d(traj, aoa, cfg)
    return steering_1d(traj, aoa, cfg)


def synthesize_received(traj, aoa: SpatialAoA, cfg: SensingConfig, beta_s: complex | None = None,
                        rng_seed=0, noise_var: float | None = None) -> np.ndarray:
    """Draw ``y = beta_s * a + z`` with circular complex Gaussian noise.

    ``beta_s`` defaults to ``sqrt(cfg.snr_linear)`` (zero phase). ``noise_var``
    defaults to the unit noise floor of the config; pass ``0`` for a noiseless
    vector. ``rng_seed`` may be an integer, a ``SeedSequence`` or a ``Generator``.
    """
    a = steering(traj, aoa, cfg)
    if beta_s is None:
        beta_s = math.sqrt(cfg.snr_linear)
    sigma2 = cfg.noise_var if noise_var is None else float(noise_var)
    y = beta_s * a
    if sigma2 > 0:
        rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
        noise = rng.standard_normal((2, a.size)) * math.sqrt(sigma2 / 2.0)
        y = y + (noise[0] + 1j * noise[1])
    return y


@dataclass(frozen=True)
class VarianceStats:
    mean_x: float
    var_x: float
    mean_y: float | None = None
    var_y: float | None = None
    cov_xy: float | None = None
    xbx: float = float("nan")
    yby: float | None = None
    xby: float | None = None


def variance_stats(x, y=None) -> VarianceStats:
    """Population (1/N) moments, plus the same values via the centering quadratic forms."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("empty position vector")
    mx = float(x.mean())
    vx = float(np.mean((x - mx) ** 2))
    bx = center(x)
    if y is None:
        return VarianceStats(mean_x=mx, var_x=vx, xbx=float(x @ bx))
    y = np.asarray(y, dtype=float)
    if y.shape != x.shape:
        raise ValueError("x and y must have equal length")
    my = float(y.mean())
    vy = float(np.mean((y - my) ** 2))
    cxy = float(np.mean((x - mx) * (y - my)))
    return VarianceStats(mean_x=mx, var_x=vx, mean_y=my, var_y=vy, cov_xy=cxy,
                         xbx=float(x @ bx), yby=float(y @ center(y)), xby=float(y @ bx))
