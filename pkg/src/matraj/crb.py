"""Closed-form CRBs for movable-antenna trajectories and fixed-array baselines.

All bounds are on the spatial-frequency directions (``u``, ``v``) and are
dimensionless. The noise variance is one, so ``cfg.snr_linear`` is the
squared effective path gain.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .model import Region1D, SensingConfig, Trajectory1D, Trajectory2D

__all__ = [
    "Regime",
    "CrbReport",
    "crb_from_variance",
    "crb_1d",
    "crb_2d",
    "crb_fpa_ula",
    "crb_fpa_upa",
    "ula_variance",
    "ula_positions",
    "upa_positions",
    "crb_time_constrained",
    "crb_circle",
    "crb_circle_asymptotic",
    "classify_regime",
    "effective_variances",
]

# variances below (ZERO_VAR_RTOL * coordinate scale)^2 count as exactly zero
ZERO_VAR_RTOL = 1e-12


class Regime(str, enum.Enum):
    TIME_CONSTRAINED = "time_constrained"
    SPACE_CONSTRAINED = "space_constrained"


@dataclass(frozen=True)
class CrbReport:
    crb_u: float
    var_x: float
    effective_aperture_m: float
    crb_v: float | None = None
    var_y: float | None = None
    cov_xy: float | None = None
    regime: Regime | None = None
    aperture_y_m: float | None = None

    @property
    def crb_max(self) -> float:
        return self.crb_u if self.crb_v is None else max(self.crb_u, self.crb_v)

    def to_dict(self) -> dict:
        out = {
            "crb_u": self.crb_u,
            "var_x": self.var_x,
            "effective_aperture_m": self.effective_aperture_m,
        }
        if self.regime is not None:
            out["regime"] = self.regime.value
        if self.crb_v is not None:
            out.update(crb_v=self.crb_v, var_y=self.var_y, cov_xy=self.cov_xy,
                       aperture_y_m=self.aperture_y_m, crb_max=self.crb_max)
        return out


def _prefactor(cfg: SensingConfig) -> float:
    return cfg.noise_var * cfg.wavelength_m ** 2 / (8.0 * math.pi ** 2 * cfg.snr_linear * cfg.num_snapshots)


def crb_from_variance(var: float, cfg: SensingConfig, array_gain: int = 1) -> float:
    """``sigma^2 lambda^2 / (8 pi^2 SNR M N var)``, infinite for zero variance."""
    if var <= 0.0:
        return math.inf
    return _prefactor(cfg) / (array_gain * var)


def _is_zero_var(var: float, x: np.ndarray) -> bool:
    scale = float(np.max(np.abs(x), initial=0.0))
    return var <= (ZERO_VAR_RTOL * scale) ** 2


def _moments(x: np.ndarray, y: np.ndarray | None = None):
    xc = x - x.mean()
    vx = float(np.mean(xc * xc))
    if y is None:
        return vx
    yc = y - y.mean()
    return vx, float(np.mean(yc * yc)), float(np.mean(xc * yc))


def classify_regime(cfg: SensingConfig) -> Regime:
    """Time-constrained iff the segment fits a full-speed ramp, ``A >= (N-1) * step``."""
    A = cfg.region.extent
    need = (cfg.num_snapshots - 1) * cfg.step
    # relative slack absorbs rounding in step = v_max * T_s
    if A >= need * (1.0 - 1e-12):
        return Regime.TIME_CONSTRAINED
    return Regime.SPACE_CONSTRAINED


def crb_1d(traj: Trajectory1D, cfg: SensingConfig) -> CrbReport:
    x = traj.positions_m
    if x.size != cfg.num_snapshots:
        raise ValueError("trajectory length does not match config")
    var = _moments(x)
    if _is_zero_var(var, x):
        var = 0.0
    regime = classify_regime(cfg) if isinstance(cfg.region, Region1D) else None
    return CrbReport(crb_u=crb_from_variance(var, cfg), var_x=var,
                     effective_aperture_m=float(np.ptp(x)), regime=regime)


def effective_variances(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """``var(x) - cov^2/var(y)`` and ``var(y) - cov^2/var(x)``.

    A zero variance on one axis contributes no covariance correction to the
    other axis (the limit along trajectories pinned to a constant coordinate).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    vx, vy, cxy = _moments(x, y)
    zx, zy = _is_zero_var(vx, x), _is_zero_var(vy, y)
    if zx:
        vx = 0.0
    if zy:
        vy = 0.0
    if zx or zy:
        return vx, vy
    det = max(vx * vy - cxy * cxy, 0.0)
    return det / vy, det / vx


def crb_2d(traj: Trajectory2D, cfg: SensingConfig) -> CrbReport:
    x, y = traj.positions_m
    if x.size != cfg.num_snapshots:
        raise ValueError("trajectory length does not match config")
    eu, ev = effective_variances(x, y)
    vx, vy, cxy = _moments(x, y)
    return CrbReport(crb_u=crb_from_variance(eu, cfg), crb_v=crb_from_variance(ev, cfg),
                     var_x=vx, var_y=vy, cov_xy=cxy,
                     effective_aperture_m=float(np.ptp(x)), aperture_y_m=float(np.ptp(y)))


def ula_variance(M: int, wavelength_m: float) -> float:
    """Position variance of a half-wavelength ULA with ``M`` elements."""
    return (wavelength_m / 2.0) ** 2 * (M * M - 1) / 12.0


def ula_positions(M: int, wavelength_m: float) -> np.ndarray:
    return np.arange(M) * wavelength_m / 2.0


def upa_positions(M: int, wavelength_m: float) -> np.ndarray:
    """2 x M element coordinates of a sqrt(M) x sqrt(M) half-wavelength grid."""
    side = _square_side(M)
    gx, gy = np.meshgrid(np.arange(side), np.arange(side), indexing="xy")
    return np.vstack([gx.ravel(), gy.ravel()]) * wavelength_m / 2.0


def _square_side(M: int) -> int:
    side = math.isqrt(int(M))
    if side * side != M:
        raise ValueError(f"M={M} is not a perfect square")
    return side


def crb_fpa_ula(M: int, cfg: SensingConfig) -> float:
    """CRB of an ``M``-element half-wavelength ULA collecting ``N`` snapshots."""
    if int(M) != M or M < 2:
        raise ValueError(f"ULA needs an integer M >= 2, got {M}")
    return 6.0 * cfg.noise_var / (math.pi ** 2 * cfg.snr_linear * cfg.num_snapshots * M * (M * M - 1))


def crb_fpa_upa(M: int, cfg: SensingConfig) -> float:
    """Per-axis CRB of a sqrt(M) x sqrt(M) half-wavelength UPA (equal for u and v)."""
    if int(M) != M or M < 4:
        raise ValueError(f"UPA needs an integer M >= 4, got {M}")
    _square_side(int(M))
    return 6.0 * cfg.noise_var / (math.pi ** 2 * cfg.snr_linear * cfg.num_snapshots * M * (M - 1))


def crb_time_constrained(cfg: SensingConfig) -> float:
    """Minimum CRB of a full-speed ramp, ``3 lambda^2 / (2 pi^2 SNR step^2 N (N^2 - 1))``."""
    N = cfg.num_snapshots
    if N < 2:
        return math.inf
    return (3.0 * cfg.noise_var * cfg.wavelength_m ** 2
            / (2.0 * math.pi ** 2 * cfg.snr_linear * cfg.step ** 2 * N * (N * N - 1)))


def crb_circle(cfg: SensingConfig) -> float:
    """Per-axis CRB of the full-speed circular trajectory (``N >= 3``)."""
    N = cfg.num_snapshots
    if N < 3:
        raise ValueError("circular trajectory needs N >= 3")
    return (cfg.noise_var * cfg.wavelength_m ** 2 * math.sin(math.pi / N) ** 2
            / (math.pi ** 2 * cfg.snr_linear * cfg.step ** 2 * N))


def crb_circle_asymptotic(cfg: SensingConfig) -> float:
    """Large-N form of :func:`crb_circle`, ``lambda^2 / (SNR step^2 N^3)``."""
    N = cfg.num_snapshots
    return cfg.noise_var * cfg.wavelength_m ** 2 / (cfg.snr_linear * cfg.step ** 2 * N ** 3)
