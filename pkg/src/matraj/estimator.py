"""Grid-search maximum-likelihood AoA estimation and a Monte-Carlo MSE harness.

With a single unknown complex gain the likelihood is maximized by the AoA
that maximizes ``|y^H a(u)|^2``. The search runs on a coarse uniform grid
over ``[-1, 1]`` and then zooms in around the best point a few times.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .crb import crb_1d, crb_2d
from .model import SensingConfig, SpatialAoA, Trajectory1D, Trajectory2D, synthesize_received

__all__ = [
    "MleSettings",
    "MleEstimate",
    "MonteCarloResult",
    "mle_1d",
    "mle_2d",
    "monte_carlo",
    "FLAT_RTOL",
]

FLAT_RTOL = 1e-12
_E_CHUNK = 1 << 22


@dataclass(frozen=True)
class MleSettings:
    """Search and Monte-Carlo knobs.

    Attributes:
        coarse_grid_step: spacing of the first 1D grid in u-units.
        refine_levels: number of zoom passes, each 10x finer.
        trials: Monte-Carlo repetitions.
        seed: master seed; trial ``i`` uses the ``i``-th spawned child.
        coarse_grid_step_2d: spacing of the first planar grid, per axis.
        workers: threads used by ``monte_carlo``; results do not depend on it.
    """

    coarse_grid_step: float = 1e-3
    refine_levels: int = 3
    trials: int = 1000
    seed: int = 0
    coarse_grid_step_2d: float = 1e-2
    workers: int = 1

    def __post_init__(self):
        for name in ("coarse_grid_step", "coarse_grid_step_2d"):
            h = getattr(self, name)
            if not 0.0 < h <= 2.0:
                raise ValueError(f"{name} must lie in (0, 2]")
        if self.refine_levels < 0:
            raise ValueError("refine_levels must be >= 0")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def final_step(self, planar: bool = False) -> float:
        h = self.coarse_grid_step_2d if planar else self.coarse_grid_step
        return h / 10.0 ** self.refine_levels


@dataclass(frozen=True)
class MleEstimate:
    u: float
    v: float | None = None
    objective: float = 0.0
    flat_u: bool = False
    flat_v: bool = False

    @property
    def identifiable(self) -> bool:
        return not (self.flat_u or self.flat_v)


def _grid(lo: float, hi: float, step: float) -> tuple[float, int]:
    count = int(math.floor((hi - lo) / step * (1 + 1e-12))) + 1
    return lo, count


def _is_flat(values: np.ndarray) -> bool:
    top = float(values.max())
    return top <= 0.0 or (top - float(values.min())) <= FLAT_RTOL * top


def _search_1d(weights: np.ndarray, phase: np.ndarray, step: float, levels: int):
    u0, count = _grid(-1.0, 1.0, step)
    vals = kernels.scan_1d(weights, phase, u0, step, count)
    if _is_flat(vals):
        return -1.0, float(vals[0]), True
    k = int(np.argmax(vals))
    best, obj = u0 + k * step, float(vals[k])
    for _ in range(levels):
        prev, step = step, step / 10.0
        lo = max(-1.0, best - prev)
        hi = min(1.0, best + prev)
        lo, count = _grid(lo, hi, step)
        vals = kernels.scan_1d(weights, phase, lo, step, count)
        k = int(np.argmax(vals))
        if vals[k] >= obj:
            best, obj = lo + k * step, float(vals[k])
    return best, obj, False


def mle_1d(y, traj: Trajectory1D, cfg: SensingConfig, settings: MleSettings = MleSettings()) -> MleEstimate:
    """Maximize ``|y^H a(x, u)|^2`` over ``u`` in ``[-1, 1]``.

    Ties go to the smallest ``u``. A flat objective (zero aperture) returns
    ``u = -1`` with ``flat_u`` set.
    """
    y = np.asarray(y, dtype=complex)
    x = traj.positions_m
    if y.shape != x.shape:
        raise ValueError(f"received vector has shape {y.shape}, trajectory has {x.shape}")
    u, obj, flat = _search_1d(np.conj(y), cfg.wavenumber * x, settings.coarse_grid_step,
                              settings.refine_levels)
    return MleEstimate(u=u, objective=obj, flat_u=flat)


def _planar_values(wy: np.ndarray, px: np.ndarray, py: np.ndarray, us: np.ndarray, vs: np.ndarray):
    # |sum_n w_n e^{j px_n u} e^{j py_n v}|^2 on the outer grid us x vs
    out = np.zeros((us.size, vs.size), dtype=complex)
    step = max(1, _E_CHUNK // max(us.size + vs.size, 1))
    for n0 in range(0, wy.size, step):
        sl = slice(n0, n0 + step)
        left = wy[sl, None] * np.exp(1j * np.outer(px[sl], us))
        right = np.exp(1j * np.outer(py[sl], vs))
        out += left.T @ right
    return out.real ** 2 + out.imag ** 2


def mle_2d(y, traj: Trajectory2D, cfg: SensingConfig, settings: MleSettings = MleSettings()) -> MleEstimate:
    """Joint ``(u, v)`` search over ``[-1, 1]^2``.

    If one coordinate row is constant the other direction cosine cannot be
    identified; it is reported as ``-1`` with its flag set and the remaining
    one is found with the 1D search.
    """
    y = np.asarray(y, dtype=complex)
    r = traj.positions_m
    if y.shape != (r.shape[1],):
        raise ValueError(f"received vector has shape {y.shape}, trajectory has {r.shape[1]} points")
    k = cfg.wavenumber
    w = np.conj(y)
    const_x, const_y = np.ptp(r[0]) == 0.0, np.ptp(r[1]) == 0.0
    if const_x or const_y:
        # a constant row only adds a common phase, which the modulus discards
        if const_x and const_y:
            obj = float(abs(w.sum()) ** 2)
            return MleEstimate(u=-1.0, v=-1.0, objective=obj, flat_u=True, flat_v=True)
        row = 0 if const_y else 1
        est, obj, flat = _search_1d(w, k * r[row], settings.coarse_grid_step, settings.refine_levels)
        if row == 0:
            return MleEstimate(u=est, v=-1.0, objective=obj, flat_u=flat, flat_v=True)
        return MleEstimate(u=-1.0, v=est, objective=obj, flat_u=True, flat_v=flat)

    px, py = k * r[0], k * r[1]
    step = settings.coarse_grid_step_2d
    lo, count = _grid(-1.0, 1.0, step)
    axis = lo + step * np.arange(count)
    vals = _planar_values(w, px, py, axis, axis)
    if _is_flat(vals):
        return MleEstimate(u=-1.0, v=-1.0, objective=float(vals[0, 0]), flat_u=True, flat_v=True)
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    bu, bv, obj = axis[i], axis[j], float(vals[i, j])
    for _ in range(settings.refine_levels):
        prev, step = step, step / 10.0
        ulo, nu = _grid(max(-1.0, bu - prev), min(1.0, bu + prev), step)
        vlo, nv = _grid(max(-1.0, bv - prev), min(1.0, bv + prev), step)
        us = ulo + step * np.arange(nu)
        vs = vlo + step * np.arange(nv)
        vals = _planar_values(w, px, py, us, vs)
        i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
        if vals[i, j] >= obj:
            bu, bv, obj = us[i], vs[j], float(vals[i, j])
    return MleEstimate(u=float(bu), v=float(bv), objective=obj)


@dataclass
class MonteCarloResult:
    mse_u: float
    crb_u: float
    trials: int
    mse_v: float | None = None
    crb_v: float | None = None
    estimates: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"mse_u": self.mse_u, "crb_u": self.crb_u, "mse_v": self.mse_v,
                "crb_v": self.crb_v, "trials": self.trials}


def monte_carlo(traj, true_aoa: SpatialAoA, cfg: SensingConfig, settings: MleSettings = MleSettings(),
                keep_estimates: bool = False, beta_s: complex | None = None) -> MonteCarloResult:
    """Average squared MLE error over independent noise draws.

    Each trial seeds its own generator from ``SeedSequence(settings.seed)``,
    so the result does not depend on ``settings.workers``.
    """
    planar = isinstance(traj, Trajectory2D)
    if planar and true_aoa.v is None:
        raise ValueError("planar trajectory needs a (u, v) AoA")
    seeds = np.random.SeedSequence(settings.seed).spawn(settings.trials)

    def one(ss):
        y = synthesize_received(traj, true_aoa, cfg, beta_s=beta_s, rng_seed=ss)
        if planar:
            est = mle_2d(y, traj, cfg, settings)
            return est.u, est.v
        return mle_1d(y, traj, cfg, settings).u, math.nan

    if settings.workers > 1:
        with ThreadPoolExecutor(settings.workers) as pool:
            est = list(pool.map(one, seeds))
    else:
        est = [one(ss) for ss in seeds]
    est = np.array(est, dtype=float)
    err_u = (est[:, 0] - true_aoa.u) ** 2
    mse_u = math.fsum(err_u) / settings.trials
    if planar:
        rep = crb_2d(traj, cfg)
        mse_v = math.fsum((est[:, 1] - true_aoa.v) ** 2) / settings.trials
        return MonteCarloResult(mse_u=mse_u, crb_u=rep.crb_u, trials=settings.trials, mse_v=mse_v,
                                crb_v=rep.crb_v, estimates=est if keep_estimates else None)
    rep = crb_1d(traj, cfg)
    return MonteCarloResult(mse_u=mse_u, crb_u=rep.crb_u, trials=settings.trials,
                            estimates=est[:, 0] if keep_estimates else None)
