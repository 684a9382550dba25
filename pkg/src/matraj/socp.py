"""Small dense primal-dual interior-point solver for second-order cone programs.

Problems are posed in the standard inequality form::

    minimize    c^T x
    subject to  G x + s = h,   s in K

where ``K`` is a product of a nonnegative orthant of dimension ``l`` and
second-order cones ``{(t, w) : ||w||_2 <= t}`` of dimensions ``q[0], q[1], ...``.
The rows of ``G``/``h`` are ordered orthant first, then each cone in turn.

The iteration is an infeasible-start path-following method with
Nesterov-Todd scaling and a Mehrotra predictor-corrector step. The problems
this package produces have well under a thousand variables, so the Newton
systems are formed densely and factored with Cholesky.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

__all__ = ["ConeDims", "SocpResult", "SolverError", "solve_socp", "in_cone", "max_step"]


class SolverError(RuntimeError):
    """Raised when the interior-point iteration cannot make progress."""


@dataclass(frozen=True)
class ConeDims:
    l: int = 0
    q: tuple[int, ...] = ()

    def __post_init__(self):
        if self.l < 0 or any(m < 1 for m in self.q):
            raise ValueError("cone dimensions must be nonnegative / positive")
        object.__setattr__(self, "q", tuple(int(m) for m in self.q))

    @property
    def size(self) -> int:
        return self.l + sum(self.q)

    @property
    def degree(self) -> int:
        return self.l + len(self.q)

    def blocks(self):
        """Yield ``slice`` objects for every second-order cone block."""
        start = self.l
        for m in self.q:
            yield slice(start, start + m)
            start += m


@dataclass
class SocpResult:
    x: np.ndarray
    s: np.ndarray
    z: np.ndarray
    status: str
    iterations: int
    primal_objective: float
    dual_objective: float
    gap: float
    primal_residual: float
    dual_residual: float
    history: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def _identity(dims: ConeDims) -> np.ndarray:
    e = np.zeros(dims.size)
    e[: dims.l] = 1.0
    for blk in dims.blocks():
        e[blk.start] = 1.0
    return e


def _min_eig(u: np.ndarray, dims: ConeDims) -> float:
    vals = [np.inf]
    if dims.l:
        vals.append(u[: dims.l].min())
    for blk in dims.blocks():
        ub = u[blk]
        vals.append(ub[0] - np.linalg.norm(ub[1:]))
    return float(min(vals))


def in_cone(u, dims: ConeDims, tol: float = 0.0) -> bool:
    """Membership test ``u in K`` with an absolute slack of ``tol``."""
    return _min_eig(np.asarray(u, dtype=float), dims) >= -tol


def _soc_step(u: np.ndarray, d: np.ndarray) -> float:
    # smallest alpha > 0 with (u0 + a d0)^2 - ||u1 + a d1||^2 = 0
    c = u[0] ** 2 - u[1:] @ u[1:]
    b = u[0] * d[0] - u[1:] @ d[1:]
    a = d[0] ** 2 - d[1:] @ d[1:]
    if c <= 0.0:
        return 0.0
    scale = max(abs(a), abs(b), c)
    if abs(a) <= 1e-15 * scale:
        return -c / (2.0 * b) if b < 0 else np.inf
    disc = b * b - a * c
    if disc < 0.0:
        return np.inf
    q = -(b + np.copysign(np.sqrt(disc), b))
    roots = [r for r in (q / a, c / q if q != 0.0 else np.inf) if r > 0.0]
    return min(roots) if roots else np.inf


def max_step(u: np.ndarray, du: np.ndarray, dims: ConeDims) -> float:
    """Largest ``alpha >= 0`` keeping ``u + alpha * du`` inside ``K``."""
    alpha = np.inf
    if dims.l:
        ul, dl = u[: dims.l], du[: dims.l]
        neg = dl < 0
        if neg.any():
            alpha = min(alpha, float(np.min(-ul[neg] / dl[neg])))
    for blk in dims.blocks():
        alpha = min(alpha, _soc_step(u[blk], du[blk]))
    return alpha


def _soc_norm(u: np.ndarray) -> float:
    # sqrt(u0^2 - |u1|^2) in factored form to limit cancellation
    r = np.linalg.norm(u[1:])
    return float(np.sqrt(max((u[0] - r) * (u[0] + r), 0.0)))


class _Scaling:
    """Nesterov-Todd scaling point for a pair ``(s, z)`` in int K."""

    def __init__(self, s: np.ndarray, z: np.ndarray, dims: ConeDims):
        self.dims = dims
        l = dims.l
        self.d = np.sqrt(s[:l] / z[:l])
        self.socs = []
        lam = np.empty_like(s)
        lam[:l] = np.sqrt(s[:l] * z[:l])
        for blk in dims.blocks():
            sb, zb = s[blk], z[blk]
            sn, zn = _soc_norm(sb), _soc_norm(zb)
            if not (sn > 0.0 and zn > 0.0):
                raise SolverError("iterate left the cone interior")
            sbar, zbar = sb / sn, zb / zn
            gamma = np.sqrt(0.5 * (1.0 + sbar @ zbar))
            jz = zbar.copy()
            jz[1:] *= -1.0
            wbar = (sbar + jz) / (2.0 * gamma)
            beta = np.sqrt(sn / zn)
            self.socs.append((blk, beta, wbar))
            lam[blk] = self._apply_block(zb, beta, wbar, inverse=False)
        self.lam = lam

    @staticmethod
    def _apply_block(u, beta, wbar, inverse):
        # W = beta * [[w0, w1^T], [w1, I + w1 w1^T / (1 + w0)]],  W^-1 = J W J / beta^2
        w0, w1 = wbar[0], wbar[1:]
        sign = -1.0 if inverse else 1.0
        out = np.empty_like(u)
        t = w1 @ u[1:]
        out[0] = w0 * u[0] + sign * t
        out[1:] = sign * u[0] * w1 + u[1:] + (t / (1.0 + w0)) * w1
        return out / beta if inverse else beta * out

    def apply(self, u: np.ndarray, inverse: bool = False) -> np.ndarray:
        """Apply ``W`` (or ``W^-1``) to a vector or to every column of a matrix."""
        out = np.empty_like(u)
        l = self.dims.l
        if inverse:
            out[:l] = (u[:l].T / self.d).T
        else:
            out[:l] = (u[:l].T * self.d).T
        for blk, beta, wbar in self.socs:
            ub = u[blk]
            if ub.ndim == 1:
                out[blk] = self._apply_block(ub, beta, wbar, inverse)
            else:
                out[blk] = np.column_stack(
                    [self._apply_block(ub[:, j], beta, wbar, inverse) for j in range(ub.shape[1])]
                )
        return out


def _jordan_prod(u: np.ndarray, v: np.ndarray, dims: ConeDims) -> np.ndarray:
    out = np.empty_like(u)
    l = dims.l
    out[:l] = u[:l] * v[:l]
    for blk in dims.blocks():
        ub, vb = u[blk], v[blk]
        out[blk.start] = ub @ vb
        out[blk.start + 1 : blk.stop] = ub[0] * vb[1:] + vb[0] * ub[1:]
    return out


def _jordan_div(lam: np.ndarray, r: np.ndarray, dims: ConeDims) -> np.ndarray:
    """Solve ``lam o w = r`` for ``w``."""
    out = np.empty_like(r)
    l = dims.l
    out[:l] = r[:l] / lam[:l]
    for blk in dims.blocks():
        lb, rb = lam[blk], r[blk]
        det = lb[0] ** 2 - lb[1:] @ lb[1:]
        w0 = (lb[0] * rb[0] - lb[1:] @ rb[1:]) / det
        out[blk.start] = w0
        out[blk.start + 1 : blk.stop] = (rb[1:] - w0 * lb[1:]) / lb[0]
    return out


def _cholesky_solver(H: np.ndarray):
    n = H.shape[0]
    ridge = 0.0
    diag = max(float(np.max(np.abs(np.diag(H)))), 1e-300)
    for _ in range(8):
        try:
            factor = sla.cho_factor(H + ridge * np.eye(n), lower=True, check_finite=False)
            return lambda b: sla.cho_solve(factor, b, check_finite=False)
        except (np.linalg.LinAlgError, sla.LinAlgError):
            ridge = diag * 1e-14 if ridge == 0.0 else ridge * 100.0
    raise SolverError("Newton system is singular")


def solve_socp(c, G, h, dims: ConeDims, tol: float = 1e-8, max_iter: int = 100,
               record: bool = False) -> SocpResult:
    """Solve ``min c^T x  s.t.  G x + s = h, s in K``.

    Args:
        c: objective vector, shape ``(n,)``.
        G: constraint matrix, shape ``(m, n)`` with ``m == dims.size``.
        h: right-hand side, shape ``(m,)``.
        dims: cone layout of the rows.
        tol: tolerance on the relative primal/dual residuals and on the
            duality gap (absolute or relative, whichever is met first).
        max_iter: iteration cap; hitting it returns ``status='max_iter'``.
        record: keep per-iteration ``(gap, pres, dres)`` in ``history``.
    """
    c = np.asarray(c, dtype=float)
    G = np.asarray(G, dtype=float)
    h = np.asarray(h, dtype=float)
    m, n = G.shape
    if c.shape != (n,) or h.shape != (m,) or dims.size != m:
        raise ValueError("inconsistent problem dimensions")

    e = _identity(dims)
    resx0 = max(1.0, np.linalg.norm(c))
    resz0 = max(1.0, np.linalg.norm(h))

    # least-squares start, then push s and z into the interior
    x = np.linalg.lstsq(G.T @ G, G.T @ h - c, rcond=None)[0]
    s = h - G @ x
    z = -s.copy()
    for u in (s, z):
        a = -_min_eig(u, dims)
        if a >= -1e-8 * max(1.0, np.linalg.norm(u)):
            u += (1.0 + a) * e

    history = []
    status = "max_iter"
    it = 0
    pcost = dcost = gap = pres = dres = np.nan
    for it in range(max_iter + 1):
        rx = G.T @ z + c
        rz = G @ x + s - h
        gap = float(s @ z)
        pcost = float(c @ x)
        dcost = float(-h @ z)
        pres = np.linalg.norm(rz) / resz0
        dres = np.linalg.norm(rx) / resx0
        if record:
            history.append((gap, pres, dres))
        relgap = gap / max(abs(pcost), abs(dcost), 1e-300)
        if pres <= tol and dres <= tol and (gap <= tol or relgap <= tol):
            status = "optimal"
            break
        if it == max_iter:
            break
        if not np.all(np.isfinite(x)):
            status = "numerical"
            break

        try:
            W = _Scaling(s, z, dims)
            lam = W.lam
            Gs = W.apply(G, inverse=True)
            solve = _cholesky_solver(Gs.T @ Gs)
        except SolverError:
            status = "numerical"
            break

        def newton(bs):
            t = _jordan_div(lam, bs, dims)
            winv_bz = W.apply(-rz, inverse=True)
            dx = solve(-rx - Gs.T @ (t - winv_bz))
            dz_t = t - winv_bz + Gs @ dx
            dz = W.apply(dz_t, inverse=True)
            ds = -rz - G @ dx
            return dx, ds, dz, t - dz_t, dz_t

        mu = gap / dims.degree
        lamsq = _jordan_prod(lam, lam, dims)
        dx, ds, dz, ds_t, dz_t = newton(-lamsq)
        alpha = min(1.0, max_step(s, ds, dims), max_step(z, dz, dims))
        sigma = (1.0 - alpha) ** 3

        bs = -lamsq - _jordan_prod(ds_t, dz_t, dims) + sigma * mu * e
        dx, ds, dz, _, _ = newton(bs)
        alpha = min(1.0, 0.99 * min(max_step(s, ds, dims), max_step(z, dz, dims)))
        if alpha < 1e-12:
            status = "numerical"
            break
        x = x + alpha * dx
        s = s + alpha * ds
        z = z + alpha * dz

    return SocpResult(x=x, s=s, z=z, status=status, iterations=it,
                      primal_objective=pcost, dual_objective=dcost, gap=gap,
                      primal_residual=float(pres), dual_residual=float(dres),
                      history=history)
