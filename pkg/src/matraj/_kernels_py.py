"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np

NEG = -(1 << 62)
_CHUNK_ELEMS = 1 << 22


def scan_1d(weights, phase, u0, du, count):
    """|sum_n w_n exp(j phase_n (u0 + k du))|^2 for k = 0..count-1."""
    weights = np.ascontiguousarray(weights, dtype=complex)
    phase = np.ascontiguousarray(phase, dtype=float)
    if phase.shape != weights.shape:
        raise ValueError("weights and phase lengths differ")
    out = np.empty(count)
    step = max(1, _CHUNK_ELEMS // max(weights.size, 1))
    for j0 in range(0, count, step):
        grid = u0 + du * np.arange(j0, min(j0 + step, count))
        acc = weights @ np.exp(1j * np.outer(phase, grid))
        out[j0 : j0 + grid.size] = acc.real ** 2 + acc.imag ** 2
    return out


def dp_tables(M, N, max_step, monotone):
    """Backward value tables; same contract as the compiled version."""
    smax = N * (M - 1)
    V = np.full((N, M, smax + 1), NEG, dtype=np.int64)
    S = np.arange(smax + 1)
    V[N - 1] = -(S * S)[None, :]
    p = np.arange(M)
    for n in range(N - 2, -1, -1):
        nxt = V[n + 1]
        best = np.full((M, smax + 1), NEG, dtype=np.int64)
        offsets = range(0, max_step + 1) if monotone else range(-max_step, max_step + 1)
        for d in offsets:
            q = p + d
            ok = (q >= 0) & (q < M)
            if not ok.any():
                continue
            pv, qv = p[ok], q[ok]
            cols = S[None, :] + qv[:, None]
            inside = cols <= smax
            vals = np.full(cols.shape, NEG, dtype=np.int64)
            rows = np.broadcast_to(qv[:, None], cols.shape)
            vals[inside] = nxt[rows[inside], cols[inside]]
            cand = np.where(vals == NEG, NEG, N * (qv * qv)[:, None] + vals)
            best[pv] = np.maximum(best[pv], cand)
        V[n] = best
    return V
