"""Shot-loop kernels for the coincidence Monte Carlo.

Two interchangeable backends compute byte-identical tallies:

  * a numba @njit kernel (default when numba imports cleanly),
  * a vectorized pure-numpy fallback.

Selection: set LOOPCLUSTER_BACKEND=numpy or LOOPCLUSTER_BACKEND=numba.

Randomness is a counter-based hash keyed by (seed, global draw index), so
results do not depend on chunking or thread count. Draw layout per shot
(D = 3n + 4 draws): n emission, n background, n detection, then
post-selection, g2 decorrelation, outcome pattern, last-photon routing.
"""

from __future__ import annotations

import os

import numpy as np

_MASK = (1 << 64) - 1
_GOLD = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV53 = 2.0**-53


def _mix_int(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def seed_base(seed: int) -> int:
    """Per-run key derived from the user seed."""
    return _mix_int(_mix_int((seed & _MASK) + _GOLD) + _GOLD)


def _numpy_doubles(base: np.uint64, ctr: np.ndarray) -> np.ndarray:
    z = (np.uint64(base) ^ (ctr * np.uint64(_GOLD))).astype(np.uint64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)) * _INV53


def numpy_kernel(
    shot0,
    shots,
    n,
    open_mask,
    q_open,
    q_closed,
    p_bg,
    eta_d,
    p_success,
    p_decor,
    cdf,
    bin_ns,
    dead_ns,
    base,
    chunk=1 << 16,
):
    dim = 1 << n
    depth = 3 * n + 4
    counts = np.zeros(dim, dtype=np.int64)
    slot_prob = np.where(open_mask.astype(bool), q_open, q_closed)
    for c0 in range(0, shots, chunk):
        m = min(chunk, shots - c0)
        s = np.arange(shot0 + c0, shot0 + c0 + m, dtype=np.uint64)
        ctr = s[:, None] * np.uint64(depth) + np.arange(depth, dtype=np.uint64)[None, :]
        u = _numpy_doubles(base, ctr)
        u_emit = u[:, :n]
        u_bg = u[:, n : 2 * n]
        u_det = u[:, 2 * n : 3 * n]
        u_psel = u[:, 3 * n]
        u_decor = u[:, 3 * n + 1]
        u_pat = u[:, 3 * n + 2]
        u_route = u[:, 3 * n + 3]

        bg = u_bg < p_bg
        real = u_emit < slot_prob[None, :]
        filled = np.all(bg | real, axis=1)
        contaminated = np.any(bg, axis=1)
        ok = filled & (u_psel < p_success) & np.all(u_det < eta_d, axis=1)

        uniform = contaminated | (u_decor < p_decor)
        pat_u = np.minimum((u_pat * dim).astype(np.int64), dim - 1)
        pat_q = np.minimum(np.searchsorted(cdf, u_pat, side="right"), dim - 1)
        pattern = np.where(uniform, pat_u, pat_q)

        # dead-time pass over the deterministic arrival schedule
        idx = np.arange(m)
        last_hit = np.full((m, 2), -1e18)
        last_det = (u_route >= 0.5).astype(np.int64)
        last_bit = pattern & 1
        for j in range(n):
            if j < n - 1:
                det = (pattern >> (n - 1 - j)) & 1
                t = np.full(m, (j + 1) * bin_ns)
            else:
                det = last_det
                t = (n + last_bit) * bin_ns
            prev = last_hit[idx, det]
            registered = (t - prev) >= dead_ns
            ok &= registered
            upd = registered
            last_hit[idx[upd], det[upd]] = t[upd]
        counts += np.bincount(pattern[ok], minlength=dim)
    return counts


def _build_numba_kernel():
    import numba

    @numba.njit(cache=True)
    def kernel(
        shot0,
        shots,
        n,
        open_mask,
        q_open,
        q_closed,
        p_bg,
        eta_d,
        p_success,
        p_decor,
        cdf,
        bin_ns,
        dead_ns,
        base,
    ):
        dim = 1 << n
        depth = np.uint64(3 * n + 4)
        counts = np.zeros(dim, dtype=np.int64)
        gold = np.uint64(_GOLD)
        m1 = np.uint64(_MIX1)
        m2 = np.uint64(_MIX2)
        b = np.uint64(base)
        for s in range(shots):
            c0 = np.uint64(shot0 + s) * depth
            # draw d: counter-hash -> double in [0, 1)
            u = np.empty(3 * n + 4)
            for d in range(3 * n + 4):
                z = b ^ ((c0 + np.uint64(d)) * gold)
                z = (z ^ (z >> np.uint64(30))) * m1
                z = (z ^ (z >> np.uint64(27))) * m2
                z = z ^ (z >> np.uint64(31))
                u[d] = (z >> np.uint64(11)) * _INV53
            filled = True
            contaminated = False
            for j in range(n):
                is_bg = u[n + j] < p_bg
                prob = q_open if open_mask[j] else q_closed
                is_real = u[j] < prob
                if is_bg:
                    contaminated = True
                elif not is_real:
                    filled = False
            if not filled:
                continue
            if u[3 * n] >= p_success:
                continue
            detected = True
            for j in range(n):
                if u[2 * n + j] >= eta_d:
                    detected = False
            if not detected:
                continue
            if contaminated or u[3 * n + 1] < p_decor:
                pattern = int(u[3 * n + 2] * dim)
                if pattern > dim - 1:
                    pattern = dim - 1
            else:
                pattern = 0
                up = u[3 * n + 2]
                while pattern < dim - 1 and up >= cdf[pattern]:
                    pattern += 1
            last_bit = pattern & 1
            last_det = 1 if u[3 * n + 3] >= 0.5 else 0
            hit0 = -1e18
            hit1 = -1e18
            ok = True
            for j in range(n):
                if j < n - 1:
                    det = (pattern >> (n - 1 - j)) & 1
                    t = (j + 1) * bin_ns
                else:
                    det = last_det
                    t = (n + last_bit) * bin_ns
                prev = hit0 if det == 0 else hit1
                if t - prev < dead_ns:
                    ok = False
                else:
                    if det == 0:
                        hit0 = t
                    else:
                        hit1 = t
            if ok:
                counts[pattern] += 1
        return counts

    return kernel


_numba_kernel = None


def backend_name() -> str:
    forced = os.environ.get("LOOPCLUSTER_BACKEND", "").strip().lower()
    if forced in ("numpy", "numba"):
        return forced
    try:
        import numba  # noqa: F401

        return "numba"
    except ImportError:
        return "numpy"


def run_kernel(shot0, shots, n, open_mask, q_open, q_closed, p_bg, eta_d, p_success, p_decor, cdf, bin_ns, dead_ns, base):
    """Dispatch to the selected backend; tallies are backend-independent."""
    args = (
        shot0,
        shots,
        n,
        np.ascontiguousarray(open_mask, dtype=np.uint8),
        float(q_open),
        float(q_closed),
        float(p_bg),
        float(eta_d),
        float(p_success),
        float(p_decor),
        np.ascontiguousarray(cdf, dtype=np.float64),
        float(bin_ns),
        float(dead_ns),
        np.uint64(base),
    )
    if backend_name() == "numba":
        global _numba_kernel
        if _numba_kernel is None:
            _numba_kernel = _build_numba_kernel()
        return _numba_kernel(*args)
    return numpy_kernel(*args)
