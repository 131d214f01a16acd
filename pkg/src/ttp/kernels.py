"""Hot numeric kernels, each in a numba and a pure-numpy flavour.

Every kernel works on 0-based arrays: tours are ``int64[n]`` rows whose first
entry is the depot (0), packing plans are ``bool[m]`` rows.  Both flavours do
the floating point work in the same order, so they return bit-identical
results and a solver run is reproducible regardless of the backend in use.

The backend is picked at import time.  Set ``TTP_BACKEND=numpy`` to force the
fallback (it is also used when numba is not importable).  :func:`use_backend`
swaps the module-level kernels temporarily, which is what the benchmark and
the cross-backend tests rely on.
"""

from __future__ import annotations

import contextlib
import os
from types import SimpleNamespace

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
    if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ:
        # skip probing TBB first; older system TBB builds only emit a warning
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

KERNEL_NAMES = (
    "speeds",
    "city_weights",
    "tour_times",
    "evaluate_pairs",
    "repair",
    "order_crossover",
    "reverse_segments",
    "two_opt",
)

# 2-opt moves must gain more than this to be applied; avoids float cycling.
TWO_OPT_EPS = 1e-10


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def _np_speeds(w, vmax, vmin, cap, drop):
    w = np.minimum(w, cap)
    if cap <= 0.0:
        return np.full(np.shape(w), vmax)
    v = vmax - w * drop
    v = np.maximum(v, vmin)
    return np.where(w >= cap, vmin, v)


def _np_city_weights(sels, item_w, item_city, n):
    out = np.zeros((sels.shape[0], n))
    for i in range(item_w.shape[0]):
        col = item_city[i]
        out[:, col] = out[:, col] + np.where(sels[:, i], item_w[i], 0.0)
    return out


def _np_tour_times(dist, perms, cw, vmax, vmin, cap, drop):
    k, n = perms.shape
    s = cw.shape[0]
    out = np.empty((k, s))
    if k == 0 or s == 0:
        return out
    nxt = np.roll(perms, -1, axis=1)
    for r in range(k):
        legs = dist[perms[r], nxt[r]]
        load = np.cumsum(cw[:, perms[r]], axis=1)
        v = _np_speeds(load, vmax, vmin, cap, drop)
        out[r] = np.cumsum(legs[None, :] / v, axis=1)[:, -1]
    return out


def _np_evaluate_pairs(dist, orders, sels, item_w, item_p, item_city, vmax, vmin, cap, drop):
    p, n = orders.shape
    m = item_w.shape[0]
    total_w = np.zeros(p)
    profit = np.zeros(p)
    for i in range(m):
        total_w = total_w + np.where(sels[:, i], item_w[i], 0.0)
        profit = profit + np.where(sels[:, i], item_p[i], 0.0)
    if p == 0:
        return total_w, profit, np.zeros(0)
    cw = _np_city_weights(sels, item_w, item_city, n)
    rows = np.arange(p)[:, None]
    load = np.cumsum(cw[rows, orders], axis=1)
    legs = dist[orders, np.roll(orders, -1, axis=1)]
    v = _np_speeds(load, vmax, vmin, cap, drop)
    time = np.cumsum(legs / v, axis=1)[:, -1]
    return total_w, profit, time


def _np_repair(sels, item_w, removal_order, cap):
    sels = sels.copy()
    p = sels.shape[0]
    wt = np.zeros(p)
    for i in range(item_w.shape[0]):
        wt = wt + np.where(sels[:, i], item_w[i], 0.0)
    removed = np.zeros_like(sels)
    for i in removal_order:
        hit = sels[:, i] & (wt > cap)
        wt[hit] -= item_w[i]
        sels[hit, i] = False
        removed[hit, i] = True
    for i in removal_order[::-1]:
        back = removed[:, i] & (wt + item_w[i] <= cap)
        wt[back] += item_w[i]
        sels[back, i] = True
    return sels


def _np_order_crossover(p1, p2, cut_a, cut_b):
    child = p1.copy()
    for c in range(p1.shape[0]):
        a, b = cut_a[c], cut_b[c]
        if b <= a:
            continue
        seg = p1[c, a:b]
        rest = np.roll(p2[c, 1:], -(b - 1))
        rest = rest[~np.isin(rest, seg)]
        body = np.empty(p1.shape[1] - 1, dtype=p1.dtype)
        body[a - 1 : b - 1] = seg
        free = np.concatenate((np.arange(b - 1, body.shape[0]), np.arange(0, a - 1)))
        body[free] = rest
        child[c, 1:] = body
    return child


def _np_reverse_segments(tours, seg_i, seg_j, do):
    out = tours.copy()
    for c in np.flatnonzero(do):
        i, j = seg_i[c], seg_j[c]
        out[c, i : j + 1] = tours[c, i : j + 1][::-1]
    return out


def _np_two_opt(dist, tour):
    tour = tour.copy()
    n = tour.shape[0]
    if n < 4:
        return tour
    ii, jj = np.triu_indices(n, k=1)
    keep = ii >= 1
    ii, jj = ii[keep], jj[keep]
    while True:
        a = tour[ii - 1]
        b = tour[ii]
        c = tour[jj]
        d = tour[(jj + 1) % n]
        gain = (dist[a, b] + dist[c, d]) - (dist[a, c] + dist[b, d])
        k = int(np.argmax(gain))
        if not gain[k] > TWO_OPT_EPS:
            return tour
        i, j = ii[k], jj[k]
        tour[i : j + 1] = tour[i : j + 1][::-1]


NUMPY = SimpleNamespace(
    name="numpy",
    speeds=_np_speeds,
    city_weights=_np_city_weights,
    tour_times=_np_tour_times,
    evaluate_pairs=_np_evaluate_pairs,
    repair=_np_repair,
    order_crossover=_np_order_crossover,
    reverse_segments=_np_reverse_segments,
    two_opt=_np_two_opt,
)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------


def _loop_speed(w, vmax, vmin, cap, drop):
    if cap <= 0.0:
        return vmax
    if w >= cap:
        return vmin
    v = vmax - w * drop
    if v < vmin:
        return vmin
    return v


def _build_numba():
    njit = numba.njit(cache=True, nogil=True)
    speed1 = njit(_loop_speed)

    @numba.njit(cache=True, nogil=True)
    def speeds(w, vmax, vmin, cap, drop):
        flat = w.ravel()
        out = np.empty(flat.shape[0])
        for k in range(flat.shape[0]):
            out[k] = speed1(flat[k], vmax, vmin, cap, drop)
        return out.reshape(w.shape)

    @numba.njit(cache=True, nogil=True)
    def city_weights(sels, item_w, item_city, n):
        s = sels.shape[0]
        out = np.zeros((s, n))
        for r in range(s):
            for i in range(item_w.shape[0]):
                if sels[r, i]:
                    out[r, item_city[i]] += item_w[i]
        return out

    @numba.njit(cache=True, nogil=True, parallel=True)
    def tour_times(dist, perms, cw, vmax, vmin, cap, drop):
        k, n = perms.shape
        s = cw.shape[0]
        out = np.empty((k, s))
        for r in numba.prange(k):
            for c in range(s):
                load = 0.0
                t = 0.0
                for pos in range(n):
                    a = perms[r, pos]
                    b = perms[r, (pos + 1) % n]
                    load += cw[c, a]
                    t += dist[a, b] / speed1(load, vmax, vmin, cap, drop)
                out[r, c] = t
        return out

    @numba.njit(cache=True, nogil=True)
    def evaluate_pairs(dist, orders, sels, item_w, item_p, item_city, vmax, vmin, cap, drop):
        p, n = orders.shape
        m = item_w.shape[0]
        total_w = np.zeros(p)
        profit = np.zeros(p)
        time = np.zeros(p)
        cw = np.zeros(n)
        for r in range(p):
            cw[:] = 0.0
            tw = 0.0
            tp = 0.0
            for i in range(m):
                if sels[r, i]:
                    tw += item_w[i]
                    tp += item_p[i]
                    cw[item_city[i]] += item_w[i]
            load = 0.0
            t = 0.0
            for pos in range(n):
                a = orders[r, pos]
                b = orders[r, (pos + 1) % n]
                load += cw[a]
                t += dist[a, b] / speed1(load, vmax, vmin, cap, drop)
            total_w[r] = tw
            profit[r] = tp
            time[r] = t
        return total_w, profit, time

    @numba.njit(cache=True, nogil=True)
    def repair(sels, item_w, removal_order, cap):
        out = sels.copy()
        p, m = sels.shape
        removed = np.zeros(m, dtype=np.bool_)
        for r in range(p):
            wt = 0.0
            for i in range(m):
                if out[r, i]:
                    wt += item_w[i]
            removed[:] = False
            for k in range(removal_order.shape[0]):
                i = removal_order[k]
                if out[r, i] and wt > cap:
                    wt -= item_w[i]
                    out[r, i] = False
                    removed[i] = True
            for k in range(removal_order.shape[0] - 1, -1, -1):
                i = removal_order[k]
                if removed[i] and wt + item_w[i] <= cap:
                    wt += item_w[i]
                    out[r, i] = True
        return out

    @numba.njit(cache=True, nogil=True)
    def order_crossover(p1, p2, cut_a, cut_b):
        p, n = p1.shape
        child = p1.copy()
        used = np.zeros(n, dtype=np.bool_)
        for c in range(p):
            a = cut_a[c]
            b = cut_b[c]
            if b <= a:
                continue
            used[:] = False
            for pos in range(a, b):
                used[p1[c, pos]] = True
            # fill the slots after the segment (wrapping over positions 1..n-1)
            # with the donor's cities in donor order, starting after the cut
            L = n - 1
            slot = b - 1
            for k in range(L):
                gene = p2[c, 1 + (b - 1 + k) % L]
                if used[gene]:
                    continue
                child[c, 1 + slot % L] = gene
                slot += 1
        return child

    @numba.njit(cache=True, nogil=True)
    def reverse_segments(tours, seg_i, seg_j, do):
        out = tours.copy()
        for c in range(tours.shape[0]):
            if not do[c]:
                continue
            i = seg_i[c]
            j = seg_j[c]
            while i < j:
                tmp = out[c, i]
                out[c, i] = out[c, j]
                out[c, j] = tmp
                i += 1
                j -= 1
        return out

    @numba.njit(cache=True, nogil=True)
    def two_opt(dist, tour):
        tour = tour.copy()
        n = tour.shape[0]
        if n < 4:
            return tour
        eps = 1e-10
        while True:
            best = eps
            bi = -1
            bj = -1
            for i in range(1, n):
                a = tour[i - 1]
                b = tour[i]
                for j in range(i + 1, n):
                    c = tour[j]
                    d = tour[(j + 1) % n]
                    gain = (dist[a, b] + dist[c, d]) - (dist[a, c] + dist[b, d])
                    if gain > best:
                        best = gain
                        bi = i
                        bj = j
            if bi < 0:
                return tour
            i = bi
            j = bj
            while i < j:
                tmp = tour[i]
                tour[i] = tour[j]
                tour[j] = tmp
                i += 1
                j -= 1

    return SimpleNamespace(
        name="numba",
        speeds=speeds,
        city_weights=city_weights,
        tour_times=tour_times,
        evaluate_pairs=evaluate_pairs,
        repair=repair,
        order_crossover=order_crossover,
        reverse_segments=reverse_segments,
        two_opt=two_opt,
    )


NUMBA = _build_numba() if HAVE_NUMBA else None


def get_backend(name: str) -> SimpleNamespace:
    if name == "numpy":
        return NUMPY
    if name == "numba":
        if NUMBA is None:
            raise RuntimeError("numba is not installed")
        return NUMBA
    raise ValueError(f"unknown kernel backend {name!r}")


def _install(ns: SimpleNamespace) -> None:
    g = globals()
    for key in KERNEL_NAMES:
        g[key] = getattr(ns, key)
    g["BACKEND"] = ns.name


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily route the module-level kernels to another backend."""
    previous = BACKEND
    _install(get_backend(name))
    try:
        yield
    finally:
        _install(get_backend(previous))


_wanted = os.environ.get("TTP_BACKEND", "numba").strip().lower()
BACKEND = "numpy" if (_wanted == "numpy" or NUMBA is None) else "numba"
_install(get_backend(BACKEND))
