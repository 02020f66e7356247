"""Hot loops behind the characteristic matrix.

Each kernel exists in two flavours: a loop version compiled with numba and a
vectorised numpy version. ``equipartition_groups``, ``optimize_axis`` and
``dcov_sums`` are bound to whichever backend :mod:`gmic._backend` selected; both flavours stay
importable so they can be compared against each other.

Conventions shared by both flavours
-----------------------------------
``groups`` holds, for every point in ascending order along the axis being
cut, the dense id of its tie group (so it is nondecreasing). ``rows`` holds
the fixed row bin of the same point, in the same order. Mutual information is
in bits.
"""

import math

import numpy as np

from ._backend import USE_NUMBA, njit


def _equipartition_groups_py(sizes, k):
    # Greedy: close the open bin once it holds at least (unassigned points) /
    # (bins left); also close it when every remaining group must open a bin
    # of its own, so exactly k non-empty bins come out.
    n_groups = sizes.shape[0]
    total = 0
    for g in range(n_groups):
        total += sizes[g]
    out = np.empty(n_groups, dtype=np.int64)
    b = 0
    cur = 0
    assigned = 0
    for g in range(n_groups):
        out[g] = b
        cur += sizes[g]
        if b < k - 1:
            bins_left = k - b
            if cur * bins_left >= total - assigned or n_groups - g - 1 == bins_left - 1:
                assigned += cur
                cur = 0
                b += 1
    return out


def _xlog2x_table(n):
    m = np.arange(n + 1, dtype=np.float64)
    out = np.zeros(n + 1)
    out[1:] = m[1:] * np.log2(m[1:])
    return out


# ---------------------------------------------------------------- numba ----

_equipartition_groups_nb = njit(_equipartition_groups_py)


@njit
def _optimize_axis_nb(groups, rows, n_rows, max_cols, clump_factor):
    n = groups.shape[0]
    out = np.zeros(max_cols + 1)
    n_groups = groups[n - 1] + 1

    gsize = np.zeros(n_groups, dtype=np.int64)
    glabel = np.empty(n_groups, dtype=np.int64)
    for p in range(n):
        g = groups[p]
        if gsize[g] == 0:
            glabel[g] = rows[p]
        elif glabel[g] != rows[p]:
            glabel[g] = -1
        gsize[g] += 1

    clump = np.empty(n_groups, dtype=np.int64)
    T = 0
    for g in range(n_groups):
        if g == 0 or glabel[g] == -1 or glabel[g] != glabel[g - 1]:
            T += 1
        clump[g] = T - 1
    if T < 2:
        return out

    limit = clump_factor * max_cols
    if T > limit:
        csize = np.zeros(T, dtype=np.int64)
        for g in range(n_groups):
            csize[clump[g]] += gsize[g]
        merged = _equipartition_groups_nb(csize, limit)
        for g in range(n_groups):
            clump[g] = merged[clump[g]]
        T = limit

    xl = np.zeros(n + 1)
    for m in range(1, n + 1):
        xl[m] = m * math.log2(m)

    cum = np.zeros((T + 1, n_rows), dtype=np.int64)
    for p in range(n):
        cum[clump[groups[p]] + 1, rows[p]] += 1
    for t in range(1, T + 1):
        for r in range(n_rows):
            cum[t, r] += cum[t - 1, r]
    tot = np.zeros(T + 1, dtype=np.int64)
    for t in range(T + 1):
        for r in range(n_rows):
            tot[t] += cum[t, r]

    # Wt[t, s] = points in clumps s+1..t times the entropy of their row
    # labels; stored by t so the DP's inner loop over s is contiguous
    Wt = np.zeros((T + 1, T + 1))
    for t in range(1, T + 1):
        for s in range(t):
            acc = xl[tot[t] - tot[s]]
            for r in range(n_rows):
                acc -= xl[cum[t, r] - cum[s, r]]
            Wt[t, s] = acc

    top = min(max_cols, T)
    G = np.full((top + 1, T + 1), -np.inf)
    for t in range(1, T + 1):
        G[1, t] = -Wt[t, 0]
    for l in range(2, top + 1):
        prev = G[l - 1]
        for t in range(l, T + 1):
            w = Wt[t]
            best = -np.inf
            for s in range(l - 1, t):
                v = prev[s] - w[s]
                if v > best:
                    best = v
            G[l, t] = best

    hq = xl[n]
    for r in range(n_rows):
        hq -= xl[cum[T, r]]
    hq /= n
    for l in range(2, max_cols + 1):
        v = hq + G[min(l, top), T] / n
        out[l] = v if v > 0.0 else 0.0
    return out


# ---------------------------------------------------------------- numpy ----

def _optimize_axis_np(groups, rows, n_rows, max_cols, clump_factor):
    n = groups.shape[0]
    out = np.zeros(max_cols + 1)
    starts = np.concatenate(([0], np.flatnonzero(np.diff(groups)) + 1))
    gmin = np.minimum.reduceat(rows, starts)
    gmax = np.maximum.reduceat(rows, starts)
    glabel = np.where(gmin == gmax, gmin, -1)
    gsize = np.diff(np.append(starts, n))

    new = np.ones(glabel.shape[0], dtype=bool)
    new[1:] = (glabel[1:] == -1) | (glabel[1:] != glabel[:-1])
    clump = np.cumsum(new) - 1
    T = int(clump[-1]) + 1
    if T < 2:
        return out

    limit = clump_factor * max_cols
    if T > limit:
        csize = np.bincount(clump, weights=gsize, minlength=T).astype(np.int64)
        clump = _equipartition_groups_py(csize, limit)[clump]
        T = limit

    per_point = clump[groups]
    counts = np.bincount(per_point * n_rows + rows, minlength=T * n_rows).reshape(T, n_rows)
    cum = np.zeros((T + 1, n_rows), dtype=np.int64)
    np.cumsum(counts, axis=0, out=cum[1:])
    tot = cum.sum(axis=1)

    xl = _xlog2x_table(n)
    seg = cum[None, :, :] - cum[:, None, :]
    span = tot[None, :] - tot[:, None]
    upper = span > 0
    W = np.full((T + 1, T + 1), np.inf)
    W[upper] = xl[span[upper]] - xl[seg[upper]].sum(axis=-1)

    top = min(max_cols, T)
    G = -W[0].copy()
    best = np.empty(top + 1)
    best[1] = G[T]
    for l in range(2, top + 1):
        G = (G[:, None] - W).max(axis=0)
        best[l] = G[T]

    hq = (xl[n] - xl[cum[T]].sum()) / n
    ls = np.arange(2, max_cols + 1)
    out[2:] = np.maximum(hq + best[np.minimum(ls, top)] / n, 0.0)
    return out


@njit
def _axis_row_sums_nb(v):
    # sum_l |v_k - v_l| for every k, from sorted prefix sums
    n = v.shape[0]
    order = np.argsort(v, kind="mergesort")
    out = np.empty(n)
    total = 0.0
    for k in range(n):
        total += v[order[k]]
    prefix = 0.0
    for k in range(n):
        vk = v[order[k]]
        out[order[k]] = (2 * k - n) * vk + total - 2.0 * prefix
        prefix += vk
    return out


@njit
def _dcov_sums_nb(x, y):
    n = x.shape[0]
    ra = _axis_row_sums_nb(x) / n
    rb = _axis_row_sums_nb(y) / n
    ga = ra.mean()
    gb = rb.mean()
    sab = 0.0
    saa = 0.0
    sbb = 0.0
    for k in range(n):
        for l in range(n):
            a = abs(x[k] - x[l]) - ra[k] - ra[l] + ga
            b = abs(y[k] - y[l]) - rb[k] - rb[l] + gb
            sab += a * b
            saa += a * a
            sbb += b * b
    return sab, saa, sbb


def _dcov_sums_np(x, y):
    def centred(v):
        d = np.abs(v[:, None] - v[None, :])
        return d - d.mean(axis=1, keepdims=True) - d.mean(axis=0, keepdims=True) + d.mean()
    A = centred(x)
    B = centred(y)
    return float(np.sum(A * B)), float(np.sum(A * A)), float(np.sum(B * B))


if USE_NUMBA:
    equipartition_groups = _equipartition_groups_nb
    optimize_axis = _optimize_axis_nb
    dcov_sums = _dcov_sums_nb
else:
    equipartition_groups = _equipartition_groups_py
    optimize_axis = _optimize_axis_np
    dcov_sums = _dcov_sums_np
