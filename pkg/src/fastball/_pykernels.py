"""Pure-Python trade kernels.

Same functions and same random-draw order as the compiled ``_kernels``
module, so both backends agree bit for bit under a fixed seed. Used when the
extension is unavailable or ``FASTBALL_PURE_PYTHON`` is set.
"""

import numpy as np

from .rng import bounded, shuffle

BACKEND = "python"

FASTBALL = 0
CURVEBALL = 1


def _isect(a, b):
    x = y = k = 0
    na, nb = len(a), len(b)
    while x < na and y < nb:
        ea, eb = a[x], b[y]
        if ea == eb:
            k += 1
            x += 1
            y += 1
        elif ea < eb:
            x += 1
        else:
            y += 1
    return k


def _fastball_merge(a, b, v, stats=None):
    """Single sorted pass; ``stats`` (a dict) collects loop-step counts."""
    oi, oj = [], []
    outs = (oi, oj)
    x = y = c = 0
    na, nb, nv = len(a), len(b), len(v)
    steps = 0
    while x < na and y < nb:
        steps += 1
        ea, eb = a[x], b[y]
        if ea == eb:
            oi.append(ea)
            oj.append(eb)
            x += 1
            y += 1
        elif ea < eb:
            outs[v[c]].append(ea)
            x += 1
            c += 1
        else:
            outs[v[c]].append(eb)
            y += 1
            c += 1
    while x < na and c < nv:
        steps += 1
        outs[v[c]].append(a[x])
        x += 1
        c += 1
    while y < nb and c < nv:
        steps += 1
        outs[v[c]].append(b[y])
        y += 1
        c += 1
    if stats is not None:
        stats["steps"] = stats.get("steps", 0) + steps
    return oi, oj


def _fastball(a, b, bitgen):
    k = _isect(a, b)
    si = len(a) - k
    v = [0] * si + [1] * (len(b) - k)
    shuffle(bitgen, v)
    return _fastball_merge(a, b, v)


def _split(a, b):
    common, s = [], []
    x = y = 0
    na, nb = len(a), len(b)
    while x < na and y < nb:
        ea, eb = a[x], b[y]
        if ea == eb:
            common.append(ea)
            x += 1
            y += 1
        elif ea < eb:
            s.append(ea)
            x += 1
        else:
            s.append(eb)
            y += 1
    s.extend(a[x:])
    s.extend(b[y:])
    return common, s


def _curveball_fill(common, s, si):
    oi = common + s[:si]
    oj = common + s[si:]
    oi.sort()
    oj.sort()
    return oi, oj


def _curveball(a, b, bitgen):
    common, s = _split(a, b)
    shuffle(bitgen, s)
    return _curveball_fill(common, s, len(a) - len(common))


def _arr(x):
    return np.asarray(x, dtype=np.int64)


def intersection_size(a, b):
    return _isect(a.tolist(), b.tolist())


def fastball_core(a, b, v):
    oi, oj = _fastball_merge(a.tolist(), b.tolist(), v.tolist())
    return _arr(oi), _arr(oj)


def fastball_trade(a, b, bit_generator):
    oi, oj = _fastball(a.tolist(), b.tolist(), bit_generator)
    return _arr(oi), _arr(oj)


def curveball_core(a, b, s_order):
    common, _ = _split(a.tolist(), b.tolist())
    oi, oj = _curveball_fill(common, s_order.tolist(), len(a) - len(common))
    return _arr(oi), _arr(oj)


def curveball_trade(a, b, bit_generator):
    oi, oj = _curveball(a.tolist(), b.tolist(), bit_generator)
    return _arr(oi), _arr(oj)


def randomize(indptr, indices, trades, algorithm, bit_generator):
    """Apply ``trades`` random-pair trades to a CSR adjacency in place."""
    if trades <= 0:
        return
    n = len(indptr) - 1
    ptr = indptr.tolist()
    flat = indices.tolist()
    adj = [flat[ptr[i]:ptr[i + 1]] for i in range(n)]
    trade = _fastball if algorithm == FASTBALL else _curveball
    for _ in range(trades):
        i = bounded(bit_generator, n)
        j = bounded(bit_generator, n - 1)
        if j >= i:
            j += 1
        adj[i], adj[j] = trade(adj[i], adj[j], bit_generator)
    for i in range(n):
        indices[ptr[i]:ptr[i + 1]] = adj[i]


def project(indptr, indices):
    n = len(indptr) - 1
    ptr = indptr.tolist()
    flat = indices.tolist()
    adj = [flat[ptr[i]:ptr[i + 1]] for i in range(n)]
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        out[i, i] = len(adj[i])
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = _isect(adj[i], adj[j])
    return out
