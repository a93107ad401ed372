# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trade kernels.

Mirrors ``fastball._pykernels`` function for function. Callers pass
C-contiguous ``int64`` neighbour arrays that are already validated; nothing
here re-checks sortedness.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.stdint cimport int64_t, uint8_t, uint64_t
from libc.string cimport memcpy
from libcpp.algorithm cimport sort
from numpy.random cimport bitgen_t

import numpy as np

cdef extern from "_fbrand.h" nogil:
    uint64_t fb_bounded(bitgen_t *rng, uint64_t n)

BACKEND = "compiled"

cdef enum:
    FASTBALL = 0
    CURVEBALL = 1


cdef bitgen_t* _bitgen(object bit_generator) except NULL:
    return <bitgen_t*>PyCapsule_GetPointer(bit_generator.capsule, "BitGenerator")


cdef inline Py_ssize_t _isect(const int64_t* a, Py_ssize_t na,
                              const int64_t* b, Py_ssize_t nb) noexcept nogil:
    cdef Py_ssize_t x = 0, y = 0, k = 0
    cdef int64_t ea, eb
    while x < na and y < nb:
        ea = a[x]
        eb = b[y]
        k += ea == eb
        x += ea <= eb
        y += eb <= ea
    return k


cdef inline void _shuffle_u8(bitgen_t* rng, uint8_t* v, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t k, r
    cdef uint8_t t
    k = n - 1
    while k > 0:
        r = <Py_ssize_t>fb_bounded(rng, <uint64_t>(k + 1))
        t = v[k]
        v[k] = v[r]
        v[r] = t
        k -= 1


cdef inline void _shuffle_i64(bitgen_t* rng, int64_t* s, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t k, r
    cdef int64_t t
    k = n - 1
    while k > 0:
        r = <Py_ssize_t>fb_bounded(rng, <uint64_t>(k + 1))
        t = s[k]
        s[k] = s[r]
        s[r] = t
        k -= 1


cdef void _fastball_merge(const int64_t* a, Py_ssize_t na,
                          const int64_t* b, Py_ssize_t nb,
                          const uint8_t* v, Py_ssize_t nv,
                          int64_t* oi, int64_t* oj) noexcept nogil:
    # oi and oj need one slot of slack: every contested element is written
    # to both outputs and only the winner's cursor advances.
    cdef Py_ssize_t x = 0, y = 0, c = 0, pi = 0, pj = 0
    cdef int64_t ea, eb, e
    cdef Py_ssize_t lt, side
    while x < na and y < nb:
        ea = a[x]
        eb = b[y]
        if ea == eb:
            oi[pi] = ea
            oj[pj] = ea
            pi += 1
            pj += 1
            x += 1
            y += 1
        else:
            lt = ea < eb
            e = ea if lt else eb
            side = v[c]
            oi[pi] = e
            oj[pj] = e
            pi += 1 - side
            pj += side
            x += lt
            y += 1 - lt
            c += 1
    while x < na and c < nv:
        e = a[x]
        oi[pi] = e
        oj[pj] = e
        side = v[c]
        pi += 1 - side
        pj += side
        x += 1
        c += 1
    while y < nb and c < nv:
        e = b[y]
        oi[pi] = e
        oj[pj] = e
        side = v[c]
        pi += 1 - side
        pj += side
        y += 1
        c += 1


cdef void _fastball(bitgen_t* rng,
                    const int64_t* a, Py_ssize_t na,
                    const int64_t* b, Py_ssize_t nb,
                    uint8_t* v, int64_t* oi, int64_t* oj) noexcept nogil:
    cdef Py_ssize_t k = _isect(a, na, b, nb)
    cdef Py_ssize_t si = na - k, nv = na + nb - 2 * k, t
    for t in range(si):
        v[t] = 0
    for t in range(si, nv):
        v[t] = 1
    _shuffle_u8(rng, v, nv)
    _fastball_merge(a, na, b, nb, v, nv, oi, oj)


cdef Py_ssize_t _split(const int64_t* a, Py_ssize_t na,
                       const int64_t* b, Py_ssize_t nb,
                       int64_t* common, int64_t* s) noexcept nogil:
    # Intersection into ``common``, symmetric difference (sorted) into ``s``.
    cdef Py_ssize_t x = 0, y = 0, k = 0, q = 0
    cdef int64_t ea, eb
    while x < na and y < nb:
        ea = a[x]
        eb = b[y]
        if ea == eb:
            common[k] = ea
            k += 1
            x += 1
            y += 1
        elif ea < eb:
            s[q] = ea
            q += 1
            x += 1
        else:
            s[q] = eb
            q += 1
            y += 1
    while x < na:
        s[q] = a[x]
        q += 1
        x += 1
    while y < nb:
        s[q] = b[y]
        q += 1
        y += 1
    return k


cdef void _curveball_fill(const int64_t* common, Py_ssize_t k,
                          const int64_t* s, Py_ssize_t si, Py_ssize_t sj,
                          int64_t* oi, int64_t* oj) noexcept nogil:
    if k:
        memcpy(oi, common, k * sizeof(int64_t))
        memcpy(oj, common, k * sizeof(int64_t))
    if si:
        memcpy(oi + k, s, si * sizeof(int64_t))
    if sj:
        memcpy(oj + k, s + si, sj * sizeof(int64_t))
    sort(oi, oi + k + si)
    sort(oj, oj + k + sj)


cdef void _curveball(bitgen_t* rng,
                     const int64_t* a, Py_ssize_t na,
                     const int64_t* b, Py_ssize_t nb,
                     int64_t* common, int64_t* s,
                     int64_t* oi, int64_t* oj) noexcept nogil:
    cdef Py_ssize_t k = _split(a, na, b, nb, common, s)
    _shuffle_i64(rng, s, na + nb - 2 * k)
    _curveball_fill(common, k, s, na - k, nb - k, oi, oj)


def intersection_size(const int64_t[::1] a, const int64_t[::1] b):
    return _isect(&a[0] if a.shape[0] else NULL, a.shape[0],
                  &b[0] if b.shape[0] else NULL, b.shape[0])


def fastball_core(const int64_t[::1] a, const int64_t[::1] b, const uint8_t[::1] v):
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0]
    out_i = np.empty(na + 1, dtype=np.int64)
    out_j = np.empty(nb + 1, dtype=np.int64)
    cdef int64_t[::1] oi = out_i, oj = out_j
    _fastball_merge(&a[0] if na else NULL, na, &b[0] if nb else NULL, nb,
                    &v[0] if v.shape[0] else NULL, v.shape[0], &oi[0], &oj[0])
    return out_i[:na], out_j[:nb]


def fastball_trade(const int64_t[::1] a, const int64_t[::1] b, object bit_generator):
    cdef bitgen_t* rng = _bitgen(bit_generator)
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0]
    out_i = np.empty(na + 1, dtype=np.int64)
    out_j = np.empty(nb + 1, dtype=np.int64)
    vbuf = np.empty(na + nb + 1, dtype=np.uint8)
    cdef int64_t[::1] oi = out_i, oj = out_j
    cdef uint8_t[::1] v = vbuf
    _fastball(rng, &a[0] if na else NULL, na, &b[0] if nb else NULL, nb,
              &v[0], &oi[0], &oj[0])
    return out_i[:na], out_j[:nb]


def curveball_core(const int64_t[::1] a, const int64_t[::1] b, const int64_t[::1] s_order):
    """Curveball placement for an already shuffled symmetric difference."""
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0]
    common_buf = np.empty(min(na, nb) + 1, dtype=np.int64)
    s_buf = np.empty(na + nb + 1, dtype=np.int64)
    out_i = np.empty(na + 1, dtype=np.int64)
    out_j = np.empty(nb + 1, dtype=np.int64)
    cdef int64_t[::1] common = common_buf, s = s_buf, oi = out_i, oj = out_j
    cdef Py_ssize_t k = _split(&a[0] if na else NULL, na, &b[0] if nb else NULL, nb,
                               &common[0], &s[0])
    _curveball_fill(&common[0], k, &s_order[0] if s_order.shape[0] else NULL,
                    na - k, nb - k, &oi[0], &oj[0])
    return out_i[:na], out_j[:nb]


def curveball_trade(const int64_t[::1] a, const int64_t[::1] b, object bit_generator):
    cdef bitgen_t* rng = _bitgen(bit_generator)
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0]
    common_buf = np.empty(min(na, nb) + 1, dtype=np.int64)
    s_buf = np.empty(na + nb + 1, dtype=np.int64)
    out_i = np.empty(na + 1, dtype=np.int64)
    out_j = np.empty(nb + 1, dtype=np.int64)
    cdef int64_t[::1] common = common_buf, s = s_buf, oi = out_i, oj = out_j
    _curveball(rng, &a[0] if na else NULL, na, &b[0] if nb else NULL, nb,
               &common[0], &s[0], &oi[0], &oj[0])
    return out_i[:na], out_j[:nb]


def randomize(const int64_t[::1] indptr, int64_t[::1] indices, Py_ssize_t trades,
              int algorithm, object bit_generator):
    """Apply ``trades`` random-pair trades to a CSR adjacency in place."""
    cdef bitgen_t* rng = _bitgen(bit_generator)
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t t, i, j, na, nb, maxdeg = 0, d
    if trades <= 0:
        return
    for i in range(n):
        d = indptr[i + 1] - indptr[i]
        if d > maxdeg:
            maxdeg = d
    # Scratch is sized once per call and reused by every trade.
    oi_buf = np.empty(maxdeg + 1, dtype=np.int64)
    oj_buf = np.empty(maxdeg + 1, dtype=np.int64)
    common_buf = np.empty(maxdeg + 1, dtype=np.int64)
    s_buf = np.empty(2 * maxdeg + 1, dtype=np.int64)
    v_buf = np.empty(2 * maxdeg + 1, dtype=np.uint8)
    cdef int64_t[::1] oi = oi_buf, oj = oj_buf, common = common_buf, s = s_buf
    cdef uint8_t[::1] v = v_buf
    cdef int64_t* base = &indices[0] if indices.shape[0] else &oi[0]
    cdef int64_t* pa
    cdef int64_t* pb
    with nogil:
        for t in range(trades):
            i = <Py_ssize_t>fb_bounded(rng, <uint64_t>n)
            j = <Py_ssize_t>fb_bounded(rng, <uint64_t>(n - 1))
            if j >= i:
                j += 1
            pa = base + indptr[i]
            na = indptr[i + 1] - indptr[i]
            pb = base + indptr[j]
            nb = indptr[j + 1] - indptr[j]
            if algorithm == FASTBALL:
                _fastball(rng, pa, na, pb, nb, &v[0], &oi[0], &oj[0])
            else:
                _curveball(rng, pa, na, pb, nb, &common[0], &s[0], &oi[0], &oj[0])
            if na:
                memcpy(pa, &oi[0], na * sizeof(int64_t))
            if nb:
                memcpy(pb, &oj[0], nb * sizeof(int64_t))


def project(const int64_t[::1] indptr, const int64_t[::1] indices):
    """Co-occurrence counts between every pair of top nodes."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.zeros((n, n), dtype=np.int64)
    cdef int64_t[:, ::1] w = out
    cdef Py_ssize_t i, j
    cdef int64_t k
    cdef const int64_t* base = &indices[0] if indices.shape[0] else NULL
    with nogil:
        for i in range(n):
            w[i, i] = indptr[i + 1] - indptr[i]
            for j in range(i + 1, n):
                k = _isect(base + indptr[i], indptr[i + 1] - indptr[i],
                           base + indptr[j], indptr[j + 1] - indptr[j])
                w[i, j] = k
                w[j, i] = k
    return out
