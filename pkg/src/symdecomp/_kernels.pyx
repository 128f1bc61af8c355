# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled table kernels; see ``_kernels_py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def eval_all(trans):
    cdef const cnp.int32_t[:, :, ::1] t = np.ascontiguousarray(trans, dtype=np.int32)
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t size = (<Py_ssize_t>1) << n
    cdef cnp.ndarray[cnp.int32_t, ndim=1] a = np.zeros(size, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] b = np.zeros(size, dtype=np.int32)
    cdef cnp.int32_t[::1] cur = a
    cdef cnp.int32_t[::1] nxt = b
    cdef cnp.int32_t[::1] tmp
    cdef Py_ssize_t i, p, width = 1
    cdef int q, r0, r1
    for i in range(n):
        for p in range(width):
            q = cur[p]
            r0 = t[i, q, 0]
            r1 = t[i, q, 1]
            if r0 < 0 or r1 < 0:
                raise ValueError("run reached an undefined transition")
            nxt[2 * p] = r0
            nxt[2 * p + 1] = r1
        tmp = cur
        cur = nxt
        nxt = tmp
        width *= 2
    out = np.empty(size, dtype=np.uint8)
    cdef cnp.uint8_t[::1] o = out
    for p in range(size):
        o[p] = 1 if cur[p] != 0 else 0
    return out


def residual_classes(table, int n):
    cdef const cnp.uint8_t[::1] tab = np.ascontiguousarray(table, dtype=np.uint8)
    if tab.shape[0] != (<Py_ssize_t>1) << n:
        raise ValueError("table size does not match arity")
    out = [None] * (n + 1)
    cdef Py_ssize_t size = tab.shape[0], p
    cdef long long key
    cdef int nid, count
    cdef dict seen = {}
    cur_arr = np.empty(size, dtype=np.int32)
    cdef cnp.int32_t[::1] cur = cur_arr
    nid = 0
    for p in range(size):
        key = tab[p]
        v = seen.get(key)
        if v is None:
            seen[key] = nid
            cur[p] = nid
            nid += 1
        else:
            cur[p] = v
    out[n] = cur_arr
    cdef cnp.int32_t[::1] nxt
    for i in range(n - 1, -1, -1):
        count = nid
        size //= 2
        nxt_arr = np.empty(size, dtype=np.int32)
        nxt = nxt_arr
        seen = {}
        nid = 0
        for p in range(size):
            key = <long long>cur[2 * p] * count + cur[2 * p + 1]
            v = seen.get(key)
            if v is None:
                seen[key] = nid
                nxt[p] = nid
                nid += 1
            else:
                nxt[p] = v
        out[i] = nxt_arr
        cur = nxt
    return out
