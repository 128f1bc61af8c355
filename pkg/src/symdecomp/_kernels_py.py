"""Vectorised numpy versions of the table kernels.

Used when the compiled ``_kernels`` extension is not available.
"""
import numpy as np


def eval_all(trans):
    """Evaluate a dense layered transition array on every input.

    ``trans`` has shape ``(n, W, 2)``; entry ``[i, q, a]`` is the target of
    state ``q`` on bit ``a`` in layer ``i`` (or -1).  Returns a uint8 array of
    length ``2**n`` indexed with x_1 as the most significant bit.
    """
    trans = np.asarray(trans, dtype=np.int32)
    states = np.zeros(1, dtype=np.int32)
    for i in range(trans.shape[0]):
        states = trans[i][states].reshape(-1)
    if states.size and states.min() < 0:
        raise ValueError("run reached an undefined transition")
    return (states != 0).astype(np.uint8)


def residual_classes(table, n):
    """Residual class ids for every prefix length.

    Returns a list ``cls`` with ``cls[i]`` an int32 array of length ``2**i``;
    two prefixes share an id iff their residual functions coincide.  Ids are
    assigned in order of first occurrence over the prefixes, so they follow the
    lexicographically-first reaching string.
    """
    table = np.asarray(table, dtype=np.uint8)
    if table.size != 1 << n:
        raise ValueError("table size does not match arity")
    out = [None] * (n + 1)
    cur = _first_occurrence_ids(table.astype(np.int64))
    out[n] = cur
    for i in range(n - 1, -1, -1):
        count = int(cur.max()) + 1
        pairs = cur.reshape(-1, 2).astype(np.int64)
        cur = _first_occurrence_ids(pairs[:, 0] * count + pairs[:, 1])
        out[i] = cur
    return out


def _first_occurrence_ids(keys):
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int32)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size, dtype=np.int32)
    return rank[inverse.reshape(-1)]
