"""Shared fixtures: alternative encodings of OBDDs and random instances."""
import itertools
import random
import time
from contextlib import contextmanager

from symdecomp.obdd import Layer, Obdd, TruthTable, validate_obdd

CRITERIA_LINES: list[str] = []


@contextmanager
def criterion(number, title: str, bound_s: float):
    """Time a block and record one PASS/FAIL line for it."""
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        dt = time.perf_counter() - t0
        within = dt < bound_s
        status = "PASS" if ok and within else "FAIL"
        note = "" if within else f" (over the {bound_s:g} s bound)"
        line = f"criterion {number}: {status} {title} [{dt:.2f} s / {bound_s:g} s]{note}"
        CRITERIA_LINES.append(line)
        print(line)
    assert within, line


def tree_obdd(t: TruthTable) -> Obdd:
    """Unreduced decision tree: state at level i is the prefix read so far."""
    n = t.n
    layers = []
    for i in range(n):
        last = i == n - 1
        triples = []
        for q in range(1 << i):
            for a in (0, 1):
                r = 2 * q + a
                triples.append((q, a, t.bits[r] if last else r))
        layers.append(triples)
    return validate_obdd(layers, max(2, 1 << (n - 1)))


def relabel(d: Obdd, rng: random.Random, extra: int = 0) -> Obdd:
    """Permute state names at every internal level (and the accepting names
    at the last level), optionally widening the index range by ``extra``."""
    n = d.n
    w = d.width_bound + extra
    perms = []
    for i in range(n):
        if i == n - 1:
            nz = list(range(1, w))
            shuffled = nz[:]
            rng.shuffle(shuffled)
            perm = {0: 0, **dict(zip(nz, shuffled))}
        else:
            names = list(range(w))
            rng.shuffle(names)
            perm = dict(zip(range(w), names))
        perms.append(perm)
    layers = []
    for i, b in enumerate(d.layers):
        src = perms[i - 1] if i else {0: 0}
        layers.append([(src[q], a, perms[i][r]) for q, a, r in b.triples])
    return validate_obdd(layers, w)


def duplicate(d: Obdd, rng: random.Random) -> Obdd:
    """Split one reachable state into two copies sharing its outgoing edges."""
    n = d.n
    level = rng.randrange(1, n + 1)  # split a state in the image of layer ``level``
    im = sorted(d.layers[level - 1].im)
    q = rng.choice(im if level < n else [s for s in im if s] or im)
    if level == n and q == 0:
        return d
    fresh = d.width_bound
    w = fresh + 1
    layers = [list(b.triples) for b in d.layers]
    incoming = [j for j, (_, _, r) in enumerate(layers[level - 1]) if r == q]
    moved = incoming[: max(1, len(incoming) // 2)] if len(incoming) > 1 else []
    if not moved:
        return d
    for j in moved:
        s, a, _ = layers[level - 1][j]
        layers[level - 1][j] = (s, a, fresh)
    if level < n:
        layers[level] += [(fresh, a, r) for s, a, r in layers[level] if s == q]
    return validate_obdd(layers, w)


def all_tables(n: int):
    for bits in itertools.product((0, 1), repeat=1 << n):
        yield TruthTable(n, bytes(bits))


def random_layer(rng: random.Random, w: int, max_triples: int = 6) -> Layer:
    k = rng.randint(1, max_triples)
    return Layer((rng.randrange(w), rng.randrange(2), rng.randrange(w)) for _ in range(k))
