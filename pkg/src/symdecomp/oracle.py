"""Brute-force ground truth for small instances.

Nothing here goes through the automaton machinery: OBDDs are enumerated
layer by layer, functions are bitmasks over the truth table and widths
come from counting residual functions directly.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import random
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial
from typing import Iterator, Optional, Sequence

import numpy as np

from .automata import ValidityNfa, accepts, shared_step_memo
from .circuit import Circuit, enumerate_circuits, format_circuit, gate_functions
from .errors import InvalidParameters, ResourceLimit
from .obdd import Obdd, TruthTable, evaluate, layer_from_targets, obdd_from_table

ENUM_MAX_W = 3
ENUM_MAX_N = 4
ENUM_LIMIT = 2_000_000
TUPLE_LIMIT = 20_000_000
ORACLE_MAX_N = 12


# --------------------------------------------------------------------------
# Enumeration


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


def count_obdds(w: int, n: int) -> int:
    """Number of valid OBDDs of width at most ``w`` and length ``n``.

    A layer whose domain has ``s`` states picks an image of ``t`` states
    (``C(w, t)`` ways) and a surjection of its ``2s`` transitions onto it.
    """

    @lru_cache(maxsize=None)
    def rest(s: int, left: int) -> int:
        if left == 0:
            return 1
        return sum(
            comb(w, t) * factorial(t) * _stirling2(2 * s, t) * rest(t, left - 1)
            for t in range(1, min(w, 2 * s) + 1)
        )

    return rest(1, n)


def enumerate_obdds(w: int, n: int, *, limit: int = ENUM_LIMIT) -> Iterator[Obdd]:
    """Every valid OBDD of width at most ``w`` and length ``n``, once each.

    Layers are ordered by their sorted triple lists and OBDDs
    lexicographically by layer.
    """
    if w < 1 or n < 1:
        raise InvalidParameters("need w >= 1 and n >= 1")
    if w > ENUM_MAX_W or n > ENUM_MAX_N:
        raise ResourceLimit(f"enumeration is limited to w <= {ENUM_MAX_W}, n <= {ENUM_MAX_N}")
    total = count_obdds(w, n)
    if total > limit:
        raise ResourceLimit(f"{total} OBDDs exceed the enumeration limit {limit}")

    def rec(dom: tuple[int, ...], prefix: list) -> Iterator[Obdd]:
        for targets in itertools.product(range(w), repeat=2 * len(dom)):
            layer = layer_from_targets(dom, targets)
            prefix.append(layer)
            if len(prefix) == n:
                yield Obdd(tuple(prefix), w)
            else:
                yield from rec(tuple(sorted(set(targets))), prefix)
            prefix.pop()

    yield from rec((0,), [])


# --------------------------------------------------------------------------
# Functions as bitmasks (bit i = value on the input with binary expansion i,
# x_1 most significant)


def obdd_mask(d: Obdd) -> int:
    mask = 0
    for i, x in enumerate(itertools.product((0, 1), repeat=d.n)):
        if evaluate(d, x):
            mask |= 1 << i
    return mask


def table_mask(t: TruthTable) -> int:
    return sum(1 << i for i, v in enumerate(t.bits) if v)


def mask_table(mask: int, n: int) -> TruthTable:
    return TruthTable(n, bytes((mask >> i) & 1 for i in range(1 << n)))


@dataclass(frozen=True)
class WidthProfile:
    profile: tuple[int, ...]

    @property
    def maximum(self) -> int:
        return max(self.profile) if self.profile else 1


def min_width_oracle(f: TruthTable) -> WidthProfile:
    """Distinct residual functions after fixing the first ``i`` bits, ``i = 1..n``."""
    n = f.n
    if n > ORACLE_MAX_N:
        raise ResourceLimit(f"residual counting is limited to n <= {ORACLE_MAX_N}")
    bits = f.bits
    prof = []
    for i in range(1, n + 1):
        size = 1 << (n - i)
        prof.append(len({bits[j : j + size] for j in range(0, 1 << n, size)}))
    return WidthProfile(tuple(prof))


@lru_cache(maxsize=8)
def _width_lookup(n: int) -> np.ndarray:
    """Canonical width of every function on ``n`` bits, indexed by bitmask."""
    if n > 4:
        raise ResourceLimit("width lookup tables are limited to n <= 4")
    out = np.empty(1 << (1 << n), dtype=np.int64)
    for mask in range(len(out)):
        out[mask] = min_width_oracle(mask_table(mask, n)).maximum
    return out


def _mask_width(mask: int, n: int) -> int:
    return min_width_oracle(mask_table(mask, n)).maximum


# --------------------------------------------------------------------------
# Brute-force decomposition


def _class_width(a, p: int) -> int:
    if isinstance(a, ValidityNfa):
        return a.w
    wa = a.widths[0] if a.widths and a.widths[0] is not None else p
    return wa


def _representatives(p: int, n: int) -> list[tuple[int, Obdd]]:
    """First OBDD (in enumeration order) for each function of width <= p."""
    return list(_reps_cached(p, n))


@lru_cache(maxsize=32)
def _reps_cached(p: int, n: int) -> tuple[tuple[int, Obdd], ...]:
    seen: dict[int, Obdd] = {}
    for d in enumerate_obdds(p, n):
        m = obdd_mask(d)
        if m not in seen:
            seen[m] = d
    return tuple(seen.items())


def _class_masks(a, p: int, n: int) -> set[int]:
    """Functions computed by some OBDD the class automaton accepts."""
    wa = _class_width(a, p)
    return {obdd_mask(d) for d in enumerate_obdds(min(wa, ENUM_MAX_W), n) if accepts(a, d)}


def _candidates(inst, n: int) -> list[list[tuple[int, Obdd]]]:
    from .reconfig import literal_class

    classes = inst.class_automata()
    out = []
    if inst.syntactic_class:
        for a in classes:
            lit = literal_class(a, inst.p)
            out.append([(obdd_mask(d), d) for d in enumerate_obdds(inst.p, n) if accepts(lit, d)])
        return out
    reps = _representatives(inst.p, n)
    for a in classes:
        if isinstance(a, ValidityNfa) and a.w >= inst.p:
            out.append(reps)
        else:
            allowed = _class_masks(a, inst.p, n)
            out.append([(m, d) for m, d in reps if m in allowed])
    return out


def _gate_masks(c: Circuit, cols: Sequence[np.ndarray], full: int) -> list[np.ndarray]:
    vals: list[np.ndarray] = []
    it = iter(cols)
    for g in c.gates:
        if g.op == "input":
            vals.append(next(it))
        elif g.op == "not":
            vals.append(vals[g.args[0] - 1] ^ np.uint64(full))
        elif g.op == "and":
            vals.append(vals[g.args[0] - 1] & vals[g.args[1] - 1])
        else:
            vals.append(vals[g.args[0] - 1] | vals[g.args[1] - 1])
    return vals


def brute_force_solve(inst, *, bound: Optional[int] = None):
    """First factor tuple (in enumeration order) realising the target.

    ``bound`` defaults to ``inst.w`` or, without one, to ``p^(2^depth)``.
    Returns a :class:`~symdecomp.reconfig.Witness` or ``None``.
    """
    from .reconfig import decomposition_width, verify_factors

    n = inst.target.n
    if n > ENUM_MAX_N:
        raise ResourceLimit(f"brute force is limited to n <= {ENUM_MAX_N}")
    if bound is None:
        bound = inst.w if inst.w is not None else decomposition_width(inst.p, inst.circuit.depth)
    c = inst.circuit
    cands = _candidates(inst, n)
    sizes = [len(x) for x in cands]
    if any(s == 0 for s in sizes):
        return None
    total = int(np.prod(sizes, dtype=object))
    if total > TUPLE_LIMIT:
        raise ResourceLimit(f"{total} factor tuples exceed the limit {TUPLE_LIMIT}")
    full = (1 << (1 << n)) - 1
    target = obdd_mask(inst.target)
    widths = _width_lookup(n)
    idx = np.indices(sizes).reshape(len(sizes), -1)
    cols = [np.array([m for m, _ in cands[j]], dtype=np.uint64)[idx[j]] for j in range(len(sizes))]
    vals = _gate_masks(c, cols, full)
    ok = vals[-1] == np.uint64(target)
    for v in vals:
        ok &= widths[v.astype(np.int64)] <= bound
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return None
    first = int(hits[0])
    factors = tuple(cands[j][int(idx[j, first])][1] for j in range(len(sizes)))
    per_gate = gate_functions(c, factors)
    if max(g.width for g in per_gate) > bound:
        raise AssertionError("residual widths disagree with gate_functions")
    return verify_factors(inst, factors, bound)


# --------------------------------------------------------------------------
# Sweeps


@dataclass
class SweepConfig:
    """Grid of instances compared between the solvers and the oracle.

    ``targets_per_n`` caps the number of target functions per length; lengths
    whose function count fits are swept exhaustively, others are sampled
    with ``seed``.  With ``flip_orbits`` those lengths instead keep the
    least target of each orbit under flipping input bits.  Such a flip maps
    width-``p`` OBDDs to width-``p`` OBDDs and commutes with every gate, so
    answers are constant on orbits.
    """

    n_max: int = 3
    p_max: int = 2
    w_max: int = 4
    k_max: int = 2
    m_max: int = 4
    targets_per_n: Optional[int] = None
    flip_orbits: bool = False
    seed: int = 0
    modes: tuple[str, ...] = ("decomposition", "reconfiguration")
    circuits: Optional[list] = field(default=None)

    def __post_init__(self):
        if self.n_max > ENUM_MAX_N:
            raise InvalidParameters(f"sweeps are limited to n <= {ENUM_MAX_N}")
        if self.p_max > ENUM_MAX_W:
            raise InvalidParameters(f"sweeps are limited to p <= {ENUM_MAX_W}")

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        d = dict(d)
        if "modes" in d:
            d["modes"] = tuple(d["modes"])
        return cls(**d)

    @classmethod
    def from_file(cls, path: str) -> "SweepConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def flip_mask(mask: int, n: int, flips: int) -> int:
    """Function ``x -> f(x xor flips)`` with ``flips`` read like an input index."""
    out = 0
    for i in range(1 << n):
        if (mask >> (i ^ flips)) & 1:
            out |= 1 << i
    return out


def flip_orbit_representatives(n: int) -> list[int]:
    reps = []
    for mask in range(1 << (1 << n)):
        if all(flip_mask(mask, n, t) >= mask for t in range(1, 1 << n)):
            reps.append(mask)
    return reps


def sweep_targets(cfg: SweepConfig, n: int) -> list[int]:
    count = 1 << (1 << n)
    if cfg.targets_per_n is None or count <= cfg.targets_per_n:
        return list(range(count))
    if cfg.flip_orbits:
        return flip_orbit_representatives(n)
    rng = random.Random(cfg.seed * 1000 + n)
    return sorted(rng.sample(range(count), cfg.targets_per_n))


def sweep_circuits(cfg: SweepConfig) -> list[Circuit]:
    if cfg.circuits is not None:
        return list(cfg.circuits)
    out = []
    for k in range(1, cfg.k_max + 1):
        if cfg.m_max >= k:
            out.extend(enumerate_circuits(k, cfg.m_max))
    return out


def instance_hash(target: int, n: int, c: Circuit, p: int, w: Optional[int]) -> str:
    key = f"{n}:{target}:{p}:{w}:{format_circuit(c)}"
    return hashlib.sha1(key.encode()).hexdigest()[:12]


def sweep(cfg: SweepConfig) -> Iterator[dict]:
    """One agreement record per instance of the grid."""
    from .reconfig import ProblemInstance, solve_decomposition, solve_reconfiguration

    circuits = sweep_circuits(cfg)
    with shared_step_memo():
        yield from _sweep_records(cfg, circuits)


def _sweep_records(cfg: SweepConfig, circuits: list[Circuit]) -> Iterator[dict]:
    from .reconfig import ProblemInstance, solve_decomposition, solve_reconfiguration

    for n in range(1, cfg.n_max + 1):
        for target in sweep_targets(cfg, n):
            d = obdd_from_table(mask_table(target, n))
            for c in circuits:
                for p in range(1, cfg.p_max + 1):
                    ws: list[Optional[int]] = []
                    if "decomposition" in cfg.modes:
                        ws.append(None)
                    if "reconfiguration" in cfg.modes:
                        ws.extend(range(p + 1, cfg.w_max + 1))
                    for w in ws:
                        inst = ProblemInstance(d, c, p, w)
                        oracle = brute_force_solve(inst)
                        if w is None:
                            res = solve_decomposition(inst, max_width=1 << 16)
                        else:
                            res = solve_reconfiguration(inst)
                        sol = res.witness
                        yield {
                            "instance": instance_hash(target, n, c, p, w),
                            "n": n,
                            "target": target,
                            "circuit": format_circuit(c),
                            "p": p,
                            "w": w,
                            "oracle": oracle is not None,
                            "solver": sol is not None,
                            "match": (oracle is not None) == (sol is not None),
                            "verified": sol is None or sol.ok,
                        }
