"""Relation automata over OBDD tuples and the selection operator."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

from .automata import (
    CoordinateMap,
    LayeredNfa,
    ProductNfa,
    ValidityNfa,
    candidate_count,
    candidate_layers,
    fill_mode,
    growth_count,
    iter_growth_strings,
    map_alphabet,
    product_intersect,
)
from .errors import ArityMismatch, PositionOutOfRange
from .obdd import Layer, layer_from_targets


class Tag(enum.Enum):
    ID = "id"
    EQ = "eq"
    AND = "and"
    OR = "or"
    NOT = "not"


_ARITY = {Tag.ID: 2, Tag.EQ: 2, Tag.NOT: 2, Tag.AND: 3, Tag.OR: 3}


@dataclass(frozen=True)
class RelationKind:
    tag: Tag
    widths: tuple[int, ...]

    def __post_init__(self):
        if isinstance(self.tag, str):
            object.__setattr__(self, "tag", Tag(self.tag.lower()))
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))
        if len(self.widths) != _ARITY[self.tag]:
            raise ArityMismatch(f"{self.tag.name} takes {_ARITY[self.tag]} widths, got {len(self.widths)}")
        if any(w < 1 for w in self.widths):
            raise ValueError("widths must be positive")


# --------------------------------------------------------------------------
# Leaf automata


def _layer_ok(b: Layer, dom, w: int, lenient: bool) -> bool:
    if b.table is None or b.max_index >= w:
        return False
    return dom <= b.dom if lenient else b.dom == dom


class TrackingNfa(LayeredNfa):
    """Runs ``r`` OBDDs side by side, tracking the set of reachable state tuples.

    A word is accepted when every reachable final tuple satisfies
    ``accept(bits)``, where ``bits[j]`` says whether coordinate ``j`` ended in
    a nonzero state.  Coordinates flagged ``lenient`` need only be
    deterministic on reachable states instead of satisfying the domain/image
    chaining condition.  ``determined`` lists the coordinates whose function
    is fixed by the others; those can be filled as quotients of the others.
    """

    memoize = True

    def __init__(
        self,
        widths: Sequence[int],
        accept: Callable[[tuple], bool],
        determined: Sequence[int],
        lenient: Optional[Sequence[bool]] = None,
        name: str = "track",
    ):
        self.arity = len(widths)
        self.widths = tuple(widths)
        self.accept = accept
        self.determined = frozenset(determined)
        self.lenient = tuple(lenient) if lenient else (False,) * self.arity
        self.semantic = tuple(not x for x in self.lenient)
        self.name = name
        self._zero = frozenset([(0,) * self.arity])

    def initial_states(self):
        # the empty set stands for the unstarted run at the all-zero tuple
        return (frozenset(),)

    def is_final(self, state):
        if not state:
            return False
        acc = self.accept
        return all(acc(tuple(int(q != 0) for q in t)) for t in state)

    def _projections(self, tuples):
        return [frozenset(t[j] for t in tuples) for j in range(self.arity)]

    def step(self, state, partial, reducible, remaining):
        tuples = state or self._zero
        projs = self._projections(tuples)
        r = self.arity
        chosen = list(partial)
        for j in range(r):
            if chosen[j] is not None and not _layer_ok(chosen[j], projs[j], self.widths[j], self.lenient[j]):
                return
        free = [j for j in range(r) if chosen[j] is None]
        quot = None
        if free:
            qs = [j for j in free if j in self.determined and reducible[j]]
            if qs:
                quot = qs[-1]
        enum_coords = [j for j in free if j != quot]
        yield from self._enum(0, enum_coords, quot, chosen, tuples, projs, reducible, remaining)

    def _enum(self, k, coords, quot, chosen, tuples, projs, reducible, remaining):
        if k == len(coords):
            if quot is None:
                yield from self._finish(chosen, tuples, remaining)
            else:
                for b in self._quotient_layers(quot, chosen, tuples, remaining):
                    chosen[quot] = b
                    yield from self._finish(chosen, tuples, remaining)
                chosen[quot] = None
            return
        j = coords[k]
        mode = fill_mode(reducible[j], remaining)
        for b in candidate_layers(projs[j], self.widths[j], mode):
            chosen[j] = b
            yield from self._enum(k + 1, coords, quot, chosen, tuples, projs, reducible, remaining)
        chosen[j] = None

    def _finish(self, chosen, tuples, remaining):
        tabs = [b.table for b in chosen]
        r = self.arity
        nxt = frozenset(
            tuple(tabs[j][t[j], a] for j in range(r)) for t in tuples for a in (0, 1)
        )
        if remaining == 0 and not self.is_final(nxt):
            return
        yield tuple(chosen), nxt

    def _quotient_layers(self, j, chosen, tuples, remaining):
        """Layers for coordinate ``j`` whose next state is a function of the
        other coordinates' next states."""
        others = [i for i in range(self.arity) if i != j]
        tabs = {i: chosen[i].table for i in others}
        sources = sorted({t[j] for t in tuples})
        slot_index = {(q, a): 2 * k + a for k, q in enumerate(sources) for a in (0, 1)}
        nslots = len(slot_index)
        parent = list(range(nslots))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        owner: dict = {}
        keys_of_slot: list[set] = [set() for _ in range(nslots)]
        for t in tuples:
            for a in (0, 1):
                s = slot_index[t[j], a]
                key = tuple(tabs[i][t[i], a] for i in others)
                keys_of_slot[s].add(key)
                if key in owner:
                    x, y = find(owner[key]), find(s)
                    if x != y:
                        parent[max(x, y)] = min(x, y)
                else:
                    owner[key] = s
        roots = [find(s) for s in range(nslots)]
        group_ids: dict = {}
        slot_group = [group_ids.setdefault(x, len(group_ids)) for x in roots]
        ngroups = len(group_ids)
        w = self.widths[j]
        seen = set()
        if remaining is None or remaining > 0:
            # One label per group never merges states with different
            # residuals, so it is the only labeling needed when it fits.
            if ngroups <= w:
                labelings = (tuple(range(ngroups)),)
            else:
                labelings = iter_growth_strings(ngroups, w)
            for labels in labelings:
                targets = tuple(labels[g] for g in slot_group)
                seen.add(targets)
                yield layer_from_targets(sources, targets)
        if remaining is None or remaining == 0:
            group_keys: list[set] = [set() for _ in range(ngroups)]
            for s in range(nslots):
                group_keys[slot_group[s]] |= keys_of_slot[s]
            options = []
            for g in range(ngroups):
                ok = []
                for bit in (0, 1):
                    if bit >= w:
                        continue
                    if all(self.accept(_bits_with(key, others, j, bit)) for key in group_keys[g]):
                        ok.append(bit)
                if not ok:
                    return
                options.append(ok)
            for labels in _product(options):
                targets = tuple(labels[g] for g in slot_group)
                if targets not in seen:
                    yield layer_from_targets(sources, targets)

    def estimate(self, state, filled, reducible, remaining):
        tuples = state or self._zero
        free = [j for j in range(self.arity) if not filled[j]]
        if not free:
            return 1.0
        projs = self._projections(tuples)
        quot = None
        qs = [j for j in free if j in self.determined and reducible[j]]
        if qs:
            quot = qs[-1]
        est = 1.0
        for j in free:
            if j == quot:
                if remaining == 0:
                    continue
                g = min(2 * len(tuples), 2 * len(projs[j]))
                if g > self.widths[j]:
                    est *= 1.0 + growth_count(g, self.widths[j]) / 4
            else:
                est *= candidate_count(len(projs[j]), self.widths[j], fill_mode(reducible[j], remaining))
        return max(est, 1.0)

    def __repr__(self):
        return f"TrackingNfa({self.name}, {self.widths})"


def _bits_with(key, others, j, bit):
    bits = [0] * (len(others) + 1)
    for i, q in zip(others, key):
        bits[i] = int(q != 0)
    bits[j] = bit
    return tuple(bits)


def _product(options):
    if not options:
        yield ()
        return
    head, *rest = options
    for x in head:
        for tail in _product(rest):
            yield (x,) + tail


class IdentityNfa(LayeredNfa):
    """Pairs of syntactically identical valid OBDDs."""

    def __init__(self, w1: int, w2: int):
        self.arity = 2
        self.widths = (w1, w2)
        self.semantic = (False, False)
        self.w = min(w1, w2)

    def initial_states(self):
        return ("start",)

    def is_final(self, state):
        return state != "start"

    def step(self, state, partial, reducible, remaining):
        dom = frozenset((0,)) if state == "start" else state
        b1, b2 = partial
        if b1 is not None and b2 is not None and b1 != b2:
            return
        b = b1 if b1 is not None else b2
        if b is not None:
            if b.table is not None and b.dom == dom and b.max_index < self.w:
                yield (b, b), b.im
            return
        for b in candidate_layers(dom, self.w, "all"):
            yield (b, b), b.im

    def estimate(self, state, filled, reducible, remaining):
        if any(filled):
            return 1.0
        dom = frozenset((0,)) if state == "start" else state
        return float(candidate_count(len(dom), self.w, "all"))


_DONE = "done"


class PairingNfa(LayeredNfa):
    """Reads ``(B1, B2, B3)`` with ``B3`` the pairing-map image of ``B1, B2``.

    Each state pair ``(q, q')`` is encoded as ``q * w2 + q'``; the image of a
    layer pair contains one triple per pair of source states, so the third
    coordinate chains only on reachable states.  With ``conj`` the last layer
    sends every pair with a zero component to 0 and the run stops; otherwise
    every layer uses the plain pairing and every started run is accepting.
    """

    def __init__(self, w1: int, w2: int, conj: bool):
        self.w1, self.w2 = w1, w2
        self.conj = conj
        self.arity = 3
        self.widths = (w1, w2, w1 * w2)
        self.semantic = (False, False, False)

    def initial_states(self):
        return ((frozenset((0,)), frozenset((0,)), False),)

    def is_final(self, state):
        if self.conj:
            return state == _DONE
        return state[2]

    def step(self, state, partial, reducible, remaining):
        if state == _DONE:
            return
        dom1, dom2, _ = state
        b1, b2, b3 = partial
        firsts = [b1] if b1 is not None else candidate_layers(dom1, self.w1, fill_mode(reducible[0], remaining))
        for x in firsts:
            if b1 is not None and not _layer_ok(x, dom1, self.w1, False):
                return
            seconds = [b2] if b2 is not None else candidate_layers(dom2, self.w2, fill_mode(reducible[1], remaining))
            for y in seconds:
                if b2 is not None and not _layer_ok(y, dom2, self.w2, False):
                    return
                for last in self._branches(remaining):
                    img = pairing_layer(x, y, self.w2, last and self.conj)
                    if b3 is not None and b3 != img:
                        continue
                    if last and self.conj:
                        nxt = _DONE
                    else:
                        nxt = (x.im, y.im, True)
                    yield (x, y, img), nxt

    def _branches(self, remaining):
        if not self.conj:
            return (False,)
        if remaining is None:
            return (False, True)
        return (remaining == 0,)

    def estimate(self, state, filled, reducible, remaining):
        if state == _DONE:
            return 0.0
        dom1, dom2, _ = state
        est = 1.0
        if not filled[0]:
            est *= candidate_count(len(dom1), self.w1, fill_mode(reducible[0], remaining))
        if not filled[1]:
            est *= candidate_count(len(dom2), self.w2, fill_mode(reducible[1], remaining))
        return est


@lru_cache(maxsize=1 << 16)
def pairing_layer(b1: Layer, b2: Layer, w2: int, collapse: bool) -> Layer:
    """Pairing map on layers; ``collapse`` zeroes targets with a zero component."""
    triples = []
    for q in sorted(b1.dom):
        for r in sorted(b2.dom):
            for a in (0, 1):
                p, s = b1.table[q, a], b2.table[r, a]
                t = 0 if collapse and (p == 0 or s == 0) else p * w2 + s
                triples.append((q * w2 + r, a, t))
    sources = sorted({q for q, _, _ in triples})
    targets = [t for _, _, t in sorted(triples)]
    return layer_from_targets(sources, targets)


class NegationCopyNfa(LayeredNfa):
    """Reads ``(B, C)`` with ``C = B`` on internal layers and ``C`` the
    acceptance-flipped copy of ``B`` on the last layer."""

    def __init__(self, w: int):
        self.w = w
        self.arity = 2
        self.widths = (w, max(w, 2))
        self.semantic = (False, False)

    def initial_states(self):
        return (frozenset((0,)),)

    def is_final(self, state):
        return state == _DONE

    def step(self, state, partial, reducible, remaining):
        if state == _DONE:
            return
        b, c = partial
        if b is not None:
            if not _layer_ok(b, state, self.w, False):
                return
            cands = (b,)
        else:
            cands = candidate_layers(state, self.w, fill_mode(reducible[0], remaining))
        for x in cands:
            branches = (False, True) if remaining is None else (remaining == 0,)
            for last in branches:
                img = flip_layer(x) if last else x
                if c is not None and c != img:
                    continue
                yield (x, img), (_DONE if last else x.im)

    def estimate(self, state, filled, reducible, remaining):
        if state == _DONE:
            return 0.0
        if filled[0]:
            return 1.0
        return float(candidate_count(len(state), self.w, fill_mode(reducible[0], remaining)))


@lru_cache(maxsize=1 << 14)
def flip_layer(b: Layer) -> Layer:
    sources = sorted(b.dom)
    return layer_from_targets(sources, [1 if b.table[q, a] == 0 else 0 for q in sources for a in (0, 1)])


# --------------------------------------------------------------------------
# Relation constructors


def _eq_accept(bits):
    return bits[0] == bits[1]


def _and_accept(bits):
    return bits[2] == (bits[0] & bits[1])


def _or_accept(bits):
    return bits[2] == (bits[0] | bits[1])


def _not_accept(bits):
    return bits[0] != bits[1]


@lru_cache(maxsize=256)
def equality_automaton(w1: int, w2: int, lenient=(False, False)) -> TrackingNfa:
    return TrackingNfa((w1, w2), _eq_accept, determined=(0, 1), lenient=lenient, name="eq")


def _boolean_by_pairing(w1: int, w2: int, w3: int, conj: bool) -> LayeredNfa:
    # coordinates: 0, 1 inputs; 2 the paired layer (hidden); 3 the output
    base = PairingNfa(w1, w2, conj)
    eq = equality_automaton(w1 * w2, w3, lenient=(True, False))
    inner = ProductNfa(
        [(base, (0, 1, 2)), (ValidityNfa(w3), (3,)), (eq, (2, 3))],
        4,
        (0, 1, 3),
        (w1, w2, w3),
        opaque=True,
        semantic=(True, True, True),
    )
    return inner


def _negation_by_copy(w1: int, w2: int) -> LayeredNfa:
    # coordinates: 0 input; 1 flipped copy (hidden); 2 output
    base = NegationCopyNfa(w1)
    eq = equality_automaton(max(w1, 2), w2)
    return ProductNfa(
        [(base, (0, 1)), (ValidityNfa(w2), (2,)), (eq, (1, 2))],
        3,
        (0, 2),
        (w1, w2),
        opaque=True,
        semantic=(True, True),
    )


@lru_cache(maxsize=256)
def build_relation(kind: RelationKind, route: str = "pairing") -> LayeredNfa:
    """Automaton for the relation ``kind`` over valid OBDDs of the given widths.

    ``route="pairing"`` builds AND/OR from the pairing product checked for
    equality against the output, and NOT from the flipped copy;
    ``route="direct"`` tracks reachable state tuples of all coordinates.
    """
    t, ws = kind.tag, kind.widths
    if t is Tag.ID:
        return IdentityNfa(*ws)
    if t is Tag.EQ:
        return equality_automaton(*ws)
    if route == "direct":
        if t is Tag.NOT:
            return TrackingNfa(ws, _not_accept, determined=(0, 1), name="not")
        acc = _and_accept if t is Tag.AND else _or_accept
        return TrackingNfa(ws, acc, determined=(2,), name=t.value)
    if route != "pairing":
        raise ValueError(f"unknown route {route!r}")
    if t is Tag.NOT:
        return _negation_by_copy(*ws)
    return _boolean_by_pairing(*ws, conj=t is Tag.AND)


# --------------------------------------------------------------------------
# Selection


@dataclass(frozen=True)
class Selector:
    """Relation automaton applied to the 1-based ``positions`` of an
    ``m``-coordinate language."""

    relation: LayeredNfa
    positions: tuple[int, ...]
    m: int

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(self.positions))
        if len(self.positions) != self.relation.arity:
            raise ArityMismatch(
                f"relation of arity {self.relation.arity} given {len(self.positions)} positions"
            )
        for p in self.positions:
            if not 1 <= p <= self.m:
                raise PositionOutOfRange(f"position {p} not in 1..{self.m}")


def selector_language(sel: Selector) -> LayeredNfa:
    return map_alphabet(sel.relation, "inverse", CoordinateMap(sel.positions, sel.m))


def selector_select(lang: LayeredNfa, sel: Selector) -> LayeredNfa:
    if sel.m != lang.arity:
        raise ArityMismatch(f"selector over {sel.m} coordinates for a language of arity {lang.arity}")
    lifted = selector_language(sel)
    for p, w in zip(sel.positions, sel.relation.widths):
        lw = lang.widths[p - 1]
        if lw is not None and w is not None and lw != w:
            raise ArityMismatch(f"relation width {w} differs from coordinate {p} width {lw}")
    return product_intersect(lang, lifted)
