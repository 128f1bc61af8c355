"""Nondeterministic automata over tuples of OBDD layers.

Alphabets are far too large to list, so every automaton generates its
transitions on demand.  The single primitive is :meth:`LayeredNfa.step`:
given a state and a partially filled symbol (``None`` for coordinates not yet
chosen) it yields every completed symbol together with a successor state.
Membership, products, maps and the emptiness search are all built on it.

Reduced enumeration
-------------------
A coordinate is *semantic* for an automaton when replacing that coordinate of
an accepted word by the canonical OBDD of the same function keeps the word
accepted.  When every automaton constraining a coordinate is semantic, a
search may restrict that coordinate to normalised encodings (image labels in
order of first use, final targets in {0, 1}) without losing any answer.  The
``reducible`` flags passed to ``step`` request this restriction.
"""
from __future__ import annotations

import contextlib
import contextvars
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .errors import ArityMismatch, ParseError, WidthViolation
from .obdd import Layer, Obdd, _header_fields, _parse_triples, layer_from_targets, validate_obdd

# Per-query memo of component steps; None outside a search.
_STEP_MEMO: contextvars.ContextVar = contextvars.ContextVar("step_memo", default=None)
_MEMO_CAP = 1 << 20

Symbol = tuple  # tuple of Layer, one per coordinate
Partial = tuple  # tuple of Layer or None


# --------------------------------------------------------------------------
# Candidate layer enumeration


@lru_cache(maxsize=None)
def growth_strings(length: int, labels: int) -> tuple[tuple[int, ...], ...]:
    """Restricted-growth strings of the given length using < ``labels`` values."""
    out = []

    def rec(prefix, top):
        if len(prefix) == length:
            out.append(tuple(prefix))
            return
        for v in range(min(top + 2, labels)):
            prefix.append(v)
            rec(prefix, max(top, v))
            prefix.pop()

    if length == 0:
        return ((),)
    rec([], -1)
    return tuple(out)


def iter_growth_strings(length: int, labels: int) -> Iterator[tuple[int, ...]]:
    """Lazy version of :func:`growth_strings` for long strings."""
    if length <= 10:
        yield from growth_strings(length, labels)
        return
    buf = [0] * length

    def rec(i, top):
        if i == length:
            yield tuple(buf)
            return
        for v in range(min(top + 2, labels)):
            buf[i] = v
            yield from rec(i + 1, max(top, v))

    yield from rec(0, -1)


@lru_cache(maxsize=None)
def _binary_strings(length: int, labels: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.product(range(min(2, labels)), repeat=length))


@lru_cache(maxsize=None)
def _all_strings(length: int, labels: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.product(range(labels), repeat=length))


def fill_mode(reducible: bool, remaining: Optional[int]) -> str:
    if not reducible:
        return "all"
    if remaining == 0:
        return "final"
    if remaining is None:
        return "either"
    return "internal"


def label_strings(length: int, labels: int, mode: str) -> tuple[tuple[int, ...], ...]:
    if mode == "all":
        return _all_strings(length, labels)
    if mode == "final":
        return _binary_strings(length, labels)
    if mode == "internal":
        return growth_strings(length, labels)
    return _either_strings(length, labels)


@lru_cache(maxsize=None)
def _either_strings(length, labels):
    seen = dict.fromkeys(growth_strings(length, labels))
    seen.update(dict.fromkeys(_binary_strings(length, labels)))
    return tuple(seen)


@lru_cache(maxsize=4096)
def candidate_layers(dom: frozenset, w: int, mode: str) -> tuple[Layer, ...]:
    """Deterministic complete layers on domain ``dom`` with targets below ``w``."""
    sources = sorted(dom)
    return tuple(
        layer_from_targets(sources, t) for t in label_strings(2 * len(sources), w, mode)
    )


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


def growth_count(length: int, labels: int) -> int:
    """Number of restricted-growth strings, without listing them."""
    if length == 0:
        return 1
    return sum(_stirling2(length, k) for k in range(1, min(labels, length) + 1))


def candidate_count(dom_size: int, w: int, mode: str) -> int:
    length = 2 * dom_size
    if mode == "all":
        return w ** length
    if mode == "final":
        return min(2, w) ** length
    if mode == "internal":
        return growth_count(length, w)
    return growth_count(length, w) + min(2, w) ** length


# --------------------------------------------------------------------------
# Base class


class LayeredNfa:
    """Automaton over ``arity``-tuples of layers.

    Subclasses implement ``initial_states``, ``is_final`` and ``step``.
    ``widths[j]`` bounds the state indices of coordinate ``j`` (``None`` when
    unconstrained); ``semantic[j]`` is described in the module docstring.
    """

    arity: int
    widths: tuple
    semantic: tuple

    def initial_states(self) -> Iterable:
        raise NotImplementedError

    def is_final(self, state) -> bool:
        raise NotImplementedError

    def step(self, state, partial: Partial, reducible: tuple, remaining: Optional[int]):
        """Yield ``(symbol, successor)`` for every completion of ``partial``.

        ``remaining`` is the number of symbols that will follow this one, or
        ``None`` when unknown; implementations may use it to skip branches
        that cannot reach a final state in exactly that many steps.
        """
        raise NotImplementedError

    def estimate(self, state, filled: tuple, reducible: tuple, remaining) -> float:
        """Rough number of completions ``step`` would produce."""
        return 1.0 if all(filled) else 1e9

    def successors(self, state, symbol: Symbol, remaining=None) -> set:
        return {t for _, t in self.step(state, tuple(symbol), (False,) * self.arity, remaining)}

    @property
    def state_count(self) -> Optional[int]:
        """Size of the full state space when known without exploration."""
        return None

    def _check_symbol(self, symbol):
        if len(symbol) != self.arity:
            raise ArityMismatch(f"symbol of arity {len(symbol)} for automaton of arity {self.arity}")


# --------------------------------------------------------------------------
# Concrete automata


class ValidityNfa(LayeredNfa):
    """Accepts exactly the valid OBDDs of width at most ``w`` (and the empty word).

    States are subsets of ``0..w-1``; reading ``B`` from ``S`` requires
    ``dom(B) = S`` and moves to ``im(B)``.
    """

    def __init__(self, w: int):
        if w < 1:
            raise ValueError("width must be positive")
        self.w = w
        self.arity = 1
        self.widths = (w,)
        self.semantic = (True,)

    def initial_states(self):
        return (frozenset((0,)),)

    def is_final(self, state):
        return True

    @property
    def state_count(self):
        return 1 << self.w

    def states(self) -> list[frozenset]:
        return [
            frozenset(c)
            for r in range(self.w + 1)
            for c in itertools.combinations(range(self.w), r)
        ]

    def step(self, state, partial, reducible, remaining):
        b = partial[0]
        if b is not None:
            if b.table is not None and b.dom == state and b.max_index < self.w:
                yield partial, b.im
            return
        for b in candidate_layers(state, self.w, fill_mode(reducible[0], remaining)):
            yield (b,), b.im

    def estimate(self, state, filled, reducible, remaining):
        if filled[0]:
            return 1.0
        return float(candidate_count(len(state), self.w, fill_mode(reducible[0], remaining)))

    def __repr__(self):
        return f"ValidityNfa({self.w})"


class SingletonNfa(LayeredNfa):
    """Chain automaton with ``n + 1`` states accepting one fixed word."""

    def __init__(self, word: Sequence[Symbol], widths: tuple):
        self.word = tuple(tuple(s) for s in word)
        self.arity = len(widths)
        self.widths = tuple(widths)
        self.semantic = (False,) * self.arity

    def initial_states(self):
        return (0,)

    def is_final(self, state):
        return state == len(self.word)

    @property
    def state_count(self):
        return len(self.word) + 1

    def step(self, state, partial, reducible, remaining):
        if state >= len(self.word):
            return
        sym = self.word[state]
        if all(p is None or p == s for p, s in zip(partial, sym)):
            yield sym, state + 1

    def estimate(self, state, filled, reducible, remaining):
        return 1.0


class ExplicitNfa(LayeredNfa):
    """Automaton given by an explicit transition list."""

    def __init__(self, widths, states, initial, final, transitions, semantic=None):
        self.arity = len(widths)
        self.widths = tuple(widths)
        self.states = tuple(states)
        self.initial = tuple(initial)
        self.final = frozenset(final)
        self.transitions = tuple((s, tuple(sym), t) for s, sym, t in transitions)
        self.semantic = tuple(semantic) if semantic else (False,) * self.arity
        self._out: dict = {}
        for s, sym, t in self.transitions:
            self._check_symbol(sym)
            for b, w in zip(sym, self.widths):
                if w is not None and b.max_index >= w:
                    raise WidthViolation(f"transition symbol exceeds width bound {w}")
            self._out.setdefault(s, []).append((sym, t))

    def initial_states(self):
        return self.initial

    def is_final(self, state):
        return state in self.final

    @property
    def state_count(self):
        return len(self.states)

    def step(self, state, partial, reducible, remaining):
        for sym, t in self._out.get(state, ()):
            if all(p is None or p == s for p, s in zip(partial, sym)):
                yield sym, t

    def estimate(self, state, filled, reducible, remaining):
        return float(max(1, len(self._out.get(state, ()))))


class ProductNfa(LayeredNfa):
    """Synchronous product of components acting on shared coordinates.

    ``components`` is a list of ``(nfa, coords)``; ``coords[j]`` is the
    product coordinate read by coordinate ``j`` of ``nfa``.  Coordinates not
    listed in ``visible`` are hidden: they are guessed during the step and
    dropped from the symbol (projection).  Non-opaque products nested as
    components are flattened, so one step schedules all leaf automata
    together, most constrained first.
    """

    def __init__(
        self,
        components: Sequence[tuple[LayeredNfa, Sequence[int]]],
        total: int,
        visible: Sequence[int],
        widths: Optional[Sequence] = None,
        opaque: bool = False,
        semantic: Optional[Sequence[bool]] = None,
    ):
        flat: list[tuple[LayeredNfa, tuple[int, ...]]] = []
        for nfa, coords in components:
            coords = tuple(coords)
            if len(coords) != nfa.arity:
                raise ArityMismatch(f"component of arity {nfa.arity} given {len(coords)} coordinates")
            if isinstance(nfa, ProductNfa) and not nfa.opaque:
                remap = {}
                for j, c in enumerate(nfa.visible):
                    remap[c] = coords[j]
                for c in range(nfa.total):
                    if c not in remap:
                        remap[c] = total
                        total += 1
                for sub, sub_coords in nfa.components:
                    flat.append((sub, tuple(remap[c] for c in sub_coords)))
            else:
                flat.append((nfa, coords))
        self.components = tuple(flat)
        self.total = total
        self.visible = tuple(visible)
        self.arity = len(self.visible)
        self.opaque = opaque
        self._memo_ok = tuple(
            (isinstance(nfa, ProductNfa) and nfa.opaque) or getattr(nfa, "memoize", False)
            for nfa, _ in self.components
        )

        touching: list[list[tuple[int, int]]] = [[] for _ in range(total)]
        for i, (nfa, coords) in enumerate(self.components):
            for j, c in enumerate(coords):
                touching[c].append((i, j))
        self._touching = tuple(tuple(t) for t in touching)
        self._sem = tuple(
            bool(t) and all(self.components[i][0].semantic[j] for i, j in t) for t in touching
        )
        if widths is None:
            ws = []
            for c in self.visible:
                w = None
                for i, j in touching[c]:
                    cw = self.components[i][0].widths[j]
                    if cw is not None:
                        w = cw if w is None else min(w, cw)
                ws.append(w)
            widths = ws
        self.widths = tuple(widths)
        if semantic is not None:
            self.semantic = tuple(semantic)
        else:
            self.semantic = tuple(self._sem[c] for c in self.visible)
        self._vis_pos = {c: j for j, c in enumerate(self.visible)}
        self._dups = tuple(
            tuple((a, b) for a in range(len(coords)) for b in range(a + 1, len(coords)) if coords[a] == coords[b])
            for _, coords in self.components
        )

    def initial_states(self):
        return itertools.product(*(nfa.initial_states() for nfa, _ in self.components))

    def is_final(self, state):
        return all(nfa.is_final(s) for (nfa, _), s in zip(self.components, state))

    @property
    def state_count(self):
        n = 1
        for nfa, _ in self.components:
            c = nfa.state_count
            if c is None:
                return None
            n *= c
        return n

    def _reducible(self, reducible):
        red = list(self._sem)
        for c, j in self._vis_pos.items():
            red[c] = bool(reducible[j])
        return red

    def _schedule(self, state, filled, red, remaining):
        """Greedy component order: cheapest completion first."""
        comps = self.components
        pending = set(range(len(comps)))
        est = {}
        for i in pending:
            nfa, coords = comps[i]
            est[i] = nfa.estimate(
                state[i], tuple(filled[c] for c in coords), tuple(red[c] for c in coords), remaining
            )
        order = []
        while pending:
            i = min(pending, key=lambda k: (est[k], k))
            pending.discard(i)
            order.append(i)
            newly = [c for c in comps[i][1] if not filled[c]]
            if not newly:
                continue
            for c in newly:
                filled[c] = True
            for c in newly:
                for k, _ in self._touching[c]:
                    if k in pending:
                        nfa, coords = comps[k]
                        est[k] = nfa.estimate(
                            state[k],
                            tuple(filled[x] for x in coords),
                            tuple(red[x] for x in coords),
                            remaining,
                        )
        return order

    def step(self, state, partial, reducible, remaining):
        full: list = [None] * self.total
        for j, c in enumerate(self.visible):
            if partial[j] is not None:
                if full[c] is not None and full[c] != partial[j]:
                    return
                full[c] = partial[j]
        red = self._reducible(reducible)
        order = self._schedule(state, [v is not None for v in full], red, remaining)
        succ = list(state)
        yield from self._fill(0, order, state, full, red, remaining, succ)

    def _fill(self, k, order, state, full, red, remaining, succ):
        if k == len(order):
            yield tuple(full[c] for c in self.visible), tuple(succ)
            return
        i = order[k]
        nfa, coords = self.components[i]
        sub = tuple(full[c] for c in coords)
        free = [c for c, v in zip(coords, sub) if v is None]
        dups = self._dups[i]
        rsub = tuple(red[c] for c in coords)
        memo = _STEP_MEMO.get() if self._memo_ok[i] else None
        if memo is not None:
            key = (nfa, state[i], sub, rsub, remaining)
            moves = memo.get(key)
            if moves is None:
                moves = list(nfa.step(state[i], sub, rsub, remaining))
                if len(memo) >= _MEMO_CAP:
                    memo.clear()
                memo[key] = moves
        else:
            moves = nfa.step(state[i], sub, rsub, remaining)
        for sym, nxt in moves:
            if dups and any(sym[a] != sym[b] for a, b in dups):
                continue
            for c, v in zip(coords, sym):
                full[c] = v
            succ[i] = nxt
            yield from self._fill(k + 1, order, state, full, red, remaining, succ)
        for c in free:
            full[c] = None

    def estimate(self, state, filled, reducible, remaining):
        full = [False] * self.total
        for j, c in enumerate(self.visible):
            full[c] = full[c] or filled[j]
        red = self._reducible(reducible)
        total = 1.0
        for i in self._schedule(state, list(full), red, remaining):
            nfa, coords = self.components[i]
            total *= nfa.estimate(
                state[i], tuple(full[c] for c in coords), tuple(red[c] for c in coords), remaining
            )
            for c in coords:
                full[c] = True
        return total

    def __repr__(self):
        inner = ", ".join(f"{type(n).__name__}@{c}" for n, c in self.components)
        return f"ProductNfa(visible={self.visible}, [{inner}])"


class MappedNfa(LayeredNfa):
    """Image or preimage of a language under a symbol-wise function.

    Forward mode generates by enumerating the wrapped automaton and mapping;
    inverse mode only checks fully specified symbols.
    """

    def __init__(self, nfa: LayeredNfa, mode: str, fn: Callable, arity: int, widths=None):
        self.nfa = nfa
        self.mode = mode
        self.fn = fn
        self.arity = arity
        self.widths = tuple(widths) if widths is not None else (None,) * arity
        self.semantic = (False,) * arity

    def initial_states(self):
        return self.nfa.initial_states()

    def is_final(self, state):
        return self.nfa.is_final(state)

    def step(self, state, partial, reducible, remaining):
        inner_none = (None,) * self.nfa.arity
        inner_red = (False,) * self.nfa.arity
        if self.mode == "forward":
            for sym, t in self.nfa.step(state, inner_none, inner_red, remaining):
                img = tuple(self.fn(sym))
                if all(p is None or p == s for p, s in zip(partial, img)):
                    yield img, t
            return
        if any(p is None for p in partial):
            raise NotImplementedError("inverse images under arbitrary maps can only be checked, not generated")
        img = tuple(self.fn(partial))
        for _, t in self.nfa.step(state, img, inner_red, remaining):
            yield partial, t


# --------------------------------------------------------------------------
# Algebra


@dataclass(frozen=True)
class CoordinateMap:
    """The extraction map taking an ``arity``-tuple to its ``positions``.

    Positions are 1-based.  Used forward it projects onto the positions;
    used inverse it lifts a language over ``len(positions)`` coordinates to
    ``arity`` coordinates.
    """

    positions: tuple[int, ...]
    arity: int
    widths: Optional[tuple] = None

    def __call__(self, symbol):
        return tuple(symbol[p - 1] for p in self.positions)


def product_intersect(a1: LayeredNfa, a2: LayeredNfa) -> LayeredNfa:
    if a1.arity != a2.arity:
        raise ArityMismatch(f"arities {a1.arity} and {a2.arity} differ")
    widths = []
    for x, y in zip(a1.widths, a2.widths):
        if x is not None and y is not None and x != y:
            raise ArityMismatch(f"width bounds {a1.widths} and {a2.widths} differ")
        widths.append(x if x is not None else y)
    r = a1.arity
    return ProductNfa([(a1, range(r)), (a2, range(r))], r, range(r), widths)


def intersect_all(automata: Sequence[LayeredNfa]) -> LayeredNfa:
    out = automata[0]
    for a in automata[1:]:
        out = product_intersect(out, a)
    return out


def tensor(*automata: LayeredNfa) -> LayeredNfa:
    comps = []
    start = 0
    for a in automata:
        comps.append((a, range(start, start + a.arity)))
        start += a.arity
    widths = [w for a in automata for w in a.widths]
    return ProductNfa(comps, start, range(start), widths)


def map_alphabet(a: LayeredNfa, mode: str, mapping) -> LayeredNfa:
    """Forward image (projection) or inverse image of ``a`` under ``mapping``.

    ``mapping`` is a :class:`CoordinateMap` or, for other maps, a tuple
    ``(fn, result_arity)``.
    """
    if mode not in ("forward", "inverse"):
        raise ValueError(f"mode must be 'forward' or 'inverse', not {mode!r}")
    if isinstance(mapping, CoordinateMap):
        pos = tuple(p - 1 for p in mapping.positions)
        if mode == "forward":
            if mapping.arity != a.arity or any(not 0 <= p < a.arity for p in pos):
                raise ArityMismatch("projection positions do not fit the automaton")
            widths = [a.widths[p] for p in pos]
            return ProductNfa([(a, range(a.arity))], a.arity, pos, widths)
        if len(pos) != a.arity or any(not 0 <= p < mapping.arity for p in pos):
            raise ArityMismatch("extraction positions do not fit the automaton")
        widths = list(mapping.widths) if mapping.widths else [None] * mapping.arity
        for j, p in enumerate(pos):
            widths[p] = a.widths[j]
        return ProductNfa([(a, pos)], mapping.arity, range(mapping.arity), widths)
    fn, arity = mapping
    return MappedNfa(a, mode, fn, arity)


def project(a: LayeredNfa, positions: Sequence[int]) -> LayeredNfa:
    """Keep the 1-based ``positions`` of every symbol."""
    return map_alphabet(a, "forward", CoordinateMap(tuple(positions), a.arity))


def opaque(a: LayeredNfa, semantic: Optional[Sequence[bool]] = None) -> LayeredNfa:
    """Wrap ``a`` so it is scheduled as one unit and declare its semantics."""
    if isinstance(a, ProductNfa):
        return ProductNfa(
            a.components, a.total, a.visible, a.widths, opaque=True,
            semantic=semantic if semantic is not None else a.semantic,
        )
    return ProductNfa([(a, range(a.arity))], a.arity, range(a.arity), a.widths, opaque=True,
                      semantic=semantic if semantic is not None else a.semantic)


def validity_automaton(w: int) -> ValidityNfa:
    return ValidityNfa(w)


def singleton_automaton(*obdds: Obdd) -> SingletonNfa:
    """Automaton accepting exactly ``D_1 ⊗ ... ⊗ D_r`` for the given OBDDs."""
    return SingletonNfa(tensor_word(*obdds), tuple(d.width_bound for d in obdds))


def finite_class_automaton(obdds: Iterable[Obdd], w: int) -> ExplicitNfa:
    """Trie automaton accepting exactly the given OBDDs."""
    trie: dict = {}
    states = [()]
    trans = []
    finals = set()
    for d in obdds:
        if d.width_bound > w:
            raise WidthViolation(f"OBDD of width bound {d.width_bound} in a class over width {w}")
        prefix = ()
        for b in d.layers:
            nxt = prefix + (b,)
            if nxt not in trie:
                trie[nxt] = len(states)
                states.append(nxt)
                trans.append((trie.get(prefix, 0), (b,), trie[nxt]))
            prefix = nxt
        finals.add(trie[prefix])
    return ExplicitNfa((w,), range(len(states)), (0,), finals, trans)


def tensor_word(*obdds: Obdd) -> list[Symbol]:
    n = obdds[0].n
    for d in obdds:
        if d.n != n:
            raise ArityMismatch("tensor product of OBDDs of different lengths")
    return [tuple(d.layers[i] for d in obdds) for i in range(n)]


def word_obdds(word: Sequence[Symbol], widths: Sequence[int]) -> tuple[Obdd, ...]:
    """Split a tuple word into validated OBDDs, one per coordinate."""
    return tuple(
        validate_obdd([sym[j] for sym in word], widths[j]) for j in range(len(widths))
    )


def _as_word(a: LayeredNfa, word) -> list[Symbol]:
    if isinstance(word, Obdd):
        word = tensor_word(word)
    word = [tuple(s) if isinstance(s, (tuple, list)) else (s,) for s in word]
    for sym in word:
        a._check_symbol(sym)
    return word


def accepts(a: LayeredNfa, word) -> bool:
    """Membership of a word (a sequence of symbols, or an OBDD for arity 1)."""
    word = _as_word(a, word)
    cur = set(a.initial_states())
    red = (False,) * a.arity
    for i, sym in enumerate(word):
        rem = len(word) - 1 - i
        cur = {t for s in cur for _, t in a.step(s, sym, red, rem)}
        if not cur:
            return False
    return any(a.is_final(s) for s in cur)


# --------------------------------------------------------------------------
# Emptiness at a fixed length


@dataclass
class SearchStats:
    states_explored: int = 0
    transitions: int = 0
    levels: int = 0
    dead_level: Optional[int] = None
    frontier_sizes: list = field(default_factory=list)


def symbol_key(sym: Symbol):
    return tuple(b.triples for b in sym)


def nonempty_at_length(
    a: LayeredNfa,
    n: int,
    *,
    reduced: bool = True,
    stats: Optional[SearchStats] = None,
    state_limit: Optional[int] = None,
) -> Optional[list[Symbol]]:
    """Lexicographically least accepted word of length ``n`` or ``None``.

    Breadth-first over levels, visiting each (state, level) once.  With
    ``reduced`` the semantic coordinates are restricted to normalised
    encodings, which keeps the answer but narrows the witness space.
    ``stats.dead_level`` records the first level with no live state.
    """
    if n < 1:
        raise ValueError("length must be at least 1")
    from .errors import ResourceLimit

    token = _STEP_MEMO.set({}) if _STEP_MEMO.get() is None else None
    try:
        return _search_levels(a, n, reduced, stats, state_limit)
    finally:
        if token is not None:
            _STEP_MEMO.reset(token)


@contextlib.contextmanager
def shared_step_memo():
    """Share component step results across every search run inside the block.

    Steps are pure, so this only trades memory for time; useful for sweeps
    that solve many instances over the same relation automata.
    """
    token = _STEP_MEMO.set({})
    try:
        yield
    finally:
        _STEP_MEMO.reset(token)


def _search_levels(a, n, reduced, stats, state_limit):
    from .errors import ResourceLimit

    stats = stats if stats is not None else SearchStats()
    red = tuple(a.semantic) if reduced else (False,) * a.arity
    blank = (None,) * a.arity
    levels = [set(a.initial_states())]
    edges: list[dict] = []
    stats.states_explored = len(levels[0])
    stats.frontier_sizes = [len(levels[0])]
    for i in range(n):
        rem = n - 1 - i
        out: dict = {}
        nxt: set = set()
        for s in levels[i]:
            lst = set(a.step(s, blank, red, rem))
            if lst:
                out[s] = lst
                for _, t in lst:
                    nxt.add(t)
            stats.transitions += len(lst)
        if rem == 0:
            nxt = {t for t in nxt if a.is_final(t)}
        edges.append(out)
        levels.append(nxt)
        stats.levels = i + 1
        stats.states_explored += len(nxt)
        stats.frontier_sizes.append(len(nxt))
        if state_limit is not None and stats.states_explored > state_limit:
            raise ResourceLimit(f"search exceeded {state_limit} states")
        if not nxt:
            stats.dead_level = i + 1
            return None

    alive = [set() for _ in range(n + 1)]
    alive[n] = levels[n]
    for i in range(n - 1, -1, -1):
        alive[i] = {
            s for s, lst in edges[i].items() if any(t in alive[i + 1] for _, t in lst)
        }
    cur = alive[0]
    word = []
    for i in range(n):
        best = None
        nxt = set()
        for s in cur:
            for sym, t in edges[i].get(s, ()):
                if t not in alive[i + 1]:
                    continue
                k = symbol_key(sym)
                if best is None or k < best[0]:
                    best = (k, sym)
                    nxt = {t}
                elif k == best[0]:
                    nxt.add(t)
        word.append(best[1])
        cur = nxt
    return word


def reachable_state_counts(a: LayeredNfa, n: int, reduced: bool = False) -> list[int]:
    """Number of distinct states reachable at each level 0..n."""
    stats = SearchStats()
    nonempty_at_length(a, n, reduced=reduced, stats=stats)
    return stats.frontier_sizes


def enumerate_words(a: LayeredNfa, n: int, reduced: bool = False) -> Iterator[tuple[Symbol, ...]]:
    """All accepted words of length ``n`` (exponential; for tests)."""
    red = tuple(a.semantic) if reduced else (False,) * a.arity
    blank = (None,) * a.arity

    def rec(states, prefix):
        i = len(prefix)
        if i == n:
            if any(a.is_final(s) for s in states):
                yield tuple(prefix)
            return
        by_sym: dict = {}
        for s in states:
            for sym, t in a.step(s, blank, red, n - 1 - i):
                by_sym.setdefault(sym, set()).add(t)
        for sym in sorted(by_sym, key=symbol_key):
            prefix.append(sym)
            yield from rec(by_sym[sym], prefix)
            prefix.pop()

    yield from rec(set(a.initial_states()), [])


# --------------------------------------------------------------------------
# Text format


def _format_state(s) -> str:
    return str(s)


def format_automaton(a: LayeredNfa) -> str:
    if isinstance(a, ValidityNfa):
        return f"builtin validity {a.w}\n"
    if not isinstance(a, ExplicitNfa):
        raise TypeError("only explicit and builtin automata have a text form")
    names = {s: f"s{i}" if not isinstance(s, str) else s for i, s in enumerate(a.states)}
    lines = [
        f"sofa arity={a.arity} widths={','.join(str(w) for w in a.widths)}",
        "states " + " ".join(names[s] for s in a.states),
        "initial " + " ".join(names[s] for s in a.initial),
        "final " + " ".join(names[s] for s in a.states if s in a.final),
    ]
    for s, sym, t in a.transitions:
        body = "|".join("{" + b.format() + "}" for b in sym)
        lines.append(f"trans {names[s]} {body} {names[t]}")
    return "\n".join(lines) + "\n"


def parse_automaton(text: str, file: str = "<string>") -> LayeredNfa:
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), 1)]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError(file, 1, "empty automaton file")
    lineno, first = lines[0]
    parts = first.split()
    if parts[0] == "builtin":
        if len(parts) != 3 or parts[1] != "validity":
            raise ParseError(file, lineno, "expected 'builtin validity <w>'")
        try:
            return validity_automaton(int(parts[2]))
        except ValueError:
            raise ParseError(file, lineno, f"bad width {parts[2]!r}") from None
    fields = _header_fields(first, "sofa", file, lineno)
    try:
        arity = int(fields["arity"])
        widths = tuple(int(x) for x in fields["widths"].split(","))
    except (KeyError, ValueError):
        raise ParseError(file, lineno, "header needs arity= and widths=") from None
    if len(widths) != arity:
        raise ParseError(file, lineno, "number of widths differs from arity")
    states: list[str] = []
    initial: list[str] = []
    final: list[str] = []
    trans = []
    for lineno, ln in lines[1:]:
        key, _, rest = ln.partition(" ")
        if key == "states":
            states = rest.split()
        elif key == "initial":
            initial = rest.split()
        elif key == "final":
            final = rest.split()
        elif key == "trans":
            src, _, rest = rest.strip().partition(" ")
            body, _, dst = rest.strip().rpartition(" ")
            groups = body.split("|")
            if len(groups) != arity or not all(g.startswith("{") and g.endswith("}") for g in groups):
                raise ParseError(file, lineno, f"expected {arity} brace groups")
            sym = tuple(Layer(_parse_triples(g[1:-1], file, lineno)) for g in groups)
            for s in (src, dst):
                if s not in states:
                    raise ParseError(file, lineno, f"unknown state {s!r}")
            trans.append((src, sym, dst))
        else:
            raise ParseError(file, lineno, f"unknown section {key!r}")
    for s in initial + final:
        if s not in states:
            raise ParseError(file, lines[0][0], f"unknown state {s!r}")
    try:
        return ExplicitNfa(widths, states, initial, final, trans)
    except WidthViolation as err:
        raise ParseError(file, lineno, str(err)) from None
