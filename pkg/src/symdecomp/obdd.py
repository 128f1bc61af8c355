"""Layered ordered binary decision diagrams.

An OBDD of length ``n`` is a string of ``n`` layers.  A layer is a set of
``(q, a, q')`` transition triples over state indices ``0 .. w-1``.  A bit
string is accepted when its unique run ends in a nonzero state.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernels
from .errors import (
    ArityTooLarge,
    Condition1Violation,
    Condition2Violation,
    Condition3Violation,
    IndexOutOfRange,
    LengthMismatch,
    ParseError,
    WidthViolation,
)

TABLE_MAX_ARITY = 16


class Layer:
    """An immutable set of transition triples."""

    __slots__ = ("triples", "dom", "im", "table", "max_index", "_hash")

    def __init__(self, triples: Iterable[tuple[int, int, int]]):
        ts = tuple(sorted(set((int(q), int(a), int(r)) for q, a, r in triples)))
        for q, a, r in ts:
            if a not in (0, 1) or q < 0 or r < 0:
                raise ValueError(f"malformed triple {(q, a, r)}")
        self.triples = ts
        self.dom = frozenset(q for q, _, _ in ts)
        self.im = frozenset(r for _, _, r in ts)
        self.max_index = max((max(q, r) for q, _, r in ts), default=-1)
        table = {}
        for q, a, r in ts:
            if (q, a) in table:
                table = None
                break
            table[q, a] = r
        if table is not None and len(table) != 2 * len(self.dom):
            table = None
        # (q, a) -> q' when the layer is deterministic and complete on its domain
        self.table = table
        self._hash = hash(ts)

    @property
    def is_function(self) -> bool:
        return self.table is not None

    def target(self, q: int, a: int) -> int:
        return self.table[q, a]

    def __eq__(self, other):
        return isinstance(other, Layer) and self.triples == other.triples

    def __lt__(self, other):
        return self.triples < other.triples

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def __repr__(self):
        return f"Layer({list(self.triples)!r})"

    def format(self) -> str:
        return " ; ".join(f"{q} {a} -> {r}" for q, a, r in self.triples)


_INTERN: dict[tuple, Layer] = {}
_INTERN_MAX = 1 << 20


def layer_from_targets(sources: Sequence[int], targets: Sequence[int]) -> Layer:
    """Deterministic layer from sorted sources and a flat target list.

    ``targets[2*j + a]`` is the target of ``sources[j]`` on bit ``a``.  Layers
    built this way are interned, so repeated construction is cheap.
    """
    key = (tuple(sources), tuple(targets))
    b = _INTERN.get(key)
    if b is None:
        ts = tuple((q, a, targets[2 * j + a]) for j, q in enumerate(sources) for a in (0, 1))
        b = Layer.__new__(Layer)
        b.triples = ts
        b.dom = frozenset(sources)
        b.im = frozenset(targets)
        b.max_index = max(max(sources), max(targets)) if ts else -1
        b.table = {(q, a): r for q, a, r in ts}
        b._hash = hash(ts)
        if len(_INTERN) >= _INTERN_MAX:
            _INTERN.clear()
        _INTERN[key] = b
    return b


class Obdd:
    """A validated OBDD; build instances with :func:`validate_obdd`."""

    __slots__ = ("layers", "width_bound", "_hash")

    def __init__(self, layers: tuple[Layer, ...], width_bound: int):
        self.layers = layers
        self.width_bound = width_bound
        self._hash = hash((layers, width_bound))

    def __len__(self):
        return len(self.layers)

    @property
    def n(self) -> int:
        return len(self.layers)

    @property
    def width(self) -> int:
        return max(len(b.im) for b in self.layers)

    @property
    def size(self) -> int:
        return len(self.layers[0].dom) + sum(len(b.im) for b in self.layers)

    def __eq__(self, other):
        return (
            isinstance(other, Obdd)
            and self.width_bound == other.width_bound
            and self.layers == other.layers
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Obdd(n={self.n}, width_bound={self.width_bound}, width={self.width})"

    def __call__(self, x) -> int:
        return evaluate(self, x)


def validate_obdd(layers: Sequence, w: int) -> Obdd:
    """Check the three OBDD conditions and return an :class:`Obdd`.

    Raises ``Condition{1,2,3}Violation`` naming the offending (1-based) layer,
    or :class:`WidthViolation` when an index is not below ``w``.
    """
    if w < 1:
        raise ValueError("width bound must be positive")
    layers = tuple(b if isinstance(b, Layer) else Layer(b) for b in layers)
    if not layers:
        raise ValueError("an OBDD needs at least one layer")
    for i, b in enumerate(layers, 1):
        if b.max_index >= w:
            raise WidthViolation(f"layer {i} uses state {b.max_index} >= width bound {w}")
    if layers[0].dom != {0}:
        raise Condition1Violation(1, f"domain of first layer is {sorted(layers[0].dom)}")
    for i in range(len(layers) - 1):
        if layers[i].im != layers[i + 1].dom:
            raise Condition2Violation(
                i + 1,
                f"image {sorted(layers[i].im)} differs from next domain {sorted(layers[i + 1].dom)}",
            )
    for i, b in enumerate(layers, 1):
        if not b.is_function:
            seen = {}
            for q, a, r in b.triples:
                seen.setdefault((q, a), []).append(r)
            for q in sorted(b.dom):
                for a in (0, 1):
                    got = seen.get((q, a), [])
                    if len(got) != 1:
                        what = "missing" if not got else "duplicate"
                        raise Condition3Violation(i, f"{what} transition for ({q}, {a})")
    return Obdd(layers, w)


def _bits(x, n: int) -> tuple[int, ...]:
    if isinstance(x, str):
        bits = tuple(int(c) for c in x)
    else:
        bits = tuple(int(c) for c in x)
    if len(bits) != n:
        raise LengthMismatch(f"input of length {len(bits)} for OBDD of length {n}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"not a bit string: {x!r}")
    return bits


def run(d: Obdd, x) -> int:
    """Final state reached by ``x``."""
    q = 0
    for b, a in zip(d.layers, _bits(x, d.n)):
        q = b.table[q, a]
    return q


def evaluate(d: Obdd, x) -> int:
    return int(run(d, x) != 0)


# --------------------------------------------------------------------------
# Boolean operations


def _pair_product(d1: Obdd, d2: Obdd, conj: bool) -> Obdd:
    if d1.n != d2.n:
        raise LengthMismatch(f"lengths {d1.n} and {d2.n} differ")
    w2 = d2.width_bound

    def gamma(q, r):
        return q * w2 + r

    reach = {(0, 0)}
    layers = []
    for i, (b1, b2) in enumerate(zip(d1.layers, d2.layers)):
        last = i == d1.n - 1
        triples = []
        nxt = set()
        for q, r in reach:
            for a in (0, 1):
                p, s = b1.table[q, a], b2.table[r, a]
                if last and conj and (p == 0 or s == 0):
                    t = 0
                else:
                    t = gamma(p, s)
                triples.append((gamma(q, r), a, t))
                nxt.add((p, s))
        reach = nxt
        layers.append(Layer(triples))
    return Obdd(tuple(layers), d1.width_bound * w2)


def negate_layer(b: Layer) -> Layer:
    """Send zero targets to state 1 and nonzero targets to state 0."""
    return Layer((q, a, 1 if r == 0 else 0) for q, a, r in b.triples)


def apply(op: str, d1: Obdd, d2: Obdd | None = None) -> Obdd:
    """Apply AND, OR or NOT to OBDDs.

    AND and OR run the pairing product restricted to reachable state pairs;
    for AND the last layer collapses every pair with a zero component to 0.
    NOT rewrites the last layer only.  The result is not minimised.
    """
    op = op.lower()
    if op == "not":
        if d2 is not None:
            raise TypeError("NOT takes a single OBDD")
        layers = d1.layers[:-1] + (negate_layer(d1.layers[-1]),)
        return Obdd(layers, max(d1.width_bound, 2))
    if d2 is None:
        raise TypeError(f"{op.upper()} needs two OBDDs")
    if op == "and":
        return _pair_product(d1, d2, conj=True)
    if op == "or":
        return _pair_product(d1, d2, conj=False)
    raise ValueError(f"unknown operation {op!r}")


# --------------------------------------------------------------------------
# Canonical form


def canonicalize(d: Obdd) -> Obdd:
    """Minimum-size normalised OBDD with the same language.

    Backward pass: merge states with identical successor classes, starting
    from the reject/accept split of the last image.  Forward pass: relabel
    each image in order of the lexicographically-first reaching string; the
    last image uses 0 for rejection and 1 for acceptance.
    """
    n = d.n
    cls: list[dict[int, int]] = [None] * (n + 1)  # type: ignore[list-item]
    cls[n] = {q: int(q != 0) for q in d.layers[-1].im}
    for i in range(n - 1, -1, -1):
        b = d.layers[i]
        sigs: dict[tuple[int, int], int] = {}
        c = {}
        nxt = cls[i + 1]
        for q in sorted(b.dom):
            sig = (nxt[b.table[q, 0]], nxt[b.table[q, 1]])
            c[q] = sigs.setdefault(sig, len(sigs))
        cls[i] = c

    labels = {cls[0][0]: 0}
    layers = []
    for i, b in enumerate(d.layers):
        rep: dict[int, int] = {}
        for q in b.dom:
            rep.setdefault(cls[i][q], q)
        last = i == n - 1
        nxt_labels: dict[int, int] = {}
        triples = []
        for c, lab in sorted(labels.items(), key=lambda kv: kv[1]):
            q = rep[c]
            for a in (0, 1):
                tc = cls[i + 1][b.table[q, a]]
                tl = tc if last else nxt_labels.setdefault(tc, len(nxt_labels))
                triples.append((lab, a, tl))
        labels = nxt_labels
        layers.append(Layer(triples))
    bound = max(1, max(b.max_index for b in layers) + 1)
    return Obdd(tuple(layers), bound)


def is_canonical(d: Obdd) -> bool:
    return canonicalize(d) == d


def equivalent(d1: Obdd, d2: Obdd) -> bool:
    if d1.n != d2.n:
        raise LengthMismatch(f"lengths {d1.n} and {d2.n} differ")
    return canonicalize(d1).layers == canonicalize(d2).layers


def hypercube(n: int, i: int) -> Obdd:
    """Canonical OBDD of the function that returns bit ``i`` (1-based)."""
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"coordinate {i} not in 1..{n}")
    pass_through = [(0, 0, 0), (0, 1, 0)]
    layers = []
    for j in range(1, n + 1):
        if j < i:
            layers.append(pass_through)
        elif j == i:
            layers.append([(0, 0, 0), (0, 1, 1)])
        else:
            layers.append([(0, 0, 0), (0, 1, 0), (1, 0, 1), (1, 1, 1)])
    return canonicalize(validate_obdd(layers, 2))


def constant(n: int, value: int) -> Obdd:
    """Canonical OBDD of a constant function."""
    layers = [[(0, 0, 0), (0, 1, 0)]] * (n - 1) + [[(0, 0, value), (0, 1, value)]]
    return validate_obdd(layers, 2 if value else 1)


def junta_variables(d: Obdd) -> frozenset[int]:
    """Coordinates (1-based) that the function of ``d`` depends on."""
    c = canonicalize(d)
    return frozenset(
        i
        for i, b in enumerate(c.layers, 1)
        if any(b.table[q, 0] != b.table[q, 1] for q in b.dom)
    )


def is_junta(d: Obdd, k: int) -> bool:
    return len(junta_variables(d)) <= k


# --------------------------------------------------------------------------
# Truth tables


@dataclass(frozen=True)
class TruthTable:
    """A Boolean function on ``n`` bits; ``bits[i]`` is the value on the
    input whose binary expansion (x_1 most significant) is ``i``."""

    n: int
    bits: bytes

    def __post_init__(self):
        if len(self.bits) != 1 << self.n:
            raise ValueError("table length must be 2**n")

    def __call__(self, x) -> int:
        return self.bits[int("".join(map(str, _bits(x, self.n))), 2)] if self.n else self.bits[0]

    @classmethod
    def from_function(cls, n: int, f) -> "TruthTable":
        return cls(n, bytes(int(bool(f(x))) for x in itertools.product((0, 1), repeat=n)))

    @classmethod
    def from_array(cls, n: int, arr) -> "TruthTable":
        return cls(n, np.asarray(arr, dtype=np.uint8).tobytes())

    def array(self) -> np.ndarray:
        return np.frombuffer(self.bits, dtype=np.uint8)

    def support(self) -> list[str]:
        return [format(i, f"0{self.n}b") for i, v in enumerate(self.bits) if v]


def dense_transitions(d: Obdd) -> np.ndarray:
    trans = np.full((d.n, d.width_bound, 2), -1, dtype=np.int32)
    for i, b in enumerate(d.layers):
        for q, a, r in b.triples:
            trans[i, q, a] = r
    return trans


def table_from_obdd(d: Obdd) -> TruthTable:
    if d.n > TABLE_MAX_ARITY:
        raise ArityTooLarge(f"truth tables are limited to n <= {TABLE_MAX_ARITY}")
    return TruthTable(d.n, kernels.eval_all(dense_transitions(d)).tobytes())


def obdd_from_table(t: TruthTable) -> Obdd:
    """Canonical OBDD of a truth table (n >= 1)."""
    if t.n > TABLE_MAX_ARITY:
        raise ArityTooLarge(f"truth tables are limited to n <= {TABLE_MAX_ARITY}")
    if t.n < 1:
        raise ValueError("OBDDs have length at least 1")
    cls = kernels.residual_classes(t.array(), t.n)
    final = t.array()
    layers = []
    for i in range(t.n):
        src, dst = cls[i], cls[i + 1]
        last = i == t.n - 1
        triples = set()
        for p in range(src.size):
            for a in (0, 1):
                r = int(final[2 * p + a]) if last else int(dst[2 * p + a])
                triples.add((int(src[p]), a, r))
        layers.append(triples)
    bound = max(2 if t.bits.count(1) else 1, max(int(c.max()) + 1 for c in cls[:-1]))
    return canonicalize(validate_obdd(layers, bound))


def accepted_strings(d: Obdd) -> set[str]:
    return set(table_from_obdd(d).support())


# --------------------------------------------------------------------------
# Text format


def format_obdd(d: Obdd) -> str:
    lines = [f"obdd width={d.width_bound} length={d.n}"]
    for i, b in enumerate(d.layers, 1):
        lines.append(f"layer {i}: {b.format()}")
    return "\n".join(lines) + "\n"


def _parse_triples(body: str, file: str, lineno: int) -> list[tuple[int, int, int]]:
    triples = []
    for part in body.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            lhs, rhs = part.split("->")
            q, a = lhs.split()
            triples.append((int(q), int(a), int(rhs)))
        except ValueError:
            raise ParseError(file, lineno, f"malformed transition {part!r}") from None
    return triples


def _header_fields(line: str, keyword: str, file: str, lineno: int) -> dict[str, str]:
    parts = line.split()
    if not parts or parts[0] != keyword:
        raise ParseError(file, lineno, f"expected '{keyword}' header")
    fields = {}
    for p in parts[1:]:
        if "=" not in p:
            raise ParseError(file, lineno, f"malformed header field {p!r}")
        k, v = p.split("=", 1)
        fields[k] = v
    return fields


def parse_obdd(text: str, file: str = "<string>") -> Obdd:
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), 1)]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError(file, 1, "empty OBDD file")
    lineno, header = lines[0]
    fields = _header_fields(header, "obdd", file, lineno)
    try:
        w = int(fields["width"])
        n = int(fields["length"])
    except (KeyError, ValueError):
        raise ParseError(file, lineno, "header needs integer width= and length=") from None
    body = lines[1:]
    if len(body) != n:
        raise ParseError(file, lineno, f"expected {n} layer lines, found {len(body)}")
    layers = []
    for idx, (lineno, ln) in enumerate(body, 1):
        head, sep, rest = ln.partition(":")
        if not sep or head.split() != ["layer", str(idx)]:
            raise ParseError(file, lineno, f"expected 'layer {idx}:'")
        layers.append(_parse_triples(rest, file, lineno))
    try:
        return validate_obdd(layers, w)
    except (Condition1Violation, Condition2Violation, Condition3Violation, WidthViolation) as err:
        err.file = file
        raise


def iter_obdd_blocks(text: str) -> Iterator[str]:
    """Split text holding several OBDDs separated by ``---`` lines."""
    block: list[str] = []
    for ln in text.splitlines():
        if ln.strip() == "---":
            if block:
                yield "\n".join(block)
            block = []
        else:
            block.append(ln)
    if any(b.strip() for b in block):
        yield "\n".join(block)


def to_dot(d: Obdd) -> str:
    out = ["digraph obdd {", "  rankdir=LR;"]
    out.append('  "0_0" [label="0"];')
    for i, b in enumerate(d.layers, 1):
        for q in sorted(b.im):
            shape = "doublecircle" if i == d.n and q else "circle"
            out.append(f'  "{i}_{q}" [label="{q}", shape={shape}];')
        for q, a, r in b.triples:
            style = "solid" if a else "dashed"
            out.append(f'  "{i - 1}_{q}" -> "{i}_{r}" [label="{a}", style={style}];')
    out.append("}")
    return "\n".join(out) + "\n"


def parity_obdd(n: int) -> Obdd:
    """Width-2 OBDD accepting the odd-parity strings of length ``n``."""
    first = [(0, 0, 0), (0, 1, 1)]
    rest = [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]
    return validate_obdd([first] + [rest] * (n - 1), 2)
