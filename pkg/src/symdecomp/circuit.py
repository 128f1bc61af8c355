"""Boolean circuits with AND, OR and NOT gates over k input variables.

Gates are numbered from 1.  Every variable appears as exactly one input gate,
arguments refer to earlier gates, and the last gate is the only one that
feeds no other gate.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    ArityTooLarge,
    DuplicateVariable,
    ForwardReference,
    LengthMismatch,
    MissingVariable,
    MultipleOutputs,
    ParseError,
    ValidationError,
)
from .obdd import TABLE_MAX_ARITY, Obdd, TruthTable, apply, canonicalize

OPS = ("input", "not", "and", "or")


@dataclass(frozen=True)
class Gate:
    op: str
    args: tuple[int, ...]

    def __post_init__(self):
        if self.op not in OPS:
            raise ValidationError(f"unknown gate type {self.op!r}")
        want = {"input": 1, "not": 1, "and": 2, "or": 2}[self.op]
        if len(self.args) != want:
            raise ValidationError(f"{self.op} gate takes {want} argument(s)")

    @classmethod
    def x(cls, v: int) -> "Gate":
        return cls("input", (v,))

    @classmethod
    def neg(cls, j: int) -> "Gate":
        return cls("not", (j,))

    @classmethod
    def conj(cls, j: int, l: int) -> "Gate":
        return cls("and", (j, l))

    @classmethod
    def disj(cls, j: int, l: int) -> "Gate":
        return cls("or", (j, l))

    @property
    def refs(self) -> tuple[int, ...]:
        return () if self.op == "input" else self.args

    def format(self) -> str:
        if self.op == "input":
            return f"x{self.args[0]}"
        return " ".join([self.op.upper()] + [f"g{j}" for j in self.args])


@dataclass(frozen=True)
class Circuit:
    gates: tuple[Gate, ...]
    k: int
    depths: tuple[int, ...]
    input_positions: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.gates)

    @property
    def depth(self) -> int:
        return self.depths[-1]

    def gate(self, i: int) -> Gate:
        return self.gates[i - 1]

    def __iter__(self):
        return iter(self.gates)

    def __len__(self):
        return len(self.gates)


def _coerce(g) -> Gate:
    if isinstance(g, Gate):
        return g
    op, *args = g
    op = {"x": "input", "var": "input"}.get(op.lower(), op.lower())
    return Gate(op, tuple(int(a) for a in args))


def validate_circuit(gates: Sequence, k: int) -> Circuit:
    """Check the structural conditions and compute depths.

    Checks run in the order: variables (duplicates, then missing), argument
    references, then uniqueness of the output gate.
    """
    gates = tuple(_coerce(g) for g in gates)
    if not gates:
        raise ValidationError("a circuit needs at least one gate")
    if k < 1:
        raise ValidationError("a circuit needs at least one input")
    pos = {}
    for i, g in enumerate(gates, 1):
        if g.op == "input":
            v = g.args[0]
            if not 1 <= v <= k:
                raise ValidationError(f"gate g{i} reads x{v} outside x1..x{k}")
            if v in pos:
                raise DuplicateVariable(f"x{v} is read by g{pos[v]} and g{i}")
            pos[v] = i
    for v in range(1, k + 1):
        if v not in pos:
            raise MissingVariable(f"no input gate reads x{v}")
    used = set()
    depths = []
    for i, g in enumerate(gates, 1):
        for j in g.refs:
            if not 1 <= j < i:
                raise ForwardReference(f"gate g{i} refers to g{j}")
            used.add(j)
        depths.append(0 if g.op == "input" else 1 + max(depths[j - 1] for j in g.refs))
    unused = [i for i in range(1, len(gates)) if i not in used]
    if unused:
        raise MultipleOutputs(f"gate g{unused[0]} feeds no other gate")
    return Circuit(gates, k, tuple(depths), tuple(pos[v] for v in range(1, k + 1)))


# --------------------------------------------------------------------------
# Semantics


def evaluate_circuit(c: Circuit, x: Sequence[int]) -> int:
    """Value of the output gate on one input (recursive reference)."""
    if len(x) != c.k:
        raise LengthMismatch(f"{len(x)} inputs for a circuit over {c.k} variables")

    def val(i):
        g = c.gate(i)
        if g.op == "input":
            return int(x[g.args[0] - 1])
        if g.op == "not":
            return 1 - val(g.args[0])
        a, b = val(g.args[0]), val(g.args[1])
        return a & b if g.op == "and" else a | b

    return val(c.m)


def gate_tables(c: Circuit, inputs: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Gate values over a batch: ``inputs[v]`` holds the values of x_{v+1}."""
    vals: list[np.ndarray] = []
    for g in c.gates:
        if g.op == "input":
            vals.append(np.asarray(inputs[g.args[0] - 1], dtype=np.uint8))
        elif g.op == "not":
            vals.append(1 - vals[g.args[0] - 1])
        elif g.op == "and":
            vals.append(vals[g.args[0] - 1] & vals[g.args[1] - 1])
        else:
            vals.append(vals[g.args[0] - 1] | vals[g.args[1] - 1])
    return vals


def truth_table(c: Circuit) -> TruthTable:
    if c.k > TABLE_MAX_ARITY:
        raise ArityTooLarge(f"truth tables are limited to k <= {TABLE_MAX_ARITY}")
    idx = np.arange(1 << c.k)
    cols = [((idx >> (c.k - 1 - v)) & 1).astype(np.uint8) for v in range(c.k)]
    return TruthTable(c.k, gate_tables(c, cols)[-1].astype(np.uint8).tobytes())


def gate_functions(c: Circuit, inputs: Sequence[Obdd]) -> tuple[Obdd, ...]:
    """Canonical OBDD of every gate function applied to the input OBDDs."""
    if len(inputs) != c.k:
        raise LengthMismatch(f"{len(inputs)} OBDDs for a circuit over {c.k} variables")
    n = inputs[0].n
    if any(d.n != n for d in inputs):
        raise LengthMismatch("input OBDDs have different lengths")
    out: list[Obdd] = []
    for g in c.gates:
        if g.op == "input":
            out.append(canonicalize(inputs[g.args[0] - 1]))
        elif g.op == "not":
            out.append(canonicalize(apply("not", out[g.args[0] - 1])))
        else:
            out.append(canonicalize(apply(g.op, out[g.args[0] - 1], out[g.args[1] - 1])))
    return tuple(out)


def reconfiguration_width(c: Circuit, inputs: Sequence[Obdd]) -> int:
    return max(d.width for d in gate_functions(c, inputs))


# --------------------------------------------------------------------------
# Enumeration


def enumerate_circuits(k: int, m_max: int, semantic_dedupe: bool = False) -> Iterator[Circuit]:
    """Every valid circuit with ``k`` inputs and at most ``m_max`` gates.

    Circuits come in order of size.  Input gates come first in variable
    order, internal gates have nondecreasing depth, and binary gates list
    their arguments as ``j <= l``.  With ``semantic_dedupe`` only the first
    circuit computing each truth table is kept.
    """
    if k < 1 or m_max < k:
        return
    seen_tables = set()
    for m in range(k, m_max + 1):
        for c in _circuits_of_size(k, m):
            if semantic_dedupe:
                t = truth_table(c).bits
                if t in seen_tables:
                    continue
                seen_tables.add(t)
            yield c


def _circuits_of_size(k: int, m: int) -> Iterator[Circuit]:
    inputs = [Gate.x(v) for v in range(1, k + 1)]
    depths = [0] * k

    def rec(gates, depths, used):
        i = len(gates) + 1
        if len(gates) == m:
            unused = [j for j in range(1, m) if j not in used]
            if not unused:
                yield validate_circuit(gates, k)
            return
        # every gate not yet used must be consumed by the remaining gates
        pending = sum(1 for j in range(1, len(gates) + 1) if j not in used)
        if pending > m - len(gates) + 1:
            return
        floor = depths[-1] if len(gates) > k else 0
        for g in _gate_choices(i):
            d = 1 + max(depths[j - 1] for j in g.refs)
            if d < floor:
                continue
            yield from rec(gates + [g], depths + [d], used | set(g.refs))

    yield from rec(list(inputs), depths, frozenset())


def _gate_choices(i: int) -> Iterator[Gate]:
    for j in range(1, i):
        yield Gate.neg(j)
    for j, l in itertools.combinations_with_replacement(range(1, i), 2):
        yield Gate.conj(j, l)
    for j, l in itertools.combinations_with_replacement(range(1, i), 2):
        yield Gate.disj(j, l)


# --------------------------------------------------------------------------
# Builders and text format


def and_circuit() -> Circuit:
    return validate_circuit([Gate.x(1), Gate.x(2), Gate.conj(1, 2)], 2)


def or_circuit() -> Circuit:
    return validate_circuit([Gate.x(1), Gate.x(2), Gate.disj(1, 2)], 2)


def not_circuit() -> Circuit:
    return validate_circuit([Gate.x(1), Gate.neg(1)], 1)


def identity_circuit() -> Circuit:
    return validate_circuit([Gate.x(1)], 1)


def xor_circuit() -> Circuit:
    """OR(x1 AND NOT x2, NOT x1 AND x2) with seven gates."""
    return validate_circuit(
        [
            Gate.x(1),
            Gate.x(2),
            Gate.neg(1),
            Gate.neg(2),
            Gate.conj(1, 4),
            Gate.conj(3, 2),
            Gate.disj(5, 6),
        ],
        2,
    )


def and_tree(k: int) -> Circuit:
    """Left-leaning conjunction ``(((x1 AND x2) AND x3) ...)``."""
    gates = [Gate.x(v) for v in range(1, k + 1)]
    if k == 1:
        return validate_circuit(gates, 1)
    gates.append(Gate.conj(1, 2))
    for v in range(3, k + 1):
        gates.append(Gate.conj(len(gates), v))
    return validate_circuit(gates, k)


def format_circuit(c: Circuit) -> str:
    lines = [f"circuit inputs={c.k}"]
    lines += [f"g{i} = {g.format()}" for i, g in enumerate(c.gates, 1)]
    return "\n".join(lines) + "\n"


def _gate_ref(tok: str, file: str, lineno: int) -> int:
    if not tok.startswith("g") or not tok[1:].isdigit():
        raise ParseError(file, lineno, f"expected a gate reference, got {tok!r}")
    return int(tok[1:])


def parse_circuit(text: str, file: str = "<string>") -> Circuit:
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), 1)]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError(file, 1, "empty circuit file")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or parts[0] != "circuit" or not parts[1].startswith("inputs="):
        raise ParseError(file, lineno, "expected 'circuit inputs=<k>'")
    try:
        k = int(parts[1][len("inputs="):])
    except ValueError:
        raise ParseError(file, lineno, "inputs must be an integer") from None
    numbered = {}
    for lineno, ln in lines[1:]:
        lhs, eq, rhs = ln.partition("=")
        if not eq:
            raise ParseError(file, lineno, "expected 'g<i> = ...'")
        i = _gate_ref(lhs.strip(), file, lineno)
        if i in numbered:
            raise ParseError(file, lineno, f"gate g{i} defined twice")
        toks = rhs.split()
        if len(toks) == 1 and toks[0].startswith("x") and toks[0][1:].isdigit():
            g = Gate.x(int(toks[0][1:]))
        elif toks and toks[0] in ("NOT", "AND", "OR"):
            refs = tuple(_gate_ref(t, file, lineno) for t in toks[1:])
            try:
                g = Gate(toks[0].lower(), refs)
            except ValidationError as err:
                raise ParseError(file, lineno, str(err)) from None
        else:
            raise ParseError(file, lineno, f"cannot parse gate {rhs.strip()!r}")
        numbered[i] = (g, lineno)
    if not numbered:
        raise ParseError(file, lineno, "circuit has no gates")
    variables = [g.args[0] for g, _ in numbered.values() if g.op == "input"]
    seen = set()
    for v in variables:
        if v in seen:
            raise DuplicateVariable(f"{file}: x{v} is read by two input gates")
        seen.add(v)
    for v in range(1, k + 1):
        if v not in seen:
            raise MissingVariable(f"{file}: no input gate reads x{v}")
    m = max(numbered)
    for i in range(1, m + 1):
        if i not in numbered:
            raise ParseError(file, lines[-1][0], f"gate g{i} is not defined")
    return validate_circuit([numbered[i][0] for i in range(1, m + 1)], k)
