"""Decomposition and reconfiguration solvers.

All solvers reduce to one question: does a tuple automaton accept a word of
length ``n``?  The automaton for a problem is assembled from validity
automata, relation automata attached with selectors, a singleton automaton
for the target and the factor class automata.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .automata import (
    LayeredNfa,
    ProductNfa,
    SearchStats,
    ValidityNfa,
    accepts,
    finite_class_automaton,
    nonempty_at_length,
    project,
    singleton_automaton,
    tensor,
    validity_automaton,
    word_obdds,
)
from .circuit import Circuit, and_tree, enumerate_circuits, gate_functions, gate_tables
from .errors import InvalidParameters, LengthMismatch, ResourceLimit
from .obdd import Obdd, canonicalize, hypercube, table_from_obdd
from .relations import RelationKind, Selector, Tag, build_relation, equality_automaton, selector_select

DEFAULT_MAX_WIDTH = 64
POINTWISE_MAX_N = 12


@dataclass(frozen=True)
class ProblemInstance:
    """Target OBDD, circuit, factor width ``p`` and optional gate width ``w``.

    ``classes`` holds one class automaton per input (or a single one that is
    replicated); ``None`` means every width-``p`` function is allowed.
    """

    target: Obdd
    circuit: Circuit
    p: int
    w: Optional[int] = None
    classes: Optional[tuple] = None
    syntactic_class: bool = False

    def __post_init__(self):
        if self.p < 1:
            raise InvalidParameters("factor width must be positive")
        if self.classes is not None:
            cls = tuple(self.classes)
            if len(cls) == 1:
                cls = cls * self.circuit.k
            if len(cls) != self.circuit.k:
                raise InvalidParameters(
                    f"{len(cls)} class automata for a circuit with {self.circuit.k} inputs"
                )
            object.__setattr__(self, "classes", cls)

    @property
    def k(self) -> int:
        return self.circuit.k

    @property
    def n(self) -> int:
        return self.target.n

    def class_automata(self) -> tuple[LayeredNfa, ...]:
        if self.classes is None:
            return (validity_automaton(self.p),) * self.k
        return self.classes


@dataclass
class Witness:
    factors: tuple[Obdd, ...]
    per_gate: tuple[Obdd, ...]
    reconfig_width: int
    verified: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v for k, v in self.verified.items() if isinstance(v, bool))

    def format(self) -> str:
        from .obdd import format_obdd

        head = (
            f"witness k={len(self.factors)} n={self.factors[0].n} "
            f"reconfig_width={self.reconfig_width}\n"
        )
        return head + "---\n".join(format_obdd(d) for d in self.factors)


@dataclass
class SolveResult:
    witness: Optional[Witness]
    stats: SearchStats
    width: int
    wall_ms: float = 0.0


# --------------------------------------------------------------------------
# Languages


def _gate_selector(w: int, c: Circuit, i: int, route: str) -> Selector:
    g = c.gate(i)
    if g.op == "not":
        rel = build_relation(RelationKind(Tag.NOT, (w, w)), route)
        return Selector(rel, (g.args[0], i), c.m)
    tag = Tag.AND if g.op == "and" else Tag.OR
    rel = build_relation(RelationKind(tag, (w, w, w)), route)
    return Selector(rel, (g.args[0], g.args[1], i), c.m)


def con_language(w: int, c: Circuit, route: str = "pairing") -> LayeredNfa:
    """Tuples of width-``w`` OBDDs, one per gate, obeying every gate equation."""
    if w < 1:
        raise InvalidParameters("width must be positive")
    lang = tensor(*[validity_automaton(w) for _ in range(c.m)])
    for i, g in enumerate(c.gates, 1):
        if g.op != "input":
            lang = selector_select(lang, _gate_selector(w, c, i, route))
    return lang


def sol_language(w: int, d: Obdd, c: Circuit, route: str = "pairing") -> LayeredNfa:
    """Input tuples whose gate functions fit width ``w`` and whose output is ``f_D``."""
    m = c.m
    host = tensor(con_language(w, c, route), singleton_automaton(d))
    eq = equality_automaton(w, d.width_bound)
    lang = selector_select(host, Selector(eq, (m, m + 1), m + 1))
    return project(lang, c.input_positions)


def closed_class(a: LayeredNfa, p: int) -> LayeredNfa:
    """Width-``p`` OBDDs computing some function of the class of ``a``."""
    if isinstance(a, ValidityNfa):
        return validity_automaton(min(a.w, p))
    wa = a.widths[0] if a.widths[0] is not None else p
    eq = equality_automaton(p, wa)
    return ProductNfa(
        [(validity_automaton(p), (0,)), (a, (1,)), (eq, (0, 1))], 2, (0,), (p,)
    )


def literal_class(a: LayeredNfa, p: int) -> LayeredNfa:
    return ProductNfa([(validity_automaton(p), (0,)), (a, (0,))], 1, (0,), (p,))


def factor_classes(inst: ProblemInstance) -> list[LayeredNfa]:
    make = literal_class if inst.syntactic_class else closed_class
    return [make(a, inst.p) for a in inst.class_automata()]


def sol_constrained(inst: ProblemInstance, w: Optional[int] = None, route: str = "pairing") -> LayeredNfa:
    """Solutions whose factors lie in the (closed or literal) class automata."""
    w = w if w is not None else inst.w
    if w is None:
        raise InvalidParameters("a gate width bound is needed")
    sol = sol_language(w, inst.target, inst.circuit, route)
    k = inst.k
    comps = [(sol, range(k))] + [(a, (j,)) for j, a in enumerate(factor_classes(inst))]
    return ProductNfa(comps, k, range(k), (w,) * k)


# --------------------------------------------------------------------------
# Verification


def verify_factors(
    inst: ProblemInstance, factors: Sequence[Obdd], bound: Optional[int]
) -> Witness:
    """Re-check a factor tuple from scratch and build a :class:`Witness`."""
    c, d = inst.circuit, inst.target
    per_gate = gate_functions(c, factors)
    rw = max(g.width for g in per_gate)
    report: dict = {}
    report["lengths"] = all(f.n == d.n for f in factors)
    report["factor_widths"] = all(canonicalize(f).width <= inst.p for f in factors) and all(
        f.width_bound <= max(inst.p, 1) for f in factors
    )
    members = []
    classes = factor_classes(inst)
    for f, a in zip(factors, classes):
        members.append(accepts(a, f))
    report["class_membership"] = all(members)
    if d.n <= POINTWISE_MAX_N:
        cols = [table_from_obdd(f).array() for f in factors]
        out = gate_tables(c, cols)[-1]
        report["pointwise"] = bool(np.array_equal(out, table_from_obdd(d).array()))
        report["method"] = "exhaustive"
    else:
        report["pointwise"] = per_gate[-1].layers == canonicalize(d).layers
        report["method"] = "canonical"
    report["gate_widths"] = [g.width for g in per_gate]
    if bound is not None:
        report["width_bound"] = rw <= bound
    return Witness(tuple(factors), per_gate, rw, report)


# --------------------------------------------------------------------------
# Solvers


def _search(inst: ProblemInstance, w: int, route: str, reduced: bool) -> SolveResult:
    if inst.target.n < 1:
        raise LengthMismatch("empty target")
    lang = sol_constrained(inst, w, route)
    stats = SearchStats()
    t0 = time.perf_counter()
    word = nonempty_at_length(lang, inst.n, reduced=reduced, stats=stats)
    witness = None
    if word is not None:
        factors = word_obdds(word, (inst.p,) * inst.k)
        witness = verify_factors(inst, factors, w)
    return SolveResult(witness, stats, w, (time.perf_counter() - t0) * 1000)


def solve_reconfiguration(
    inst: ProblemInstance, *, route: str = "pairing", reduced: bool = True
) -> SolveResult:
    if inst.w is None:
        raise InvalidParameters("reconfiguration needs a gate width bound w")
    if inst.p >= inst.w:
        raise InvalidParameters(f"factor width p={inst.p} must be below w={inst.w}")
    return _search(inst, inst.w, route, reduced)


def decide_reconfiguration(inst: ProblemInstance, **kw) -> Optional[Witness]:
    return solve_reconfiguration(inst, **kw).witness


def decomposition_width(p: int, depth: int) -> int:
    """Gate width that makes the decomposition search complete."""
    return max(2, p ** (2 ** depth))


def solve_decomposition(
    inst: ProblemInstance,
    *,
    max_width: int = DEFAULT_MAX_WIDTH,
    route: str = "pairing",
    reduced: bool = True,
) -> SolveResult:
    """Search at the complete gate width ``max(2, p^(2^depth))``.

    When that width is above ``max_width`` the search runs at the ceiling
    instead.  A hit there is still a correct YES; a miss raises
    :class:`ResourceLimit` because it would not be a conclusive NO.
    """
    w = decomposition_width(inst.p, inst.circuit.depth)
    if w <= max_width:
        return _search(inst, w, route, reduced)
    if max_width > inst.p:
        res = _search(inst, max_width, route, reduced)
        if res.witness is not None:
            return res
    raise ResourceLimit(
        f"gate width {inst.p}^(2^{inst.circuit.depth}) = {w} exceeds the ceiling {max_width}"
    )


def decide_decomposition(inst: ProblemInstance, **kw) -> Optional[Witness]:
    return solve_decomposition(inst, **kw).witness


def decide_generalized_junta(
    d: Obdd,
    k: int,
    p: int,
    m_max: int,
    classes=None,
    *,
    max_width: int = DEFAULT_MAX_WIDTH,
    syntactic_class: bool = False,
    skipped: Optional[list] = None,
) -> Optional[tuple[Circuit, Witness]]:
    """First circuit (in enumeration order) through which ``f_D`` decomposes.

    Circuits whose search width exceeds ``max_width`` are skipped; if nothing
    is found and some circuit was skipped the answer is unknown and
    :class:`ResourceLimit` is raised.
    """
    if k < 1 or m_max < k:
        raise InvalidParameters("need k >= 1 and m_max >= k")
    skipped = skipped if skipped is not None else []
    for c in enumerate_circuits(k, m_max):
        inst = ProblemInstance(d, c, p, None, classes, syntactic_class)
        try:
            wit = decide_decomposition(inst, max_width=max_width)
        except ResourceLimit:
            skipped.append(c)
            continue
        if wit is not None:
            return c, wit
    if skipped:
        raise ResourceLimit(
            f"no decomposition found, but {len(skipped)} circuit(s) exceeded the width ceiling {max_width}"
        )
    return None


def factorize_obdd(d: Obdd, k: int, *, max_width: int = DEFAULT_MAX_WIDTH) -> Optional[tuple[Obdd, ...]]:
    """Narrower OBDDs whose languages intersect to ``L(D)``."""
    w = canonicalize(d).width
    if w < 2:
        raise InvalidParameters("factorization needs canonical width at least 2")
    if k < 2:
        raise InvalidParameters("factorization needs k >= 2")
    inst = ProblemInstance(d, and_tree(k), w - 1)
    wit = decide_decomposition(inst, max_width=max_width)
    return None if wit is None else wit.factors


def hypercube_class(n: int) -> LayeredNfa:
    """Automaton accepting exactly the hypercube OBDDs of length ``n``."""
    return finite_class_automaton([hypercube(n, i) for i in range(1, n + 1)], 2)


def con_member_by_definition(c: Circuit, gates: Sequence[Obdd], w: int) -> bool:
    """Pointwise check of every gate equation (reference for tests)."""
    if len(gates) != c.m:
        return False
    if any(g.width_bound > w for g in gates):
        return False
    tabs = [table_from_obdd(g).array() for g in gates]
    for i, g in enumerate(c.gates):
        if g.op == "not":
            want = 1 - tabs[g.args[0] - 1]
        elif g.op == "and":
            want = tabs[g.args[0] - 1] & tabs[g.args[1] - 1]
        elif g.op == "or":
            want = tabs[g.args[0] - 1] | tabs[g.args[1] - 1]
        else:
            continue
        if not np.array_equal(want, tabs[i]):
            return False
    return True
