"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line (with its runtime against the bound) that
is echoed in the terminal summary.
"""
import itertools
import random
import time

import numpy as np

from helpers import all_tables, criterion, duplicate, relabel, tree_obdd
from symdecomp.automata import accepts, tensor_word, validity_automaton
from symdecomp.circuit import (
    and_circuit,
    enumerate_circuits,
    gate_functions,
    not_circuit,
    or_circuit,
    reconfiguration_width,
    xor_circuit,
)
from symdecomp.errors import DecompError
from symdecomp.obdd import (
    Layer,
    TruthTable,
    accepted_strings,
    apply,
    canonicalize,
    evaluate,
    hypercube,
    junta_variables,
    obdd_from_table,
    parse_obdd,
    table_from_obdd,
    validate_obdd,
)
from symdecomp.oracle import SweepConfig, enumerate_obdds, min_width_oracle, sweep
from symdecomp.reconfig import (
    ProblemInstance,
    con_language,
    con_member_by_definition,
    decide_decomposition,
    factorize_obdd,
    sol_language,
)
from symdecomp.relations import RelationKind, Tag, build_relation

PARITY4 = """\
obdd width=2 length=4
layer 1: 0 0 -> 0 ; 0 1 -> 1
layer 2: 0 0 -> 0 ; 0 1 -> 1 ; 1 0 -> 1 ; 1 1 -> 0
layer 3: 0 0 -> 0 ; 0 1 -> 1 ; 1 0 -> 1 ; 1 1 -> 0
layer 4: 0 0 -> 0 ; 0 1 -> 1 ; 1 0 -> 1 ; 1 1 -> 0
"""


def _table(d):
    return table_from_obdd(d).bits


def test_criterion_1_parity_obdd():
    with criterion(1, "parity OBDD evaluation, language and canonical fixed point", 1):
        d = parse_obdd(PARITY4)
        assert evaluate(d, "1011") == 1
        assert evaluate(d, "1010") == 0
        odd = {"".join(b) for b in itertools.product("01", repeat=4) if b.count("1") % 2}
        assert accepted_strings(d) == odd and len(odd) == 8
        assert canonicalize(d) == d
        assert d.width == 2


def test_criterion_2_canonical_forms():
    rng = random.Random(2)
    with criterion(2, "canonical form on all 256 functions of 3 bits", 60):
        for t in all_tables(3):
            base = tree_obdd(t)
            can = canonicalize(base)
            assert _table(can) == t.bits
            assert canonicalize(can) == can
            encodings = [base, relabel(can, rng, extra=1), duplicate(can, rng),
                         relabel(duplicate(base, rng), rng)]
            assert len({(e.layers, e.width_bound) for e in encodings}) >= 3
            for e in encodings:
                assert _table(e) == t.bits
                assert canonicalize(e) == can
            assert can.width == min_width_oracle(t).maximum


def test_criterion_3_validity_automaton():
    rng = random.Random(3)
    with criterion(3, "validity automaton agrees with the OBDD conditions", 60):
        a = validity_automaton(2)
        assert a.state_count == 4
        for n in (1, 2, 3):
            for d in enumerate_obdds(2, n):
                assert accepts(a, d)
        agree = 0
        for _ in range(10_000):
            n = rng.randint(1, 3)
            word = []
            for _ in range(n):
                k = rng.randint(1, 8)
                word.append(Layer((rng.randrange(3), rng.randrange(2), rng.randrange(3)) for _ in range(k)))
            try:
                validate_obdd(word, 2)
                valid = True
            except (DecompError, ValueError):
                valid = False
            assert accepts(a, word) == valid
            agree += 1
        assert agree == 10_000


def _semantic_relation(tag, tables):
    if tag is Tag.EQ:
        return bool(np.array_equal(tables[0], tables[1]))
    if tag is Tag.NOT:
        return bool(np.all(tables[1] == 1 - tables[0]))
    if tag is Tag.AND:
        return bool(np.all(tables[2] == (tables[0] & tables[1])))
    return bool(np.all(tables[2] == (tables[0] | tables[1])))


def _random_obdd(rng, w, n):
    layers, dom = [], [0]
    for i in range(n):
        targets = [rng.randrange(w) for _ in range(2 * len(dom))]
        if i == n - 1 and rng.random() < 0.5:
            targets[rng.randrange(len(targets))] = 0
        layers.append([(q, a, targets[2 * j + a]) for j, q in enumerate(dom) for a in (0, 1)])
        dom = sorted(set(targets))
    return validate_obdd(layers, w)


def test_criterion_4_relation_automata():
    rng = random.Random(4)
    with criterion(4, "EQ/AND/OR/NOT membership matches semantics", 300):
        rels = {t: build_relation(RelationKind(t, (2,) * (3 if t in (Tag.AND, Tag.OR) else 2)))
                for t in (Tag.EQ, Tag.NOT, Tag.AND, Tag.OR)}
        obdds = list(enumerate_obdds(2, 2))
        tabs = {d: table_from_obdd(d).array() for d in obdds}
        for tag, rel in rels.items():
            for tup in itertools.product(obdds, repeat=rel.arity):
                want = _semantic_relation(tag, [tabs[d] for d in tup])
                assert accepts(rel, tensor_word(*tup)) == want, (tag, tup)
        for i in range(10_000):
            tag = (Tag.EQ, Tag.NOT, Tag.AND, Tag.OR)[i % 4]
            rel = rels[tag]
            tup = [_random_obdd(rng, 2, 3) for _ in range(rel.arity)]
            if rng.random() < 0.5:
                # bias towards members so both answers are exercised
                if tag is Tag.EQ:
                    tup[1] = relabel(canonicalize(tup[0]), rng)
                elif tag is Tag.NOT:
                    tup[1] = canonicalize(apply("not", tup[0]))
                else:
                    tup[2] = canonicalize(apply(tag.value, tup[0], tup[1]))
                if any(d.width_bound > 2 for d in tup):
                    continue
            tabs_ = [table_from_obdd(d).array() for d in tup]
            want = _semantic_relation(tag, tabs_)
            assert accepts(rel, tensor_word(*tup)) == want, (tag, tup)


def test_criterion_5_con_and_sol():
    with criterion(5, "consistency membership and solution-language examples", 300):
        obdds = list(enumerate_obdds(2, 2))
        for c in (and_circuit(), or_circuit(), not_circuit()):
            lang = con_language(2, c)
            for tup in itertools.product(obdds, repeat=c.m):
                assert accepts(lang, tensor_word(*tup)) == con_member_by_definition(c, tup, 2)
        d11 = obdd_from_table(TruthTable(2, bytes([0, 0, 0, 1])))
        sol = sol_language(2, d11, and_circuit())
        assert accepts(sol, tensor_word(hypercube(2, 1), hypercube(2, 2)))
        assert not accepts(sol, tensor_word(hypercube(2, 1), hypercube(2, 1)))


def test_criterion_6_solver_oracle_grid():
    with criterion(6, "solvers agree with brute force on the desk grid", 1800):
        cfg = SweepConfig(n_max=3, p_max=2, w_max=4, k_max=2, m_max=4,
                          targets_per_n=16, flip_orbits=True)
        count = mismatches = unverified = 0
        for rec in sweep(cfg):
            count += 1
            mismatches += not rec["match"]
            unverified += not rec["verified"]
        assert count > 0
        assert mismatches == 0 and unverified == 0, (mismatches, unverified)


def test_criterion_7_width_bound():
    rng = random.Random(7)
    circuits = [c for k in (1, 2) for c in enumerate_circuits(k, 4) if c.depth <= 2]
    with criterion(7, "reconfiguration width stays within p^(2^d)", 300):
        for _ in range(500):
            p = rng.choice((1, 2))
            n = rng.randint(1, 5)
            c = rng.choice(circuits)
            fs = [_random_obdd(rng, p, n) for _ in range(c.k)]
            assert reconfiguration_width(c, fs) <= p ** (2 ** c.depth)
        for _ in range(1000):
            n = rng.randint(1, 6)
            d1 = _random_obdd(rng, rng.randint(1, 3), n)
            d2 = _random_obdd(rng, rng.randint(1, 3), n)
            assert apply("and", d1, d2).width <= d1.width * d2.width


def _planted(rng, n):
    i, j = sorted(rng.sample(range(1, n + 1), 2))
    # g[2a + b] = g(a, b); keep the g that depend on both arguments
    essential = [g for g in itertools.product((0, 1), repeat=4)
                 if g[:2] != g[2:] and (g[0] != g[1] or g[2] != g[3])]
    g = rng.choice(essential)
    t = TruthTable.from_function(n, lambda x: g[2 * x[i - 1] + x[j - 1]])
    return obdd_from_table(t), {i, j}


def _best_time(fn, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_criterion_8_applications():
    rng = random.Random(8)
    with criterion(8, "parity via XOR, planted juntas, factorization", 600):
        # (a)
        wit = decide_decomposition(ProblemInstance(parse_obdd(PARITY4), xor_circuit(), 2))
        assert wit is not None and wit.ok
        assert all(canonicalize(f).width <= 2 for f in wit.factors)
        per_gate = gate_functions(xor_circuit(), wit.factors)
        assert _table(per_gate[-1]) == _table(parse_obdd(PARITY4))
        # (b)
        for _ in range(100):
            n = rng.randint(2, 10)
            d, planted = _planted(rng, n)
            assert junta_variables(d) == planted
        short, long_ = _random_obdd(rng, 3, 400), _random_obdd(rng, 3, 800)
        junta_variables(short)
        ratio = _best_time(lambda: junta_variables(long_)) / _best_time(lambda: junta_variables(short))
        assert ratio <= 2.5, ratio
        # (c)
        maj = obdd_from_table(TruthTable.from_function(3, lambda x: sum(x) >= 2))
        assert maj.width == 3
        fs = factorize_obdd(maj, 3)
        assert fs is not None and all(canonicalize(f).width <= 2 for f in fs)
        inter = np.ones(8, dtype=np.uint8)
        for f in fs:
            inter &= table_from_obdd(f).array()
        assert bytes(inter) == _table(maj)
        x1x2 = obdd_from_table(TruthTable(2, bytes([0, 0, 0, 1])))
        assert factorize_obdd(x1x2, 2) is None
