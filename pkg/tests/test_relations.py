import itertools
import random

import numpy as np
import pytest

from helpers import relabel
from symdecomp.automata import accepts, nonempty_at_length, project, tensor, tensor_word, validity_automaton
from symdecomp.errors import ArityMismatch, PositionOutOfRange
from symdecomp.obdd import apply, canonicalize, hypercube, parity_obdd, table_from_obdd
from symdecomp.oracle import enumerate_obdds
from symdecomp.relations import (
    RelationKind,
    Selector,
    Tag,
    build_relation,
    equality_automaton,
    selector_select,
)

OBDDS_22 = list(enumerate_obdds(2, 2))
TABS = {d: table_from_obdd(d).array() for d in OBDDS_22}


def _holds(tag, tup):
    t = [TABS[d] for d in tup]
    if tag is Tag.EQ:
        return np.array_equal(t[0], t[1])
    if tag is Tag.NOT:
        return np.array_equal(t[1], 1 - t[0])
    if tag is Tag.ID:
        return tup[0] == tup[1]
    op = np.bitwise_and if tag is Tag.AND else np.bitwise_or
    return np.array_equal(t[2], op(t[0], t[1]))


@pytest.mark.parametrize("tag", [Tag.EQ, Tag.NOT, Tag.ID])
@pytest.mark.parametrize("route", ["pairing", "direct"])
def test_binary_relations_exhaustive(tag, route):
    rel = build_relation(RelationKind(tag, (2, 2)), route)
    for tup in itertools.product(OBDDS_22, repeat=2):
        assert accepts(rel, tensor_word(*tup)) == _holds(tag, tup)


@pytest.mark.parametrize("tag", [Tag.AND, Tag.OR])
def test_direct_route_ternary_exhaustive(tag):
    rel = build_relation(RelationKind(tag, (2, 2, 2)), "direct")
    for tup in itertools.product(OBDDS_22, repeat=3):
        assert accepts(rel, tensor_word(*tup)) == _holds(tag, tup)


def test_eq_is_an_equivalence_at_small_scale():
    eq = equality_automaton(2, 2)
    rel = {(a, b) for a in OBDDS_22 for b in OBDDS_22 if accepts(eq, tensor_word(a, b))}
    assert all((a, a) in rel for a in OBDDS_22)
    assert all((b, a) in rel for a, b in rel)
    for a, b in rel:
        for c in OBDDS_22:
            if (b, c) in rel:
                assert (a, c) in rel


def test_eq_across_widths():
    d = parity_obdd(3)
    wide = relabel(d, random.Random(0), extra=2)
    assert accepts(equality_automaton(2, 4), tensor_word(d, wide))


def test_and_relation_examples():
    rel = build_relation(RelationKind(Tag.AND, (2, 2, 2)))
    h1, h2 = hypercube(2, 1), hypercube(2, 2)
    both = canonicalize(apply("and", h1, h2))
    assert accepts(rel, tensor_word(h1, h2, both))
    assert not accepts(rel, tensor_word(h1, h1, both))


def test_not_relation_on_parity():
    rel = build_relation(RelationKind(Tag.NOT, (2, 2)))
    d = parity_obdd(4)
    assert accepts(rel, tensor_word(d, apply("not", d)))
    assert not accepts(rel, tensor_word(d, d))


def test_relation_kind_checks_arity():
    with pytest.raises(ArityMismatch):
        RelationKind(Tag.AND, (2, 2))
    assert RelationKind("or", (1, 1, 1)).tag is Tag.OR


def test_selector_positions_checked():
    eq = equality_automaton(2, 2)
    with pytest.raises(PositionOutOfRange):
        Selector(eq, (1, 4), 3)
    with pytest.raises(ArityMismatch):
        Selector(eq, (1, 2, 3), 3)


def test_selection_then_projection_recovers_eq():
    pairs = build_relation(RelationKind(Tag.ID, (2, 2)))
    host = tensor(pairs, pairs)
    sel = selector_select(host, Selector(equality_automaton(2, 2), (2, 4), 4))
    lang = project(sel, (1, 3))
    eq = equality_automaton(2, 2)
    for a, b in itertools.product(OBDDS_22, repeat=2):
        assert accepts(lang, tensor_word(a, b)) == accepts(eq, tensor_word(a, b))


def test_relation_emptiness_search():
    rel = build_relation(RelationKind(Tag.AND, (1, 1, 1)))
    assert nonempty_at_length(rel, 3) is not None
