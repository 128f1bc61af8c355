import itertools

import pytest

from symdecomp.automata import (
    ExplicitNfa,
    SearchStats,
    accepts,
    candidate_layers,
    enumerate_words,
    finite_class_automaton,
    format_automaton,
    growth_strings,
    intersect_all,
    nonempty_at_length,
    parse_automaton,
    product_intersect,
    project,
    reachable_state_counts,
    singleton_automaton,
    tensor,
    tensor_word,
    validity_automaton,
    word_obdds,
)
from symdecomp.errors import ArityMismatch, ParseError, ResourceLimit
from symdecomp.obdd import Layer, hypercube, parity_obdd, validate_obdd
from symdecomp.oracle import count_obdds, enumerate_obdds


def test_growth_strings():
    assert growth_strings(3, 2) == ((0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1))
    assert len(growth_strings(4, 4)) == 15  # Bell number


def test_candidate_layers_are_complete_on_domain():
    for b in candidate_layers(frozenset({0, 1}), 2, "all"):
        assert b.is_function and b.dom == {0, 1}
    assert len(candidate_layers(frozenset({0}), 3, "all")) == 9


def test_validity_state_count_and_words():
    a = validity_automaton(2)
    assert a.state_count == 4
    for n in (1, 2, 3):
        words = list(enumerate_words(a, n))
        assert len(words) == count_obdds(2, n)
        assert {tuple(s[0] for s in w) for w in words} == {d.layers for d in enumerate_obdds(2, n)}


def test_validity_rejects_invalid_strings():
    a = validity_automaton(2)
    assert not accepts(a, [Layer([(0, 0, 0), (0, 1, 1)]), Layer([(0, 0, 0), (0, 1, 0)])])
    assert not accepts(a, [Layer([(0, 0, 2), (0, 1, 0)])])
    assert accepts(a, parity_obdd(5))


def test_singleton_and_tensor():
    d1, d2 = hypercube(3, 1), parity_obdd(3)
    s = singleton_automaton(d1, d2)
    assert accepts(s, tensor_word(d1, d2))
    assert not accepts(s, tensor_word(d2, d1))
    t = tensor(validity_automaton(2), validity_automaton(2))
    assert accepts(t, tensor_word(d1, d2))
    with pytest.raises(ArityMismatch):
        tensor_word(d1, parity_obdd(4))


def test_projection_and_intersection():
    d1, d2 = hypercube(2, 1), hypercube(2, 2)
    s = singleton_automaton(d1, d2)
    p = project(s, [2])
    assert accepts(p, d2) and not accepts(p, d1)
    both = product_intersect(validity_automaton(2), singleton_automaton(d1))
    assert accepts(both, d1)
    assert not accepts(intersect_all([validity_automaton(2), singleton_automaton(d2)]), d1)


def test_nonempty_returns_lex_least_word():
    a = validity_automaton(2)
    word = nonempty_at_length(a, 3, reduced=False)
    least = min(enumerate_obdds(2, 3), key=lambda d: [b.triples for b in d.layers])
    assert [s[0] for s in word] == list(least.layers)


def test_nonempty_records_dead_level():
    a = product_intersect(singleton_automaton(hypercube(3, 1)), singleton_automaton(hypercube(3, 2)))
    stats = SearchStats()
    assert nonempty_at_length(a, 3, stats=stats) is None
    assert stats.dead_level is not None and 1 <= stats.dead_level <= 3


def test_nonempty_state_limit():
    with pytest.raises(ResourceLimit):
        nonempty_at_length(tensor(validity_automaton(3), validity_automaton(3)), 3,
                           reduced=False, state_limit=5)


def test_reachable_state_counts():
    assert reachable_state_counts(validity_automaton(2), 3) == [1, 3, 3, 3]


def test_finite_class_automaton():
    hs = [hypercube(3, i) for i in (1, 2, 3)]
    a = finite_class_automaton(hs, 2)
    for h in hs:
        assert accepts(a, h)
    assert not accepts(a, parity_obdd(3))


def test_word_obdds_round_trip():
    d1, d2 = hypercube(3, 2), parity_obdd(3)
    assert word_obdds(tensor_word(d1, d2), (2, 2)) == (d1, d2)


def test_automaton_text_format():
    a = parse_automaton("builtin validity 3\n")
    assert a.w == 3
    assert format_automaton(a) == "builtin validity 3\n"
    hs = finite_class_automaton([hypercube(2, 1), hypercube(2, 2)], 2)
    text = format_automaton(hs)
    back = parse_automaton(text)
    assert isinstance(back, ExplicitNfa)
    for d in enumerate_obdds(2, 2):
        assert accepts(back, d) == accepts(hs, d)
    with pytest.raises(ParseError):
        parse_automaton("builtin nothing 2\n", "x.sofa")


def test_reduced_search_agrees_with_full_search():
    # reduced mode narrows witnesses but never changes emptiness
    for n in (1, 2, 3):
        for w in (1, 2, 3):
            a = validity_automaton(w)
            assert (nonempty_at_length(a, n) is None) == (nonempty_at_length(a, n, reduced=False) is None)
