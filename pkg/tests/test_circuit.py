import itertools

import numpy as np
import pytest

from symdecomp.circuit import (
    Gate,
    and_tree,
    enumerate_circuits,
    evaluate_circuit,
    format_circuit,
    gate_functions,
    parse_circuit,
    reconfiguration_width,
    truth_table,
    validate_circuit,
    xor_circuit,
)
from symdecomp.errors import DuplicateVariable, ForwardReference, MissingVariable, MultipleOutputs, ParseError
from symdecomp.obdd import TruthTable, constant, hypercube, obdd_from_table, parity_obdd, table_from_obdd


def test_validate_and_depths():
    c = validate_circuit([("x", 1), ("x", 2), ("and", 1, 2), ("not", 3)], 2)
    assert c.depths == (0, 0, 1, 2) and c.depth == 2
    assert c.input_positions == (1, 2)


@pytest.mark.parametrize(
    "gates,k,err",
    [
        ([("x", 1), ("x", 1), ("and", 1, 2)], 2, DuplicateVariable),
        ([("x", 1), ("not", 1)], 2, MissingVariable),
        ([("x", 1), ("and", 1, 3), ("x", 2)], 2, ForwardReference),
        ([("x", 1), ("x", 2)], 2, MultipleOutputs),
    ],
)
def test_structural_errors(gates, k, err):
    with pytest.raises(err):
        validate_circuit(gates, k)


def test_xor_circuit_semantics():
    c = xor_circuit()
    assert c.m == 7 and c.depth == 3
    for x in itertools.product((0, 1), repeat=2):
        assert evaluate_circuit(c, x) == x[0] ^ x[1]
    assert truth_table(c).bits == bytes([0, 1, 1, 0])


def test_enumeration_counts():
    counts = {(k, m): sum(1 for _ in enumerate_circuits(k, m)) for k, m in
              [(1, 1), (1, 2), (2, 2), (1, 3), (2, 3), (2, 4)]}
    assert counts == {(1, 1): 1, (1, 2): 4, (2, 2): 0, (1, 3): 19, (2, 3): 2, (2, 4): 28}


def test_enumeration_small_sizes_listed():
    got = [format_circuit(c) for c in enumerate_circuits(1, 2)]
    assert len(got) == 4
    assert "g2 = NOT g1" in got[1]


def test_enumeration_order_is_by_size():
    sizes = [c.m for c in enumerate_circuits(2, 4)]
    assert sizes == sorted(sizes)


def test_gate_functions_and_width():
    h1, h2 = hypercube(3, 1), hypercube(3, 3)
    fs = gate_functions(xor_circuit(), [h1, h2])
    want = TruthTable.from_function(3, lambda x: x[0] ^ x[2])
    assert table_from_obdd(fs[-1]) == want
    assert reconfiguration_width(xor_circuit(), [h1, h2]) == max(f.width for f in fs)


def test_parity_split_widths():
    # (parity_4, constant 0) keeps every intermediate width at most 2
    fs = gate_functions(xor_circuit(), [parity_obdd(4), constant(4, 0)])
    assert [f.width for f in fs] == [2, 1, 2, 1, 2, 1, 2]


def test_and_tree():
    c = and_tree(3)
    assert c.k == 3
    for x in itertools.product((0, 1), repeat=3):
        assert evaluate_circuit(c, x) == int(all(x))


def test_circuit_text_round_trip():
    text = format_circuit(xor_circuit())
    assert format_circuit(parse_circuit(text)) == text


def test_parse_circuit_missing_variable():
    with pytest.raises(MissingVariable):
        parse_circuit("circuit inputs=2\ng1 = x1\ng3 = AND g1 g2\n")


def test_parse_circuit_syntax_error():
    with pytest.raises(ParseError) as e:
        parse_circuit("circuit inputs=1\ng1 = x1\ng2 = XOR g1 g1\n", "c.circ")
    assert e.value.line == 3
