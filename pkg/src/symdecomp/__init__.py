"""Decomposition of Boolean functions given as bounded-width OBDDs.

OBDDs are strings over an alphabet of layers; sets of OBDD tuples are
handled by lazily explored layered automata, and decomposition questions
reduce to emptiness of such automata at a fixed length.
"""
from .automata import (
    LayeredNfa,
    SearchStats,
    accepts,
    nonempty_at_length,
    project,
    singleton_automaton,
    tensor,
    validity_automaton,
)
from .circuit import (
    Circuit,
    Gate,
    and_circuit,
    and_tree,
    enumerate_circuits,
    gate_functions,
    identity_circuit,
    not_circuit,
    or_circuit,
    parse_circuit,
    validate_circuit,
    xor_circuit,
)
from .errors import DecompError, ResourceLimit
from .obdd import (
    Layer,
    Obdd,
    TruthTable,
    apply,
    canonicalize,
    constant,
    equivalent,
    evaluate,
    format_obdd,
    hypercube,
    junta_variables,
    obdd_from_table,
    parity_obdd,
    parse_obdd,
    table_from_obdd,
    validate_obdd,
)
from .oracle import brute_force_solve, enumerate_obdds, min_width_oracle
from .reconfig import (
    ProblemInstance,
    Witness,
    decide_decomposition,
    decide_generalized_junta,
    decide_reconfiguration,
    factorize_obdd,
)
from .relations import RelationKind, Selector, Tag, build_relation, selector_select

__version__ = "0.1.0"
