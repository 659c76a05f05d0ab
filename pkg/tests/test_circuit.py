import itertools
import random

import pytest
from hypothesis import given, settings

from ddnnf2sdd.circuit import AND, OR, CircuitBuilder
from ddnnf2sdd.corpus import compile_ddnnf
from ddnnf2sdd.errors import InputError, StructuralError
from ddnnf2sdd.hwb import hwb_value
from ddnnf2sdd.oracle import TruthTable
from ddnnf2sdd.vtree import Vtree

from conftest import lit_circuit, random_ddnnf, seeds


def test_vars_of_literal_and_gate():
    c = lit_circuit(("and", 1, ("or", -2, 3)))
    assert c.vars_of() == {1, 2, 3}
    assert lit_circuit(("or", 2, -2)).vars_of() == {2}


def test_vars_of_constants_is_empty():
    assert lit_circuit("T").vars_of() == frozenset()
    assert lit_circuit("F").vars_of() == frozenset()


def test_size_counts_reachable_gates():
    assert lit_circuit("T").size() == 1
    assert lit_circuit(("and", 1, 2)).size() == 3
    # shared literals are counted once
    assert lit_circuit(("or", ("and", 1, 2), ("and", -1, 2))).size() == 6


def test_builder_hash_conses():
    b = CircuitBuilder()
    assert b.literal(3) == b.literal(3)
    assert b.conj(b.literal(1), b.literal(2)) == b.conj(b.literal(1), b.literal(2))
    assert b.true() == b.const(True)


def test_conj_chain_binarizes_left_associatively():
    b = CircuitBuilder()
    root = b.conj_chain([b.literal(1), b.literal(2), b.literal(3)])
    c = b.build(root)
    g = c.gates[c.root]
    assert g.kind == AND
    assert c.gates[g.children[0]].kind == AND
    assert c.edge_count() == 4


def test_evaluate_missing_variable():
    c = lit_circuit(("and", 1, 2))
    with pytest.raises(InputError):
        c.evaluate({1: 1})


def test_unknown_node_rejected():
    c = lit_circuit(("and", 1, 2))
    with pytest.raises(StructuralError):
        c.vars_of(99)


def test_evaluate_hwb4_at_0110():
    t = Vtree.balanced([1, 2, 3, 4])
    f = TruthTable.from_function((1, 2, 3, 4), lambda a: hwb_value(a))
    c = compile_ddnnf(f, t, random.Random(1))
    # weight 2, so the output is x2 = 1
    assert c.evaluate({1: 0, 2: 1, 3: 1, 4: 0}) == 1
    for bits in itertools.product((0, 1), repeat=4):
        assert c.evaluate(dict(zip((1, 2, 3, 4), bits))) == hwb_value(bits)


def test_decomposability():
    assert lit_circuit(("and", 1, ("or", 2, -2))).is_decomposable()
    bad = lit_circuit(("and", 1, ("or", -1, 2)))
    assert not bad.is_decomposable()
    assert bad.decomposition_witness() == (bad.root, 1)


def test_dnnf_satisfiability():
    assert lit_circuit(("and", 1, 2)).is_satisfiable_dnnf()
    assert not lit_circuit(("and", 1, "F")).is_satisfiable_dnnf()
    assert not lit_circuit("F").is_satisfiable_dnnf()
    assert lit_circuit(("or", "F", -3)).is_satisfiable_dnnf()


def test_parents_sorted():
    c = lit_circuit(("or", ("and", 1, 2), ("and", -1, 2)))
    lit2 = next(n for n, g in enumerate(c.gates) if g.kind == "L" and g.lit == 2)
    ps = c.parents()[lit2]
    assert ps == sorted(ps) and len(ps) == 2


def test_builder_does_not_simplify():
    b = CircuitBuilder()
    x, y = b.literal(1), b.literal(2)
    n = b.disj([y, x])
    assert b.gate(n).kind == OR
    assert b.gate(n).children == (y, x)
    assert b.gate(b.conj(x, b.true())).kind == AND


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_dnnf_sat_matches_brute_force(seed):
    c, t, f = random_ddnnf(seed, 1, 6)
    assert c.is_satisfiable_dnnf() == (f.count() > 0)
    order = sorted(f.variables)
    for bits in itertools.product((0, 1), repeat=len(order)):
        a = dict(zip(order, bits))
        assert c.evaluate(a) == f(a)
