import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddnnf2sdd.errors import InputError, PropertyViolation, StructuralError
from ddnnf2sdd.vtree import (Vtree, decomposition_nodes, is_normalized, modify, normalize,
                             prune, shell)

from conftest import TWELVE, twelve_node_v, lit_circuit, random_ddnnf, seeds

# the modified twelve-variable tree, aux h1..h8 numbered 13..20
TWELVE_MODIFIED = (((((1, (((2, (3, 4)), 13))), 14),
          ((5, ((((6, (7, 8)), 15), ((9, ((10, (11, 12)), 16)), 17)), 18)), 19)), 20))


def _leaves(nested):
    if isinstance(nested, tuple):
        return _leaves(nested[0]) | _leaves(nested[1])
    return {nested}


def _prune_nested(nested, a):
    """Independent pruning on nested tuples."""
    if _leaves(nested) <= a:
        return None
    if isinstance(nested, tuple):
        return (_prune_nested(nested[0], a), _prune_nested(nested[1], a))
    return nested


vtrees = st.builds(lambda seed, n: Vtree.random(range(1, n + 1), random.Random(seed)),
                   seeds, st.integers(1, 14))


def test_from_nested_post_order_ids():
    t = Vtree.from_nested(((1, 2), 3))
    assert t.var == {0: 1, 1: 2, 3: 3}
    assert t.root == 4 and t.left[4] == 2
    assert t.to_nested() == ((1, 2), 3)


def test_malformed_vtrees_rejected():
    with pytest.raises(StructuralError):
        Vtree.from_nested((1, 1))
    with pytest.raises(StructuralError):
        Vtree.from_nested((1, 2, 3))
    with pytest.raises(StructuralError):
        Vtree({2: 0}, {2: 1}, {0: 1}, 2)


def test_normalize_examples():
    assert normalize(Vtree.from_nested(((1, 2), 3))).to_nested() == (3, (1, 2))
    assert normalize(Vtree.from_nested((1, 2))).to_nested() == (1, 2)
    twelve = Vtree.from_nested(TWELVE)
    assert is_normalized(twelve)
    assert normalize(twelve) == twelve


@settings(max_examples=60, deadline=None)
@given(vtrees)
def test_normalize_properties(t):
    n = normalize(t)
    assert is_normalized(n)
    assert normalize(n) == n
    assert n.variables == t.variables
    # ids keep their variable sets
    assert all(n.vars_of(v) == t.vars_of(v) for v in t.nodes())


def test_modify_twelve_variable_example(twelve):
    tp, aux = modify(twelve)
    assert aux == list(range(13, 21))
    assert tp.to_nested() == TWELVE_MODIFIED
    assert tp.aux == frozenset(aux)
    assert tp.original_vars == frozenset(range(1, 13))


def test_modify_small_trees():
    t2 = Vtree.from_nested((1, 2))
    tp, aux = modify(t2)
    assert aux == [] and tp == t2
    tp, aux = modify(Vtree.balanced([1, 2, 3, 4]))
    assert aux == [5]
    assert tp.to_nested() == (((1, 2), (3, 4)), 5)


@settings(max_examples=60, deadline=None)
@given(vtrees)
def test_modify_counts_big_nodes(t):
    tp, aux = modify(t)
    big = [v for v in t.internal_nodes() if len(t.vars_of(v)) > 2]
    assert len(aux) == len(big)
    assert len(tp) == len(t) + 2 * len(big)
    for v in big:
        parent = tp.parent(v)
        assert tp.left[parent] == v
        assert tp.var[tp.right[parent]] in aux


def test_shell_examples(twelve):
    assert shell(twelve, twelve.root) == frozenset()
    v = twelve_node_v(twelve)
    assert shell(twelve, v) == frozenset(range(1, 6))
    leaf = twelve.leaf_of(7)
    assert shell(twelve, leaf) == frozenset(range(1, 13)) - {7}


def test_prune_examples(twelve):
    assert prune(twelve, []) == twelve
    all_stub = prune(twelve, range(1, 13))
    assert len(all_stub) == 1 and all_stub.is_stub(all_stub.root)
    pruned = prune(twelve, range(1, 6))
    assert pruned.to_nested() == (None, (None, twelve.to_nested(twelve_node_v(twelve))))
    with pytest.raises(InputError):
        prune(twelve, [99])


@settings(max_examples=60, deadline=None)
@given(vtrees, seeds)
def test_prune_matches_nested_oracle(t, seed):
    rng = random.Random(seed)
    a = {x for x in t.variables if rng.random() < 0.5}
    p = prune(t, a)
    assert p.to_nested() == (_prune_nested(t.to_nested(), a) if a else t.to_nested())
    assert p.variables == t.variables - a


def test_lca_and_within(twelve):
    v = twelve_node_v(twelve)
    assert twelve.lca([6, 12]) == v
    assert twelve.lca([1, 12]) == twelve.root
    assert twelve.is_within(twelve.leaf_of(8), v)
    assert not twelve.is_within(twelve.leaf_of(5), v)


def test_decomposition_node_examples():
    t = Vtree.from_nested(((1, 2), (3, 4)))
    c = lit_circuit(("and", 1, 3))
    assert decomposition_nodes(c, t)[c.root] == t.root
    c = lit_circuit(("and", 1, 2))
    assert decomposition_nodes(c, t)[c.root] == t.lca([1, 2])
    # orientation matters only in oriented mode
    c = lit_circuit(("and", 3, 1))
    assert decomposition_nodes(c, t)[c.root] == t.root
    with pytest.raises(PropertyViolation):
        decomposition_nodes(c, t, oriented=True)
    # x1 and x2 split across the wrong node
    t2 = Vtree.from_nested(((1, 3), (2, 4)))
    with pytest.raises(PropertyViolation):
        decomposition_nodes(lit_circuit(("and", ("and", 1, 2), 3)), t2)


def test_decomposition_node_of_hwb_terms(hwb10):
    table = decomposition_nodes(hwb10.d, hwb10.vtree)
    assert {table[node] for _, _, node in hwb10.h_terms()} == {hwb10.vtree.root}


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_compiled_circuits_have_decomposition_nodes(seed):
    c, t, _ = random_ddnnf(seed)
    table = decomposition_nodes(c, t, oriented=True)
    for n, node in table.items():
        assert c.vars_of(n) <= t.vars_of(node)
