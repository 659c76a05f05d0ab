import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddnnf2sdd.errors import CapExceeded, InputError
from ddnnf2sdd.hwb import hwb_table, hwb_value
from ddnnf2sdd.oracle import (TruthTable, assignment_to_index, count_subfunctions,
                              equivalent, index_to_assignment, minterm_complement,
                              model_count, sampled_equivalent, truth_table)
from ddnnf2sdd.validators import check
from ddnnf2sdd.vtree import Vtree

from conftest import lit_circuit, random_ddnnf, seeds


def test_truth_table_examples():
    assert str(truth_table(lit_circuit("T"), [1])) == "11"
    assert str(truth_table(lit_circuit(1), [1])) == "01"
    assert str(truth_table(lit_circuit(-1), [1])) == "10"


def test_index_order_first_variable_most_significant():
    assert index_to_assignment((1, 2, 3), 0b100) == {1: 1, 2: 0, 3: 0}
    assert assignment_to_index((1, 2, 3), {1: 0, 2: 1, 3: 1}) == 0b011


@given(st.integers(1, 10), st.data())
def test_index_round_trip(n, data):
    order = tuple(range(1, n + 1))
    i = data.draw(st.integers(0, (1 << n) - 1))
    assert assignment_to_index(order, index_to_assignment(order, i)) == i


def test_hwb4_table_by_definition():
    t = hwb_table(4)
    for i in range(16):
        bits = [(i >> (3 - k)) & 1 for k in range(4)]
        assert t(index_to_assignment((1, 2, 3, 4), i)) == hwb_value(bits)


def test_table_array_round_trip():
    f = TruthTable((2, 5, 7), 0b10110010)
    assert TruthTable.from_array(f.variables, f.to_array()) == f
    assert f.count() == 4


def test_model_count_examples():
    assert model_count(lit_circuit(("or", 1, 2)), [1, 2]) == 3
    assert model_count(lit_circuit(1), [1, 2, 3]) == 4
    assert model_count(lit_circuit("F"), [1]) == 0


def test_cap_is_enforced():
    with pytest.raises(CapExceeded):
        truth_table(lit_circuit(1), range(1, 30), cap=20)


def test_equivalent_examples():
    a = lit_circuit(("or", ("and", 1, 2), ("and", -1, 2)))
    assert equivalent(a, lit_circuit(2)) == (True, None)
    same, witness = equivalent(lit_circuit(1), lit_circuit(2))
    assert not same
    assert lit_circuit(1).evaluate(witness) != lit_circuit(2).evaluate(witness)


def test_equivalent_modulo_aux():
    # x or (y and h) differs from x once h is toggled
    with_aux = lit_circuit(("or", 1, ("and", 2, 3)))
    assert not equivalent(with_aux, lit_circuit(1), modulo_aux=[3])[0]
    tautology_in_h = lit_circuit(("and", 1, ("or", 3, -3)))
    assert equivalent(tautology_in_h, lit_circuit(1), modulo_aux=[3])[0]


def test_sampled_equivalence_is_seeded():
    a, b = lit_circuit(("or", 1, 2)), lit_circuit(("or", 2, 1))
    assert sampled_equivalent(a, b, 64, seed=3) == (True, None)
    r1 = sampled_equivalent(lit_circuit(1), lit_circuit(2), 64, seed=3)
    assert r1 == sampled_equivalent(lit_circuit(1), lit_circuit(2), 64, seed=3)
    assert not r1[0]


def test_count_subfunctions_examples():
    const = TruthTable((1, 2, 3), 0xFF)
    assert count_subfunctions(const, [1, 2]) == 1
    parity = TruthTable.from_function((1, 2, 3, 4), lambda a: sum(a.values()) % 2)
    assert count_subfunctions(parity, [1, 2]) == 2
    assert count_subfunctions(hwb_table(10), range(1, 7)) >= 2
    with pytest.raises(InputError):
        count_subfunctions(const, [9])


def _residuals_by_hand(n, fixed):
    free = [x for x in range(1, n + 1) if x not in fixed]
    seen = set()
    for fb in itertools.product((0, 1), repeat=len(fixed)):
        a = dict(zip(fixed, fb))
        row = []
        for rb in itertools.product((0, 1), repeat=len(free)):
            a.update(zip(free, rb))
            row.append(hwb_value(a))
        seen.add(tuple(row))
    return len(seen)


def test_hwb10_subfunctions_against_direct_enumeration():
    fixed = list(range(1, 7))
    assert count_subfunctions(hwb_table(10), fixed) == _residuals_by_hand(10, fixed) == 37


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_minterm_complement(seed):
    c, t, f = random_ddnnf(seed, 1, 6)
    neg = minterm_complement(c, t)
    order = tuple(sorted(t.variables))
    full = (1 << (1 << len(order))) - 1
    assert truth_table(neg, order).bits == full ^ f.bits
    for prop in ("decomposable", "deterministic", "structured", "smooth"):
        assert check(neg, prop, t).holds, prop


def test_minterm_complement_of_tautology_is_false():
    t = Vtree.from_nested((1, 2))
    neg = minterm_complement(lit_circuit(("or", 1, -1)), t)
    assert model_count(neg, [1, 2]) == 0


def test_numpy_backed_table_matches_int_bits():
    rng = random.Random(5)
    bits = rng.getrandbits(64)
    f = TruthTable(tuple(range(1, 7)), bits)
    arr = f.to_array()
    assert arr.dtype == np.uint8 or arr.dtype.kind in "iub"
    assert all(int(arr[i]) == (bits >> i) & 1 for i in range(64))
