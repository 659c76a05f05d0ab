import pytest
from hypothesis import given, settings

from ddnnf2sdd.circuit import AND, TRUE
from ddnnf2sdd.errors import ParseError
from ddnnf2sdd.formats import (atomic_write, parse_circuit, parse_vtree, read_circuit,
                               serialize_circuit, serialize_vtree)
from ddnnf2sdd.simulation import simulate
from ddnnf2sdd.vtree import Vtree, modify, prune

from conftest import TWELVE, random_ddnnf, random_pair, seeds


def test_single_true_node():
    c = parse_circuit("nnf 1 0 1\nT\n")
    assert c.size() == 1 and c.gates[c.root].kind == TRUE
    assert c.universe == {1}


def test_and_binarized_left_associatively():
    c = parse_circuit("nnf 4 3 3\nL 1\nL 2\nL 3\nA 3 0 1 2\n")
    g = c.gates[c.root]
    assert g.kind == AND
    left = c.gates[g.children[0]]
    assert left.kind == AND and c.vars_of(g.children[0]) == {1, 2}
    assert c.evaluate({1: 1, 2: 1, 3: 1}) == 1


def test_empty_gates_are_constants():
    assert parse_circuit("nnf 1 0 0\nA 0\n").gates[-1].kind == "T"
    assert parse_circuit("nnf 1 0 0\nO 0\n").gates[-1].kind == "F"


@pytest.mark.parametrize("text, line, column", [
    ("nnf 2 1 1\nL 1\nA 1 5\n", 3, 3),
    ("nnf 1 0 1\nQ\n", 2, 1),
    ("nnf 1 0 1\nL x\n", 2, 2),
    ("nnf 1 0 1\nL 0\n", 2, 2),
    ("nnf 1 0\nT\n", 1, 1),
    ("nnf 2 2 1\nL 1\nO 1 0 0\n", 3, 2),
])
def test_parse_errors_have_locations(text, line, column):
    with pytest.raises(ParseError) as err:
        parse_circuit(text)
    assert (err.value.line, err.value.column) == (line, column)
    assert f"line {line}" in str(err.value)


def test_header_mismatch_rejected():
    with pytest.raises(ParseError):
        parse_circuit("nnf 3 0 1\nL 1\n")
    with pytest.raises(ParseError):
        parse_circuit("L 1\n")


def test_hwb10_round_trip_is_byte_identical(hwb10):
    once = serialize_circuit(hwb10.d)
    again = serialize_circuit(parse_circuit(once))
    assert once == again
    assert parse_circuit(once) == parse_circuit(again)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_round_trip_random(seed):
    c, t, _ = random_ddnnf(seed)
    back = parse_circuit(serialize_circuit(c))
    assert back.size() == c.size() and back.universe == c.universe
    assert serialize_circuit(back) == serialize_circuit(c)
    assert parse_vtree(serialize_vtree(t)) == t


def test_aux_and_universe_markers_survive():
    inst = random_pair(4, 6, 6)
    s, tp, trace = simulate(inst.d, inst.dbar, inst.t)
    text = serialize_circuit(s)
    assert text.startswith("c aux ")
    back = parse_circuit(text)
    assert back.aux == frozenset(trace.aux) and back.universe == s.universe
    vt = parse_vtree(serialize_vtree(tp))
    assert vt == tp and vt.aux == frozenset(trace.aux)


def test_vtree_with_aux_and_stubs():
    t = Vtree.from_nested(TWELVE)
    tp, aux = modify(t)
    text = serialize_vtree(tp)
    assert text.count(" aux\n") == len(aux)
    pruned = prune(t, range(1, 6))
    assert "S " in serialize_vtree(pruned)
    assert parse_vtree(serialize_vtree(pruned)) == pruned


@pytest.mark.parametrize("text", [
    "vtree 3\nL 0 1\nL 1 1\nI 2 0 1\n",
    "vtree 2\nL 0 1\nI 1 0 5\n",
    "vtree 1\nL 0 -1\n",
    "vtree 2\nL 0 1\n",
    "3\n",
])
def test_bad_vtrees(text):
    with pytest.raises(ParseError):
        parse_vtree(text)


def test_atomic_write(tmp_path):
    path = tmp_path / "sub" / "c.nnf"
    atomic_write(path, "nnf 1 0 1\nT\n")
    assert read_circuit(path).size() == 1
    assert [p.name for p in path.parent.iterdir()] == ["c.nnf"]
