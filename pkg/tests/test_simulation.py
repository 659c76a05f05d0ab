import random

import pytest
from hypothesis import given, settings

from ddnnf2sdd.circuit import AND, FALSE, LIT, OR, TRUE
from ddnnf2sdd.corpus import compile_ddnnf, random_function
from ddnnf2sdd.errors import InputError
from ddnnf2sdd.oracle import (TruthTable, equivalent, minterm_complement, model_count,
                              truth_table)
from ddnnf2sdd.simulation import (CONJ, D, DBAR, EMPTY, node_map, preprocess_base, simulate,
                                  two_var_sdd, verify_lemma2, verify_node_set_props)
from ddnnf2sdd.validators import check, check_sdd
from ddnnf2sdd.vtree import Vtree, modify

from conftest import TWELVE, twelve_node_v, lit_circuit, random_pair, seeds

T12 = Vtree.from_nested((1, 2))


def _shape(c, n=None):
    n = c.root if n is None else n
    g = c.gates[n]
    if g.kind == LIT:
        return g.lit
    if g.kind in (TRUE, FALSE):
        return g.kind
    return (g.kind,) + tuple(_shape(c, ch) for ch in g.children)


def test_two_var_sdd_examples():
    assert _shape(two_var_sdd(TruthTable((1, 2), 0), T12)) == FALSE
    conj = two_var_sdd(TruthTable((1, 2), 0b1000), T12)
    assert _shape(conj) == (OR, (AND, 1, 2), (AND, -1, FALSE))
    assert conj.size() == 7
    xor = two_var_sdd(TruthTable((1, 2), 0b0110), T12)
    assert _shape(xor) == (OR, (AND, 1, -2), (AND, -1, 2))
    assert xor.size() == 7
    assert _shape(two_var_sdd(TruthTable((1, 2), 0b1100), T12)) == 1
    assert _shape(two_var_sdd(TruthTable((1, 2), 0b1010), T12)) == 2


def test_two_var_sdd_all_functions():
    for bits in range(16):
        s = two_var_sdd(TruthTable((1, 2), bits), T12)
        assert s.size() <= 7
        assert truth_table(s, (1, 2)).bits == bits
        assert check_sdd(s, T12).holds


def test_two_var_sdd_rejects_foreign_variable():
    with pytest.raises(InputError):
        two_var_sdd(TruthTable((1, 3), 0b1000), T12)


def test_preprocess_base_hwb10(hwb10):
    out = preprocess_base(hwb10.d, hwb10.vtree)
    assert equivalent(out, hwb10.d)[0]
    assert preprocess_base(lit_circuit(1), T12) == lit_circuit(1)


def test_simulate_literal_base_case():
    s, tp, trace = simulate(lit_circuit(1), lit_circuit(-1), T12)
    assert _shape(s) == 1
    assert tp == T12 and trace.aux == []


def test_simulate_rejects_non_complement():
    with pytest.raises(InputError) as err:
        simulate(lit_circuit(1), lit_circuit(1), T12)
    assert err.value.witness in ({1: 0, 2: 0}, {1: 1, 2: 0})


def _small_run(seed, n=5):
    inst = random_pair(seed, n, n)
    return inst, simulate(inst.d, inst.dbar, inst.t)


def test_or_case_gate_shape():
    found = 0
    for seed in range(20):
        _, (_, _, trace) = _small_run(seed)
        for (origin, u), rec in trace.cases.items():
            if rec.case != "or":
                continue
            src = trace.circuit(origin)
            sub = trace.subcircuit(((origin, u), EMPTY))
            root = sub.gates[sub.root]
            assert root.kind == OR
            tops = [sub.gates[el].children[1] for el in root.children
                    if sub.gates[sub.gates[el].children[1]].kind == TRUE]
            # one TRUE-paired element per source child
            assert len(tops) == len(src.gates[u].children)
            assert len(root.children) == len(rec.members)
            found += 1
    assert found > 0


def test_and_case_gate_shape():
    found = 0
    for seed in range(20):
        _, (_, _, trace) = _small_run(seed)
        for (origin, u), rec in trace.cases.items():
            if rec.case != "and":
                continue
            sub = trace.subcircuit(((origin, u), EMPTY))
            root = sub.gates[sub.root]
            assert root.kind == OR
            first, *rest = root.children
            assert first == trace.subcircuit(((origin, u), CONJ)).root
            assert all(sub.gates[sub.gates[el].children[1]].kind == FALSE for el in rest)
            found += 1
    assert found > 0


def test_node_map_on_twelve_variable_tree():
    t = Vtree.from_nested(TWELVE)
    v = twelve_node_v(t)
    tp, _ = modify(t)
    rng = random.Random(0)
    seen = set()
    for _ in range(8):
        f = random_function(range(1, 13), rng, max_zeros=24)
        d = compile_ddnnf(f, t, rng)
        _, tp2, trace = simulate(d, minterm_complement(d, t), t)
        assert tp2 == tp
        for (origin, u), rec in trace.cases.items():
            if rec.vtree_node != v:
                continue
            kind = trace.circuit(origin).gates[u].kind
            want = tp.parent(v) if kind == OR else v
            assert node_map(trace, origin, u) == want
            seen.add(kind)
        if seen == {OR, AND}:
            break
    assert seen == {OR, AND}


def test_node_map_two_variable_subtree():
    inst, (_, _, trace) = _small_run(4)
    for (origin, u), rec in trace.cases.items():
        if rec.case == "base":
            assert node_map(trace, origin, u) == rec.vtree_node
            assert len(trace.t.vars_of(rec.vtree_node)) <= 2


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_simulation_end_to_end(seed):
    inst = random_pair(seed, 3, 7)
    s, tp, trace = simulate(inst.d, inst.dbar, inst.t)
    assert check_sdd(s, tp).holds
    assert equivalent(s, inst.d, trace.aux)[0]
    assert s.size() <= trace.bookkeeping_bound
    x = sorted(inst.t.variables)
    # independent of every auxiliary variable
    assert model_count(s, x + trace.aux) == model_count(inst.d, x) << len(trace.aux)
    assert s.universe == frozenset(x) | frozenset(trace.aux)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_per_node_sdds_and_node_sets(seed):
    inst = random_pair(seed, 3, 7)
    _, _, trace = simulate(inst.d, inst.dbar, inst.t)
    rep = verify_lemma2(trace)
    assert rep.holds, rep.failures
    assert rep.checked == len(trace.cases)
    assert all(passed == checked for checked, passed in rep.by_depth.values())
    assert all(r.holds for r in verify_node_set_props(trace))


def test_per_node_sdds_hwb10(hwb10):
    s, tp, trace = simulate(hwb10.d, hwb10.dbar, hwb10.vtree)
    assert len(trace.aux) == 7
    assert check_sdd(s, tp).holds
    # seven auxiliaries: checked with all of them at 0 and all at 1
    assert equivalent(s, hwb10.d, trace.aux)[0]
    rep = verify_lemma2(trace)
    assert rep.holds and min(rep.by_depth) <= 2


def test_trace_records_root_and_sets():
    inst, (s, _, trace) = _small_run(9, 6)
    assert trace.root_key == ((D, trace.d.root), EMPTY)
    assert trace.key_map[trace.root_key] == s.root
    body = trace.to_json()
    assert body["root"] == f"d:{trace.d.root}|empty"
    assert {n["case"] for n in body["nodes"]} <= {"const", "base", "or", "and"}
    assert any(k.startswith(DBAR) for k in (n["key"] for n in body["nodes"]))


def test_prepared_inputs_kept_in_trace():
    inst, (_, _, trace) = _small_run(2)
    for c in (trace.d, trace.dbar):
        assert check(c, "smooth", trace.t).holds and check(c, "simple").holds
