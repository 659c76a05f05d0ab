"""Property checks returning a verdict plus a replayable witness.

Syntactic properties are decided exactly. Semantic ones (determinism,
partition) enumerate assignments over the variables a gate mentions, or the
whole circuit when it is small, and fall back to seeded random sampling
above ``cap``; the report says which method produced the verdict.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .circuit import AND, FALSE, LIT, OR, TRUE, Circuit
from .errors import InputError, PropertyViolation
from .oracle import bit_tables, exhaustive_masks, index_to_assignment, random_masks
from .vtree import Vtree, decomposition_nodes, respected_node

DEFAULT_CAP = 20
GLOBAL_TABLE_LIMIT = 16
DEFAULT_SAMPLES = 4096

PROPERTIES = ("decomposable", "deterministic", "respects_vtree", "smooth", "simple",
              "strongly_deterministic_sdd", "partition")


@dataclass
class PropertyReport:
    property: str
    holds: bool
    witness: dict[str, Any] | None = None
    method: str = "syntactic"
    notes: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"property": self.property, "holds": self.holds,
                               "method": self.method}
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [_jsonable(v) for v in items]
    return obj


def _first_bit(x: int) -> int:
    return (x & -x).bit_length() - 1


class _Tables:
    """Truth tables of circuit nodes, global when small, otherwise per query."""

    def __init__(self, c: Circuit, cap: int, samples: int, seed: int):
        self.c = c
        self.cap = cap
        self.samples = samples
        self.rng = random.Random(seed)
        self.sampled = False
        mentioned = sorted(c.vars_of())
        self.global_order = None
        if len(mentioned) <= GLOBAL_TABLE_LIMIT:
            self.global_order = mentioned
            masks, full = exhaustive_masks(mentioned)
            self.global_full = full
            self.global_bits = bit_tables(c, masks, full)

    def tables(self, nodes: Sequence[int], over: Iterable[int]):
        """Return (bits per node, full mask, decoder of a bit index)."""
        if self.global_order is not None:
            order = self.global_order
            bits = [self.global_bits[n] for n in nodes]
            return bits, self.global_full, lambda i: index_to_assignment(order, i)
        order = sorted(over)
        if len(order) <= self.cap:
            masks, full = exhaustive_masks(order)
            decode = lambda i: index_to_assignment(order, i)  # noqa: E731
        else:
            self.sampled = True
            masks, full = random_masks(order, self.samples, self.rng)
            decode = lambda i: {x: (masks[x] >> i) & 1 for x in order}  # noqa: E731
        bits = [bit_tables(self.c, masks, full, n)[n] for n in nodes]
        return bits, full, decode

    @property
    def method(self):
        return "sampled" if self.sampled else "exhaustive"


def check_decomposable(c: Circuit) -> PropertyReport:
    vs = c._all_vars()
    for n in c.reachable():
        g = c.gates[n]
        if g.kind == AND:
            shared = vs[g.children[0]] & vs[g.children[1]]
            if shared:
                return PropertyReport("decomposable", False,
                                      {"gate": n, "variable": min(shared)})
    return PropertyReport("decomposable", True)


def check_deterministic(c: Circuit, cap: int = DEFAULT_CAP, samples: int = DEFAULT_SAMPLES,
                        seed: int = 0) -> PropertyReport:
    """Pairwise disjointness of OR children, enumerated over the gate's variables."""
    tables = _Tables(c, cap, samples, seed)
    for n in c.reachable():
        g = c.gates[n]
        if g.kind != OR or len(g.children) < 2:
            continue
        bits, _, decode = tables.tables(g.children, c.vars_of(n))
        acc = 0
        for k, b in enumerate(bits):
            clash = acc & b
            if clash:
                i = _first_bit(clash)
                j = next(j for j in range(k) if (bits[j] >> i) & 1)
                return PropertyReport("deterministic", False, {
                    "gate": n, "children": [g.children[j], g.children[k]],
                    "assignment": decode(i)}, tables.method)
            acc |= b
    report = PropertyReport("deterministic", True, None, tables.method)
    if tables.sampled:
        report.notes.append("sampled, not proven")
    return report


def check_respects_vtree(c: Circuit, t: Vtree, mode: str = "ddnnf") -> PropertyReport:
    """``mode`` is ``sdd``/``sdd_oriented`` or ``ddnnf``/``ddnnf_unoriented``."""
    if mode not in ("sdd", "sdd_oriented", "ddnnf", "ddnnf_unoriented"):
        raise InputError(f"unknown respect mode {mode!r}")
    oriented = mode.startswith("sdd")
    vs = c._all_vars()
    for n in c.reachable():
        g = c.gates[n]
        if g.kind == LIT and g.var not in t.variables:
            return PropertyReport("respects_vtree", False, {"gate": n, "variable": g.var})
        if g.kind == AND:
            a, b = vs[g.children[0]], vs[g.children[1]]
            if (a or b) and respected_node(t, a, b, oriented) is None:
                return PropertyReport("respects_vtree", False, {"gate": n})
    return PropertyReport("respects_vtree", True)


def check_smooth(c: Circuit, t: Vtree | None = None) -> PropertyReport:
    """OR children mention equal variable sets.

    With a vtree, additionally require every non-constant node to mention
    exactly the variables of its decomposition node.
    """
    vs = c._all_vars()
    for n in c.reachable():
        g = c.gates[n]
        if g.kind == OR:
            for ch in g.children[1:]:
                if vs[ch] != vs[g.children[0]]:
                    return PropertyReport("smooth", False,
                                          {"gate": n, "children": [g.children[0], ch]})
    if t is not None:
        try:
            table = decomposition_nodes(c, t)
        except PropertyViolation as e:
            return PropertyReport("smooth", False, dict(e.report or {}))
        for n in c.reachable():
            if n in table and vs[n] != t.vars_of(table[n]):
                return PropertyReport("smooth", False,
                                      {"gate": n, "vtree_node": table[n]})
    return PropertyReport("smooth", True)


def check_simple(c: Circuit) -> PropertyReport:
    if not c.is_decomposable():
        raise PropertyViolation("simplicity is only defined for decomposable circuits",
                                check_decomposable(c))
    sat = c.satisfiable_nodes()
    for n in c.reachable():
        g = c.gates[n]
        if g.kind == OR:
            for ch in g.children:
                kind = c.gates[ch].kind
                if kind == OR:
                    return PropertyReport("simple", False,
                                          {"gate": n, "child": ch, "rule": "or_to_or"})
                if kind in (TRUE, FALSE):
                    return PropertyReport("simple", False,
                                          {"gate": n, "child": ch, "rule": "constant_child"})
        if g.kind != FALSE and not sat[n]:
            return PropertyReport("simple", False, {"gate": n, "rule": "hidden_false"})
    return PropertyReport("simple", True)


def check_partition(fs: Sequence[tuple[Circuit, int]], over: Iterable[int],
                    cap: int = DEFAULT_CAP, samples: int = DEFAULT_SAMPLES,
                    seed: int = 0) -> PropertyReport:
    """Nonzero, pairwise disjoint, and jointly exhaustive over ``over``."""
    order = sorted(over)
    for c, n in fs:
        extra = c.vars_of(n) - set(order)
        if extra:
            raise InputError(f"node {n} mentions {sorted(extra)} outside the variable set")
    if len(order) <= cap:
        masks, full = exhaustive_masks(order)
        method = "exhaustive"
        decode = lambda i: index_to_assignment(order, i)  # noqa: E731
    else:
        masks, full = random_masks(order, samples, random.Random(seed))
        method = "sampled"
        decode = lambda i: {x: (masks[x] >> i) & 1 for x in order}  # noqa: E731
    bits = [bit_tables(c, masks, full, n)[n] for c, n in fs]
    return _partition_report(bits, full, decode, method)


def _partition_report(bits, full, decode, method, extra=None) -> PropertyReport:
    extra = dict(extra or {})
    acc = 0
    for k, b in enumerate(bits):
        if b == 0:
            return PropertyReport("partition", False, {**extra, "rule": "false_member",
                                                       "index": k}, method)
        clash = acc & b
        if clash:
            i = _first_bit(clash)
            j = next(j for j in range(k) if (bits[j] >> i) & 1)
            return PropertyReport("partition", False, {
                **extra, "rule": "overlap", "indices": [j, k], "assignment": decode(i)}, method)
        acc |= b
    if acc != full:
        i = _first_bit(full & ~acc)
        return PropertyReport("partition", False,
                              {**extra, "rule": "not_exhaustive", "assignment": decode(i)}, method)
    return PropertyReport("partition", True, None, method)


_ANY = "any"
_ANY_INNER = "any_inner"


def _respects(t: Vtree, m, w: int) -> bool:
    if m is None:
        return False
    if m == _ANY:
        return True
    if m == _ANY_INNER:
        return w in t.left
    return t.is_within(m, w)


def sdd_vtree_nodes(c: Circuit, t: Vtree) -> tuple[dict[int, Any], dict[str, Any] | None]:
    """Lowest vtree node each node is a structurally valid SDD for.

    Partition is not checked here. The second value is the witness of the
    first structural failure (``None`` when every node is valid).
    """
    low: dict[int, Any] = {}
    failure = None
    for n in c.reachable():
        g = c.gates[n]
        if g.kind in (TRUE, FALSE):
            low[n] = _ANY
        elif g.kind == LIT:
            if g.var in t.variables:
                low[n] = t.leaf_of(g.var)
            else:
                low[n] = None
                failure = failure or {"gate": n, "rule": "variable_outside_vtree"}
        elif g.kind == AND:
            low[n] = None
        else:
            low[n] = _or_node(c, t, n, low)
            if low[n] is None and failure is None:
                failure = {"gate": n, "rule": "structure"}
    return low, failure


def _or_node(c: Circuit, t: Vtree, n: int, low) -> Any:
    elements = []
    for ch in c.gates[n].children:
        eg = c.gates[ch]
        if eg.kind != AND:
            return None
        elements.append(eg.children)
    pvars = frozenset().union(*(c.vars_of(p) for p, _ in elements))
    svars = frozenset().union(*(c.vars_of(s) for _, s in elements))
    if any(low[p] is None or low[s] is None for p, s in elements):
        return None
    if pvars and svars:
        z = t.lca(pvars | svars)
        if z not in t.left or not (pvars <= t.vars_of(t.left[z]) and svars <= t.vars_of(t.right[z])):
            return None
        candidates = [z]
    elif pvars or svars:
        y = t.lca(pvars or svars)
        candidates = []
        while t.parent(y) is not None:
            p = t.parent(y)
            if (t.left[p] == y) == bool(pvars):
                candidates.append(p)
            y = p
    else:
        return _ANY_INNER
    for z in candidates:
        if all(_respects(t, low[p], t.left[z]) and _respects(t, low[s], t.right[z])
               for p, s in elements):
            return z
    return None


def check_sdd(c: Circuit, t: Vtree, cap: int = DEFAULT_CAP, samples: int = DEFAULT_SAMPLES,
              seed: int = 0) -> PropertyReport:
    """Recursive SDD shape w.r.t. ``t`` plus the partition property of every
    OR gate's primes.

    Shared subcircuits are checked once; constants are SDDs for any vtree.
    """
    low, failure = sdd_vtree_nodes(c, t)
    if failure is not None:
        return PropertyReport("strongly_deterministic_sdd", False, failure)
    if low[c.root] is None or (low[c.root] == _ANY_INNER and not t.left):
        return PropertyReport("strongly_deterministic_sdd", False,
                              {"gate": c.root, "rule": "structure"})
    tables = _Tables(c, cap, samples, seed)
    for n in c.reachable():
        g = c.gates[n]
        if g.kind != OR:
            continue
        primes = [c.gates[e].children[0] for e in g.children]
        z = low[n]
        over = t.vars_of(t.left[z]) if z not in (_ANY, _ANY_INNER) else frozenset()
        bits, full, decode = tables.tables(primes, over)
        rep = _partition_report(bits, full, decode, tables.method, {"gate": n})
        if not rep.holds:
            rep.property = "strongly_deterministic_sdd"
            return rep
    report = PropertyReport("strongly_deterministic_sdd", True, None, tables.method)
    if tables.sampled:
        report.notes.append("sampled, not proven")
    return report


def check(c: Circuit, prop: str, t: Vtree | None = None, cap: int = DEFAULT_CAP,
          seed: int = 0) -> PropertyReport:
    """Dispatch by property name (as used on the command line)."""
    needs_vtree = {"respects_vtree", "structured", "sdd", "strongly_deterministic_sdd"}
    if prop in needs_vtree and t is None:
        raise InputError(f"property {prop!r} needs a vtree")
    if prop == "decomposable":
        return check_decomposable(c)
    if prop == "deterministic":
        return check_deterministic(c, cap, seed=seed)
    if prop in ("respects_vtree", "structured"):
        return check_respects_vtree(c, t, "ddnnf")
    if prop == "smooth":
        return check_smooth(c)
    if prop == "simple":
        return check_simple(c)
    if prop in ("sdd", "strongly_deterministic_sdd"):
        return check_sdd(c, t, cap, seed=seed)
    raise InputError(f"unknown property {prop!r}")
