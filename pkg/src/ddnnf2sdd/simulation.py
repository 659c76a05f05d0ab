"""Building an SDD over the auxiliary-variable vtree from a d-DNNF pair.

Nodes of the output are keyed by pairs ``(u, tag)`` where ``u`` is a source
node tagged with its origin (``"d"`` or ``"dbar"``) and ``tag`` is one of
``"empty"``, ``"and"``, ``"top"``, ``"bot"`` or another tagged source node.
All keys live in one hash-consing builder, so every ``(u, "empty")`` can be
inspected on its own even when it is unreachable from the final root.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from typing import Any, Mapping

from .circuit import AND, FALSE, LIT, OR, TRUE, Circuit, CircuitBuilder
from .errors import InputError, PropertyViolation
from .oracle import TruthTable, bit_tables, exhaustive_masks, random_masks, truth_table
from .transforms import node_sets, prepare, restrict, shell_restriction_for
from .validators import PropertyReport, check_partition, check_sdd
from .vtree import Vtree, decomposition_nodes, modify, normalize

D, DBAR = "d", "dbar"
EMPTY, CONJ, TOP, BOT = "empty", "and", "top", "bot"

COMPLEMENT_CAP = 16
COMPLEMENT_SAMPLES = 1 << 14


def subvtree(t: Vtree, v: int) -> Vtree:
    """The subtree of ``t`` rooted at ``v`` with the same node ids."""
    keep = t.subtree(v)
    left = {n: t.left[n] for n in keep if n in t.left}
    right = {n: t.right[n] for n in keep if n in t.left}
    var = {n: t.var[n] for n in keep if n in t.var}
    vs = t.vars_of(v)
    return Vtree(left, right, var, v, t.aux & vs)


def _value(f: TruthTable, a: Mapping[int, int]) -> int:
    return f({x: a[x] for x in f.variables})


def _two_var_into(b: CircuitBuilder, f: TruthTable, t: Vtree, v: int) -> int:
    vs = t.vars_of(v)
    extra = set(f.variables) - vs
    if extra:
        raise InputError(f"function mentions {sorted(extra)} outside the vtree")
    if len(vs) > 2:
        raise InputError("two_var_sdd needs a vtree on at most two variables")

    def over_one(x, g0, g1):
        if g0 == g1:
            return b.const(g0)
        return b.literal(x if g1 else -x)

    if v not in t.left:
        x = t.var[v]
        return over_one(x, _value(f, {x: 0}), _value(f, {x: 1}))
    x, y = t.var[t.left[v]], t.var[t.right[v]]
    g = {(a, c): _value(f, {x: a, y: c}) for a in (0, 1) for c in (0, 1)}
    if g[0, 0] == g[1, 0] and g[0, 1] == g[1, 1]:
        return over_one(y, g[0, 0], g[0, 1])
    if g[0, 0] == g[0, 1] and g[1, 0] == g[1, 1]:
        return over_one(x, g[0, 0], g[1, 0])
    hi = over_one(y, g[1, 0], g[1, 1])
    lo = over_one(y, g[0, 0], g[0, 1])
    return b.disj((b.conj(b.literal(x), hi), b.conj(b.literal(-x), lo)))


def two_var_sdd(f: TruthTable, t2: Vtree) -> Circuit:
    """Canonical SDD of at most seven nodes for a function on <= 2 variables.

    Decides on the left variable: primes ``x`` then ``-x``, subs literals or
    constants. Functions of one variable become a literal or a constant.
    """
    b = CircuitBuilder()
    root = _two_var_into(b, f, t2, t2.root)
    return b.build(root, t2.variables)


def preprocess_base(c: Circuit, t: Vtree) -> Circuit:
    """Replace every subcircuit whose decomposition node has at most two
    variables by its canonical small SDD."""
    table = decomposition_nodes(c, t)
    b = CircuitBuilder()
    new: dict[int, int] = {}
    for n in c.reachable():
        g = c.gates[n]
        v = table.get(n)
        if v is not None and len(t.vars_of(v)) <= 2:
            new[n] = _two_var_into(b, truth_table(c, t.vars_of(v), node=n), t, v)
        elif g.kind == TRUE:
            new[n] = b.true()
        elif g.kind == FALSE:
            new[n] = b.false()
        elif g.kind == LIT:
            new[n] = b.literal(g.lit)
        elif g.kind == AND:
            new[n] = b.conj(new[g.children[0]], new[g.children[1]])
        else:
            new[n] = b.disj(new[ch] for ch in g.children)
    return b.build(new[c.root], c.universe, c.aux)


def key_str(key) -> str:
    """Text form of a tagged source node or a full key, e.g. ``d:4|empty``."""
    if isinstance(key[0], str):
        return f"{key[0]}:{key[1]}"
    u, tag = key
    tag_text = key_str(tag) if isinstance(tag, tuple) else tag
    return f"{key_str(u)}|{tag_text}"


@dataclass
class CaseRecord:
    """How one ``(u, empty)`` node was produced."""

    case: str
    vtree_node: int | None
    node_map: int | None
    p: dict[int, int] = field(default_factory=dict)
    set_node: int | None = None
    members: list[tuple[str, int]] = field(default_factory=list)
    excluded: list[tuple[str, int]] = field(default_factory=list)


@dataclass
class SimulationTrace:
    """Bookkeeping of one simulation run.

    ``key_map`` maps every created key to its id in S, or to ``None`` when
    the key is not reachable from the root of S. ``d`` and ``dbar`` are the
    prepared (smoothed, simplified) inputs the node ids refer to.
    """

    d: Circuit
    dbar: Circuit
    t: Vtree
    t_prime: Vtree
    aux: list[int]
    root_key: tuple
    key_map: dict[tuple, int | None]
    cases: dict[tuple[str, int], CaseRecord]
    complement_method: str
    warnings: list[str] = field(default_factory=list)
    restrictions: list[tuple[int, dict[int, int]]] = field(default_factory=list)
    _builder: CircuitBuilder | None = field(default=None, repr=False)
    _store: dict[tuple, int] = field(default_factory=dict, repr=False)

    def circuit(self, origin: str) -> Circuit:
        return self.d if origin == D else self.dbar

    @property
    def bookkeeping_bound(self) -> int:
        """|Y x Z| with Y the source nodes and Z the tags."""
        y = self.d.size() + self.dbar.size()
        return y * (y + 4)

    def subcircuit(self, key) -> Circuit:
        """The part of S below ``key`` (which need not be reachable)."""
        universe = self.t_prime.variables
        return self._builder.build(self._store[key], universe, self.aux)

    def to_json(self) -> dict[str, Any]:
        nodes = []
        for (o, u), rec in sorted(self.cases.items()):
            item: dict[str, Any] = {
                "key": key_str((o, u)),
                "case": rec.case,
                "vtree_node": rec.vtree_node,
                "node_map": rec.node_map,
                "s_node": self.key_map.get(((o, u), EMPTY)),
            }
            if rec.case in ("or", "and"):
                item["p"] = {str(x): b for x, b in sorted(rec.p.items())}
                item["set_node"] = rec.set_node
                item["members"] = [key_str(m) for m in rec.members]
                if rec.excluded:
                    item["excluded"] = [key_str(m) for m in rec.excluded]
            nodes.append(item)
        keys = [{"key": key_str(k), "s_node": s}
                for k, s in sorted(self.key_map.items(), key=lambda kv: key_str(kv[0]))]
        return {
            "root": key_str(self.root_key),
            "aux": list(self.aux),
            "complement_check": self.complement_method,
            "size_d": self.d.size(),
            "size_dbar": self.dbar.size(),
            "bookkeeping_bound": self.bookkeeping_bound,
            "warnings": list(self.warnings),
            "nodes": nodes,
            "keys": keys,
        }


def check_complement(d: Circuit, dbar: Circuit, over, cap: int = COMPLEMENT_CAP,
                     samples: int = COMPLEMENT_SAMPLES, seed: int = 0) -> str:
    """Verify ``dbar == not d``; returns the method used.

    Raises ``InputError`` carrying a counterexample when the check fails.
    """
    order = sorted(over)
    if len(order) <= cap:
        masks, full = exhaustive_masks(order)
        method = "exhaustive"
    else:
        masks, full = random_masks(order, samples, random.Random(seed))
        method = "sampled"
    t1 = bit_tables(d, masks, full)[d.root]
    t2 = bit_tables(dbar, masks, full)[dbar.root]
    bad = (t1 & t2) | (full & ~(t1 | t2))
    if bad:
        i = (bad & -bad).bit_length() - 1
        if method == "exhaustive":
            n = len(order)
            witness = {x: (i >> (n - 1 - k)) & 1 for k, x in enumerate(order)}
        else:
            witness = {x: (masks[x] >> i) & 1 for x in order}
        err = InputError(f"second circuit is not the complement of the first at {witness}")
        err.witness = witness
        raise err
    return method


class _Simulator:
    def __init__(self, d: Circuit, dbar: Circuit, t: Vtree, t_prime: Vtree):
        self.circ = {D: d, DBAR: dbar}
        self.t = t
        self.tp = t_prime
        self.dn = {o: decomposition_nodes(c, t, oriented=True) for o, c in self.circ.items()}
        self.b = CircuitBuilder()
        self.top = self.b.true()
        self.bot = self.b.false()
        self.store: dict[tuple, int] = {}
        self.cases: dict[tuple[str, int], CaseRecord] = {}
        self.restricted: dict[tuple[str, tuple], Any] = {}
        self.restrictions: list[tuple[int, dict[int, int]]] = []
        self.children = {o: [set(g.children) for g in c.gates] for o, c in self.circ.items()}

    def _restrict(self, origin: str, p: dict[int, int]):
        k = (origin, tuple(sorted(p.items())))
        if k not in self.restricted:
            self.restricted[k] = restrict(self.circ[origin], self.t, p)
        return self.restricted[k]

    def _sets(self, origin: str, u: int, v: int, exclude_children_of: int | None):
        p = shell_restriction_for(self.circ[origin], self.t, u, v)
        if (v, p) not in self.restrictions:
            self.restrictions.append((v, p))
        members, excluded = [], []
        for o in (D, DBAR):
            rc = self._restrict(o, p)
            if v not in rc.vtree:
                continue
            own = o == origin
            ns = node_sets(rc, v, exclude_children_of if own else None)
            if own and rc.image.get(u) not in ns.r_set:
                raise PropertyViolation(
                    f"{key_str((origin, u))} is not in R at vtree node {v} under {p}",
                    {"gate": u, "origin": origin})
            chosen = ns.r_plus_plus if (own and ns.r_plus_plus is not None) else ns.r_plus
            members.extend((o, ns.origin[r]) for r in chosen)
            excluded.extend((o, ns.origin[r]) for r in ns.r_plus if r not in chosen)
        return p, members, excluded

    def node(self, origin: str, u: int) -> int:
        key = ((origin, u), EMPTY)
        if key in self.store:
            return self.store[key]
        c = self.circ[origin]
        g = c.gates[u]
        b = self.b
        if g.kind == TRUE:
            self.cases[(origin, u)] = CaseRecord("const", None, None)
            out = self.top
        elif g.kind == FALSE:
            self.cases[(origin, u)] = CaseRecord("const", None, None)
            out = self.bot
        else:
            v = self.dn[origin][u]
            if len(self.t.vars_of(v)) <= 2:
                f = truth_table(c, self.t.vars_of(v), node=u)
                out = _two_var_into(b, f, self.t, v)
                self.cases[(origin, u)] = CaseRecord("base", v, v)
            elif g.kind == OR:
                out = self._or_case(origin, u, v)
            else:
                out = self._and_case(origin, u, v)
        self.store[key] = out
        return out

    def _or_case(self, origin: str, u: int, v: int) -> int:
        b = self.b
        p, members, _ = self._sets(origin, u, v, None)
        elements = []
        for m in members:
            prime = self.node(*m)
            edge = m[0] == origin and m[1] in self.children[origin][u]
            sink_tag = TOP if edge else BOT
            self.store[((origin, u), sink_tag)] = self.top if edge else self.bot
            el = b.conj(prime, self.top if edge else self.bot)
            self.store[((origin, u), m)] = el
            elements.append(el)
        self.cases[(origin, u)] = CaseRecord("or", v, self.tp.parent(v), p, v, members)
        return b.disj(elements)

    def _and_case(self, origin: str, u: int, v: int) -> int:
        b = self.b
        c = self.circ[origin]
        ul, ur = c.gates[u].children
        vl = self.dn[origin][ul]
        p, members, excluded = self._sets(origin, ul, vl, ul)
        conj = b.conj(self.node(origin, ul), self.node(origin, ur))
        self.store[((origin, u), CONJ)] = conj
        elements = [conj]
        for m in members:
            el = b.conj(self.node(*m), self.bot)
            self.store[((origin, u), BOT)] = self.bot
            self.store[((origin, u), m)] = el
            elements.append(el)
        self.cases[(origin, u)] = CaseRecord("and", v, v, p, vl, members, excluded)
        return b.disj(elements)


def simulate(d: Circuit, dbar: Circuit, t: Vtree, cap: int = COMPLEMENT_CAP,
             seed: int = 0, verify_complement: bool = True) -> tuple[Circuit, Vtree, SimulationTrace]:
    """SDD for the function of ``d`` over the modified vtree.

    The vtree is normalized and both circuits are smoothed along it and
    simplified before the construction; trace ids refer to those prepared
    circuits. Every source node gets its ``(u, empty)`` node, reachable or
    not, so the per-node claims can be checked afterwards.
    """
    if not (d.original_vars | dbar.original_vars) <= t.variables:
        missing = sorted((d.original_vars | dbar.original_vars) - t.variables)
        raise InputError(f"vtree misses variables {missing}")
    tn = normalize(t)
    notes = []
    method = "skipped"
    if verify_complement:
        method = check_complement(d, dbar, tn.variables, cap, seed=seed)
        if method == "sampled":
            msg = (f"complement verified on {COMPLEMENT_SAMPLES} random assignments only "
                   f"({len(tn.variables)} variables exceed the cap of {cap})")
            notes.append(msg)
            warnings.warn(msg, stacklevel=2)
    dp = prepare(d, tn)
    dbp = prepare(dbar, tn)
    tp, aux = modify(tn)
    sim = _Simulator(dp, dbp, tn, tp)
    for origin, c in ((D, dp), (DBAR, dbp)):
        for u in c.reachable():
            sim.node(origin, u)
    root_key = ((D, dp.root), EMPTY)
    universe = tn.variables | frozenset(aux)
    s, renumber = sim.b.build_with_map(sim.store[root_key], universe, aux)
    key_map = {k: renumber.get(sid) for k, sid in sim.store.items()}
    trace = SimulationTrace(dp, dbp, tn, tp, list(aux), root_key, key_map, sim.cases,
                            method, notes, sim.restrictions, sim.b, dict(sim.store))
    return s, tp, trace


def node_map(trace: SimulationTrace, origin: str, u: int) -> int | None:
    """Vtree node of T' that ``(u, empty)`` is an SDD for."""
    rec = trace.cases.get((origin, u))
    return None if rec is None else rec.node_map


def _depths(c: Circuit) -> list[int]:
    out: list[int] = []
    for g in c.gates:
        out.append(1 + max((out[ch] for ch in g.children), default=-1))
    return out


@dataclass
class Lemma2Report:
    checked: int
    failures: list[dict[str, Any]]
    by_depth: dict[int, list[int]]
    partitions_checked: int

    @property
    def holds(self) -> bool:
        return not self.failures


def verify_lemma2(trace: SimulationTrace, cap: int = 16) -> Lemma2Report:
    """Check every ``(u, empty)``: an SDD for T'_node(u) computing f_u.

    ``by_depth`` maps the depth of the S subgraph to [checked, passed].
    """
    failures: list[dict[str, Any]] = []
    by_depth: dict[int, list[int]] = {}
    partitions = 0
    for (origin, u), rec in sorted(trace.cases.items()):
        key = ((origin, u), EMPTY)
        sub = trace.subcircuit(key)
        depth = _depths(sub)[sub.root]
        row = by_depth.setdefault(depth, [0, 0])
        row[0] += 1
        src = trace.circuit(origin)
        if rec.case == "const":
            ok = sub.gates[sub.root].kind == src.gates[u].kind
            if not ok:
                failures.append({"key": key_str(key), "reason": "constant mismatch"})
            row[1] += ok
            continue
        over = trace.t.vars_of(rec.vtree_node)
        if len(over) > cap:
            failures.append({"key": key_str(key), "reason": f"{len(over)} variables exceed cap"})
            continue
        rep = check_sdd(sub, subvtree(trace.t_prime, rec.node_map), cap)
        partitions += sum(1 for n in sub.reachable() if sub.gates[n].kind == OR)
        if not rep.holds:
            failures.append({"key": key_str(key), "reason": "not an SDD", "witness": rep.witness})
            continue
        mine = truth_table(sub, over).bits
        theirs = truth_table(src, over, node=u).bits
        if mine != theirs:
            failures.append({"key": key_str(key), "reason": "function differs"})
            continue
        row[1] += 1
    return Lemma2Report(len(trace.cases), failures, dict(sorted(by_depth.items())), partitions)


def verify_node_set_props(trace: SimulationTrace, cap: int = 16) -> list[PropertyReport]:
    """Disjointness within each circuit's R+ and the partition of their union,
    for every shell restriction used during the run."""
    reports = []
    for v, p in trace.restrictions:
        over = trace.t.vars_of(v)
        if len(over) > cap:
            continue
        fs_all = []
        for origin in (D, DBAR):
            rc = restrict(trace.circuit(origin), trace.t, p)
            if v not in rc.vtree:
                continue
            ns = node_sets(rc, v)
            fs = [(rc.circuit, r) for r in ns.r_plus]
            fs_all.extend(fs)
            masks, full = exhaustive_masks(sorted(over))
            bits = [bit_tables(rc.circuit, masks, full, r)[r] for r in ns.r_plus]
            acc, ok = 0, True
            for x in bits:
                ok = ok and not (acc & x)
                acc |= x
            reports.append(PropertyReport("disjoint", ok, None if ok else
                                          {"v": v, "p": p, "origin": origin}, "exhaustive"))
        rep = check_partition(fs_all, over, cap)
        if not rep.holds:
            rep.witness = {**(rep.witness or {}), "v": v, "p": p}
        reports.append(rep)
    return reports
