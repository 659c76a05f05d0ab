"""Circuit-to-circuit rewrites and the node-set machinery of the simulation.

All functions here are pure: they read an immutable circuit and return a new
one (or a report). The smoothing implemented here is the vtree-aligned kind:
afterwards every non-constant node mentions exactly the variables of its
decomposition node and every AND gate lists its children in vtree order.
That is what makes the node sets R(D_p, v) cover the restricted function.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .circuit import AND, FALSE, LIT, OR, TRUE, Circuit, CircuitBuilder
from .errors import InputError, PropertyViolation, StructuralError
from .vtree import Vtree, decomposition_nodes, prune, respected_node, shell


def _require_decomposable(c: Circuit):
    w = c.decomposition_witness()
    if w is not None:
        raise PropertyViolation(
            f"AND node {w[0]} is not decomposable (shares variable {w[1]})",
            {"property": "decomposable", "gate": w[0], "variable": w[1]})


def make_simple(c: Circuit) -> Circuit:
    """Remove OR-to-OR edges, constant children of ORs and non-constant
    nodes that compute FALSE.

    Constants are propagated through AND gates, an OR with a single
    remaining child is replaced by that child, and duplicate OR children are
    dropped. The result is equivalent, still decomposable and deterministic,
    and respects every vtree the input respected.
    """
    _require_decomposable(c)
    b = CircuitBuilder()
    f_node, t_node = b.false(), b.true()
    new: list[int] = []
    for g in c.gates:
        if g.kind == LIT:
            new.append(b.literal(g.lit))
        elif g.kind == TRUE:
            new.append(t_node)
        elif g.kind == FALSE:
            new.append(f_node)
        elif g.kind == AND:
            x, y = new[g.children[0]], new[g.children[1]]
            if x == f_node or y == f_node:
                new.append(f_node)
            elif x == t_node:
                new.append(y)
            elif y == t_node:
                new.append(x)
            else:
                new.append(b.conj(x, y))
        else:
            kids: list[int] = []
            top = False
            for ch in g.children:
                n = new[ch]
                if n == f_node:
                    continue
                if n == t_node:
                    top = True
                    break
                sub = b.gate(n)
                for k in (sub.children if sub.kind == OR else (n,)):
                    if k not in kids:
                        kids.append(k)
            if top:
                new.append(t_node)
            elif not kids:
                new.append(f_node)
            elif len(kids) == 1:
                new.append(kids[0])
            else:
                new.append(b.disj(kids))
    return b.build(new[c.root], c.universe, c.aux)


def _top(b: CircuitBuilder, t: Vtree, w: int, memo: dict[int, int]) -> int:
    """Vtree-shaped tautology over vars(w): (x | -x) at leaves, ANDs above."""
    if w not in memo:
        if w in t.left:
            memo[w] = b.conj(_top(b, t, t.left[w], memo), _top(b, t, t.right[w], memo))
        else:
            x = t.var[w]
            memo[w] = b.disj((b.literal(x), b.literal(-x)))
    return memo[w]


def _lift(b: CircuitBuilder, t: Vtree, node: int, at: int, to: int,
          tops: dict[int, int]) -> int:
    """Conjoin tautologies for the vtree path from ``at`` up to ``to``."""
    while at != to:
        p = t.parent(at)
        if p is None:
            raise StructuralError(f"vtree node {to} is not an ancestor of {at}")
        if t.left[p] == at:
            node = b.conj(node, _top(b, t, t.right[p], tops))
        else:
            node = b.conj(_top(b, t, t.left[p], tops), node)
        at = p
    return node


def smooth(c: Circuit, t: Vtree) -> Circuit:
    """Vtree-aligned smoothing.

    Every OR child and AND child is padded with ``x | -x`` gadgets along the
    vtree until it mentions all variables of the vtree node it sits under,
    and the root is padded up to the vtree root. AND gates come out with
    their children in vtree orientation. Constant children are folded away
    first, so FALSE-computing gates disappear as a side effect.
    """
    _require_decomposable(c)
    missing = c.vars_of() - t.variables
    if missing:
        raise InputError(f"vtree misses variables {sorted(missing)}")
    b = CircuitBuilder()
    f_node, t_node = b.false(), b.true()
    tops: dict[int, int] = {}
    vs = c._all_vars()
    new: list[tuple[int, int | None]] = []
    for n, g in enumerate(c.gates):
        if g.kind == LIT:
            new.append((b.literal(g.lit), t.leaf_of(g.var)))
        elif g.kind == TRUE:
            new.append((t_node, None))
        elif g.kind == FALSE:
            new.append((f_node, None))
        elif g.kind == AND:
            (x, tx), (y, ty) = new[g.children[0]], new[g.children[1]]
            if x == f_node or y == f_node:
                new.append((f_node, None))
            elif x == t_node:
                new.append((y, ty))
            elif y == t_node:
                new.append((x, tx))
            else:
                if respected_node(t, vs[g.children[0]], vs[g.children[1]], False) is None:
                    raise PropertyViolation(
                        f"AND node {n} respects no vtree node",
                        {"property": "respects_vtree", "gate": n})
                z = t.lca_nodes(tx, ty)
                if t.is_within(ty, t.left[z]):
                    (x, tx), (y, ty) = (y, ty), (x, tx)
                x = _lift(b, t, x, tx, t.left[z], tops)
                y = _lift(b, t, y, ty, t.right[z], tops)
                new.append((b.conj(x, y), z))
        else:
            kids = []
            for ch in g.children:
                kids.append(new[ch])
            if any(k == t_node for k, _ in kids):
                new.append((t_node, None))
                continue
            kids = [(k, tk) for k, tk in kids if k != f_node]
            if not kids:
                new.append((f_node, None))
            elif len(kids) == 1:
                new.append(kids[0])
            else:
                w = kids[0][1]
                for _, tk in kids[1:]:
                    w = t.lca_nodes(w, tk)
                lifted = []
                for k, tk in kids:
                    k = _lift(b, t, k, tk, w, tops)
                    if k not in lifted:
                        lifted.append(k)
                new.append((b.disj(lifted), w) if len(lifted) > 1 else (lifted[0], w))
    root, at = new[c.root]
    if at is not None:
        root = _lift(b, t, root, at, t.root, tops)
    return b.build(root, c.universe | t.variables, c.aux)


def prepare(c: Circuit, t: Vtree) -> Circuit:
    """Smooth then simplify: the input shape the simulation expects."""
    return make_simple(smooth(c, t))


# -- restriction --------------------------------------------------------------

@dataclass(frozen=True)
class RestrictedCircuit:
    """A circuit conditioned on a partial assignment.

    ``origin`` maps each node of the restricted circuit to the source node it
    came from (the lowest source id when several collapse together) and
    ``image`` maps every surviving source node to its restricted node.
    """

    circuit: Circuit
    vtree: Vtree
    assignment: Mapping[int, int]
    origin: Mapping[int, int]
    image: Mapping[int, int]


def restrict(c: Circuit, t: Vtree, p: Mapping[int, int]) -> RestrictedCircuit:
    """Condition ``c`` on ``p``.

    Literals over the assigned variables become constants, FALSE children of
    ORs are dropped, gates that become constant collapse, and what is no
    longer reachable disappears. An AND with one TRUE side is kept as is, so
    the result stays a subgraph of the source and respects the pruned vtree.
    """
    p = {int(k): int(bool(v)) for k, v in p.items()}
    unknown = set(p) - t.variables
    if unknown:
        raise InputError(f"assignment mentions unknown variables {sorted(unknown)}")
    b = CircuitBuilder()
    f_node, t_node = b.false(), b.true()
    new: list[int] = []
    for g in c.gates:
        if g.kind == LIT:
            if g.var in p:
                new.append(t_node if (p[g.var] == 1) == (g.lit > 0) else f_node)
            else:
                new.append(b.literal(g.lit))
        elif g.kind == TRUE:
            new.append(t_node)
        elif g.kind == FALSE:
            new.append(f_node)
        elif g.kind == AND:
            x, y = new[g.children[0]], new[g.children[1]]
            if x == f_node or y == f_node:
                new.append(f_node)
            elif x == t_node and y == t_node:
                new.append(t_node)
            else:
                new.append(b.conj(x, y))
        else:
            kids = [new[ch] for ch in g.children if new[ch] != f_node]
            if not kids:
                new.append(f_node)
            elif t_node in kids:
                new.append(t_node)
            else:
                new.append(b.disj(kids))
    circuit, renumber = b.build_with_map(new[c.root], c.universe - set(p), c.aux - set(p))
    origin: dict[int, int] = {}
    image: dict[int, int] = {}
    for old, stored in enumerate(new):
        r = renumber.get(stored)
        if r is None:
            continue
        image[old] = r
        origin.setdefault(r, old)
    return RestrictedCircuit(circuit, prune(t, p.keys()), p, origin, image)


# -- node sets ----------------------------------------------------------------

@dataclass(frozen=True)
class NodeSetReport:
    """R, R+ and (optionally) R++ at vtree node ``v`` of a restricted circuit.

    Members are node ids of the restricted circuit in increasing order;
    ``source`` translates them back to ids of the unrestricted circuit.
    """

    v: int
    p: Mapping[int, int]
    r_set: tuple[int, ...]
    r_plus: tuple[int, ...]
    r_plus_plus: tuple[int, ...] | None
    origin: Mapping[int, int] = field(repr=False)

    def source(self, members: Iterable[int]) -> tuple[int, ...]:
        return tuple(self.origin[m] for m in members)


def node_sets(rc: RestrictedCircuit, v: int, u_left: int | None = None,
              oriented: bool = False) -> NodeSetReport:
    """Nodes whose decomposition node in the pruned vtree is ``v``.

    ``u_left`` is a node of the *source* circuit; when given, R++ is R+
    without it and without its children.
    """
    if v not in rc.vtree:
        raise InputError(f"vtree node {v} is not in the pruned vtree")
    c = rc.circuit
    table = decomposition_nodes(c, rc.vtree, oriented)
    r = [n for n in range(len(c)) if table.get(n) == v]
    members = set(r)
    r_plus = tuple(n for n in r if not any(ch in members for ch in c.gates[n].children))
    r_pp = None
    if u_left is not None:
        drop = set()
        img = rc.image.get(u_left)
        if img is not None:
            drop.add(img)
            drop.update(c.gates[img].children)
        r_pp = tuple(n for n in r_plus if n not in drop)
    return NodeSetReport(v, dict(rc.assignment), tuple(r), r_plus, r_pp, rc.origin)


# -- certificates -------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    """A certificate: a tree-shaped subgraph containing the root.

    ``decisions`` lists (variable, forced value) for every literal leaf.
    ``positive`` is False when the certificate reaches a FALSE leaf, i.e.
    it is not a 1-certificate.
    """

    nodes: frozenset[int]
    decisions: tuple[tuple[int, int], ...]
    positive: bool = True

    def represents(self, assignment: Mapping[int, int]) -> bool:
        return self.positive and all(int(bool(assignment[x])) == v for x, v in self.decisions)

    def assignment(self) -> dict[int, int]:
        return dict(self.decisions)


def _least(c: Circuit, node: int, sat: list[bool], nodes: set[int], decisions: dict[int, int]):
    """Add the lexicographically least satisfying certificate below ``node``."""
    stack = [node]
    while stack:
        n = stack.pop()
        if n in nodes:
            continue
        nodes.add(n)
        g = c.gates[n]
        if g.kind == LIT:
            decisions[g.var] = 1 if g.lit > 0 else 0
        elif g.kind == AND:
            stack.extend(reversed(g.children))
        elif g.kind == OR:
            stack.append(next(ch for ch in g.children if sat[ch]))


def extract_certificate_through(c: Circuit, u: int) -> Certificate | None:
    """A 1-certificate containing the root and ``u``, or None if none exists.

    The root-to-``u`` path takes, for every node, the highest-numbered
    parent that lies on some satisfiable context; off-path AND siblings and
    the part below ``u`` are completed with least satisfying certificates.
    """
    _require_decomposable(c)
    u = c._node(u)
    reach = set(c.reachable())
    if u not in reach:
        raise StructuralError(f"node {u} is not reachable from the root")
    sat = c.satisfiable_nodes()
    via: dict[int, int] = {}
    live = [False] * len(c)
    live[c.root] = sat[c.root]
    for n in range(c.root, -1, -1):
        if not live[n]:
            continue
        for ch in c.gates[n].children:
            if sat[ch] and not live[ch]:
                live[ch] = True
                via[ch] = n
    if not live[u]:
        return None
    nodes: set[int] = set()
    decisions: dict[int, int] = {}
    path = [u]
    while path[-1] != c.root:
        path.append(via[path[-1]])
    on_path = set(path)
    nodes.update(path)
    for n in path[1:]:
        g = c.gates[n]
        if g.kind == AND:
            for ch in g.children:
                if ch not in on_path:
                    _least(c, ch, sat, nodes, decisions)
    nodes.discard(u)
    _least(c, u, sat, nodes, decisions)
    return Certificate(frozenset(nodes), tuple(sorted(decisions.items())))


def shell_restriction_for(c: Circuit, t: Vtree, u: int, v: int) -> dict[int, int]:
    """Assignment to shell(v) read off a certificate through ``u``.

    Shell variables the certificate leaves undecided are set to 0.
    """
    cert = extract_certificate_through(c, u)
    if cert is None:
        raise PropertyViolation(
            f"node {u} lies on no 1-certificate (dead node); run make_simple first",
            {"gate": u})
    decided = cert.assignment()
    return {x: decided.get(x, 0) for x in sorted(shell(t, v))}


def enumerate_certificates(c: Circuit, limit: int = 100_000) -> list[Certificate]:
    """All certificates of ``c`` (up to ``limit``) in a fixed order.

    OR gates contribute one certificate per child in child order; AND gates
    combine their children's lists as a cartesian product, left child major.
    """
    _require_decomposable(c)
    memo: dict[int, list[tuple[frozenset[int], tuple, bool]]] = {}
    for n in c.reachable():
        g = c.gates[n]
        me = frozenset((n,))
        if g.kind == LIT:
            memo[n] = [(me, ((g.var, 1 if g.lit > 0 else 0),), True)]
        elif g.kind == TRUE:
            memo[n] = [(me, (), True)]
        elif g.kind == FALSE:
            memo[n] = [(me, (), False)]
        elif g.kind == AND:
            out = []
            for (na, da, pa), (nb, db, pb) in itertools.product(
                    memo[g.children[0]], memo[g.children[1]]):
                out.append((me | na | nb, da + db, pa and pb))
                if len(out) >= limit:
                    break
            memo[n] = out
        else:
            out = []
            for ch in g.children:
                for nodes, dec, pos in memo[ch]:
                    out.append((me | nodes, dec, pos))
                    if len(out) >= limit:
                        break
                if len(out) >= limit:
                    break
            memo[n] = out
    return [Certificate(nodes, tuple(sorted(dec)), pos)
            for nodes, dec, pos in memo[c.root][:limit]]
