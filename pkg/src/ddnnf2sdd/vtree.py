"""Vtrees, pruned vtrees, and the tree surgery used by the simulation.

A vtree node is identified by a non-negative integer id. Ids survive every
operation in this module: ``normalize`` swaps children in place of the same
ids, ``prune`` turns a subtree root into a stub under its old id, and
``modify`` adds fresh ids for the inserted parents and auxiliary leaves. This
is what lets a node of T be looked up directly in T' or in a pruned tree.
"""

from __future__ import annotations

import random
from typing import Iterable

from .circuit import AND, LIT, OR, Circuit
from .errors import InputError, PropertyViolation, StructuralError


class Vtree:
    """Full binary tree whose leaves carry variables, or ``None`` for stubs."""

    __slots__ = ("left", "right", "var", "root", "aux", "_parent", "_depth",
                 "_vars", "_leaf", "_order")

    def __init__(self, left: dict[int, int], right: dict[int, int],
                 var: dict[int, int | None], root: int, aux: Iterable[int] = ()):
        self.left = dict(left)
        self.right = dict(right)
        self.var = dict(var)
        self.root = root
        self.aux = frozenset(aux)
        if set(self.left) != set(self.right):
            raise StructuralError("every internal vtree node needs two children")
        if set(self.left) & set(self.var):
            raise StructuralError("a vtree node cannot be both leaf and internal")
        self._parent: dict[int, int] = {}
        self._depth: dict[int, int] = {root: 0}
        self._leaf: dict[int, int] = {}
        order: list[int] = []
        stack = [(root, False)]
        seen = set()
        while stack:
            v, expanded = stack.pop()
            if expanded:
                order.append(v)
                continue
            if v in seen:
                raise StructuralError(f"vtree node {v} is reachable twice")
            seen.add(v)
            if v in self.left:
                stack.append((v, True))
                for c in (self.right[v], self.left[v]):
                    self._parent[c] = v
                    self._depth[c] = self._depth[v] + 1
                    stack.append((c, False))
            elif v in self.var:
                order.append(v)
                x = self.var[v]
                if x is not None:
                    if x in self._leaf:
                        raise StructuralError(f"variable {x} labels two leaves")
                    self._leaf[x] = v
            else:
                raise StructuralError(f"vtree node {v} is undefined")
        if seen != set(self.left) | set(self.var):
            raise StructuralError("vtree has nodes unreachable from the root")
        self._order = order
        self._vars: dict[int, frozenset[int]] = {}
        for v in order:
            if v in self.left:
                self._vars[v] = self._vars[self.left[v]] | self._vars[self.right[v]]
            else:
                x = self.var[v]
                self._vars[v] = frozenset() if x is None else frozenset((x,))
        if not self.aux <= self.variables:
            raise StructuralError("auxiliary variables must label leaves")

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_nested(cls, nested, aux: Iterable[int] = ()) -> "Vtree":
        """Build from nested pairs, e.g. ``((1, 2), 3)``; ``None`` is a stub.

        Ids are assigned in post-order starting at 0.
        """
        left, right, var = {}, {}, {}
        counter = 0

        def walk(item):
            nonlocal counter
            if isinstance(item, tuple):
                if len(item) != 2:
                    raise StructuralError("vtree tuples must be pairs")
                a = walk(item[0])
                b = walk(item[1])
                node = counter
                counter += 1
                left[node], right[node] = a, b
                return node
            if item is not None and (not isinstance(item, int) or item <= 0):
                raise StructuralError(f"bad vtree leaf {item!r}")
            node = counter
            counter += 1
            var[node] = item
            return node

        root = walk(nested)
        return cls(left, right, var, root, aux)

    @classmethod
    def right_linear(cls, variables: Iterable[int]) -> "Vtree":
        vs = list(variables)
        if not vs:
            raise InputError("a vtree needs at least one variable")
        nested = vs[-1]
        for x in reversed(vs[:-1]):
            nested = (x, nested)
        return cls.from_nested(nested)

    @classmethod
    def balanced(cls, variables: Iterable[int]) -> "Vtree":
        vs = list(variables)
        if not vs:
            raise InputError("a vtree needs at least one variable")

        def split(items):
            if len(items) == 1:
                return items[0]
            mid = len(items) // 2
            return (split(items[:mid]), split(items[mid:]))

        return cls.from_nested(split(vs))

    @classmethod
    def random(cls, variables: Iterable[int], rng: random.Random) -> "Vtree":
        vs = list(variables)
        if not vs:
            raise InputError("a vtree needs at least one variable")
        rng.shuffle(vs)

        def split(items):
            if len(items) == 1:
                return items[0]
            cut = rng.randint(1, len(items) - 1)
            return (split(items[:cut]), split(items[cut:]))

        return cls.from_nested(split(vs))

    def to_nested(self, v: int | None = None):
        v = self.root if v is None else v
        if v in self.left:
            return (self.to_nested(self.left[v]), self.to_nested(self.right[v]))
        return self.var[v]

    # -- queries -------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Vtree):
            return NotImplemented
        return (self.left == other.left and self.right == other.right
                and self.var == other.var and self.root == other.root
                and self.aux == other.aux)

    def __hash__(self):
        return hash((self.root, tuple(self._order)))

    def __repr__(self):
        return f"Vtree({self.to_nested()!r})"

    def __contains__(self, v) -> bool:
        return v in self._vars

    def __len__(self):
        return len(self._order)

    def nodes(self) -> list[int]:
        """All node ids in post-order (children before parents)."""
        return list(self._order)

    @property
    def variables(self) -> frozenset[int]:
        return self._vars[self.root]

    @property
    def original_vars(self) -> frozenset[int]:
        return self.variables - self.aux

    @property
    def is_pruned(self) -> bool:
        return any(x is None for x in self.var.values())

    def check(self, v: int) -> int:
        if v not in self._vars:
            raise InputError(f"vtree node {v!r} does not exist")
        return v

    def is_leaf(self, v: int) -> bool:
        return self.check(v) not in self.left

    def is_stub(self, v: int) -> bool:
        return self.check(v) in self.var and self.var[v] is None

    def vars_of(self, v: int) -> frozenset[int]:
        return self._vars[self.check(v)]

    def parent(self, v: int) -> int | None:
        return self._parent.get(self.check(v))

    def depth(self, v: int) -> int:
        return self._depth[self.check(v)]

    def leaf_of(self, x: int) -> int:
        try:
            return self._leaf[x]
        except KeyError:
            raise InputError(f"variable {x} is not in the vtree") from None

    def children(self, v: int) -> tuple[int, int] | None:
        if self.check(v) in self.left:
            return self.left[v], self.right[v]
        return None

    def subtree(self, v: int) -> list[int]:
        """Post-order node ids of the subtree rooted at ``v``."""
        self.check(v)
        out, stack = [], [v]
        while stack:
            n = stack.pop()
            out.append(n)
            if n in self.left:
                stack.append(self.left[n])
                stack.append(self.right[n])
        keep = set(out)
        return [n for n in self._order if n in keep]

    def is_within(self, a: int, b: int) -> bool:
        """True when ``a`` lies in the subtree rooted at ``b``."""
        self.check(a)
        self.check(b)
        while a is not None and self._depth[a] > self._depth[b]:
            a = self._parent[a]
        return a == b

    def lca_nodes(self, a: int, b: int) -> int:
        while self._depth[a] > self._depth[b]:
            a = self._parent[a]
        while self._depth[b] > self._depth[a]:
            b = self._parent[b]
        while a != b:
            a = self._parent[a]
            b = self._parent[b]
        return a

    def lca(self, variables: Iterable[int]) -> int | None:
        """Lowest node whose variables include all of ``variables``."""
        node = None
        for x in variables:
            leaf = self.leaf_of(x)
            node = leaf if node is None else self.lca_nodes(node, leaf)
        return node

    def internal_nodes(self) -> list[int]:
        return [v for v in self._order if v in self.left]


def normalize(t: Vtree) -> Vtree:
    """Swap children so that no left child has more variables than its sibling."""
    left, right = dict(t.left), dict(t.right)
    for v in t.left:
        if len(t.vars_of(left[v])) > len(t.vars_of(right[v])):
            left[v], right[v] = right[v], left[v]
    return Vtree(left, right, t.var, t.root, t.aux)


def is_normalized(t: Vtree) -> bool:
    return all(len(t.vars_of(t.left[v])) <= len(t.vars_of(t.right[v])) for v in t.left)


def modify(t: Vtree) -> tuple[Vtree, list[int]]:
    """Insert a parent with a fresh auxiliary right leaf above every node
    mentioning more than two variables.

    Auxiliary variables are numbered upward from the largest variable in a
    post-order walk, so lower nodes get smaller numbers. Returns the new
    tree and the auxiliary variables in order.
    """
    left, right, var = dict(t.left), dict(t.right), dict(t.var)
    next_id = max(t.nodes()) + 1
    next_var = max((x for x in t.variables), default=0) + 1
    lifted: dict[int, int] = {}
    aux: list[int] = []
    for v in t.nodes():
        if v in t.left and len(t.vars_of(v)) > 2:
            prime, leaf = next_id, next_id + 1
            next_id += 2
            var[leaf] = next_var
            aux.append(next_var)
            next_var += 1
            left[prime], right[prime] = v, leaf
            lifted[v] = prime
    for v in t.left:
        left[v] = lifted.get(left[v], left[v])
        right[v] = lifted.get(right[v], right[v])
    root = lifted.get(t.root, t.root)
    return Vtree(left, right, var, root, t.aux | frozenset(aux)), aux


def shell(t: Vtree, v: int) -> frozenset[int]:
    return t.variables - t.vars_of(v)


def prune(t: Vtree, a: Iterable[int]) -> Vtree:
    """Replace each maximal subtree whose variables all lie in ``a`` by a stub.

    The stub keeps the id of the subtree root it replaces.
    """
    a = frozenset(a)
    unknown = a - t.variables
    if unknown:
        raise InputError(f"unknown variables {sorted(unknown)}")
    if not a:
        return t
    left, right, var = {}, {}, {}
    stack = [t.root]
    while stack:
        v = stack.pop()
        if t.vars_of(v) <= a:
            var[v] = None
        elif v in t.left:
            left[v], right[v] = t.left[v], t.right[v]
            stack.append(t.left[v])
            stack.append(t.right[v])
        else:
            var[v] = t.var[v]
    return Vtree(left, right, var, t.root, t.aux - a)


def respected_node(t: Vtree, left_vars: frozenset[int], right_vars: frozenset[int],
                   oriented: bool) -> int | None:
    """Minimal vtree node respected by an AND gate with the given child vars.

    Returns ``None`` when no node is respected, or when both children are
    variable-free (every internal node is respected, none minimal).
    """
    if left_vars and right_vars:
        z = t.lca(left_vars | right_vars)
        if z not in t.left:
            return None
        zl, zr = t.vars_of(t.left[z]), t.vars_of(t.right[z])
        if left_vars <= zl and right_vars <= zr:
            return z
        if not oriented and left_vars <= zr and right_vars <= zl:
            return z
        return None
    side = left_vars or right_vars
    if not side:
        return None
    want_right = bool(right_vars)
    y = t.lca(side)
    while True:
        p = t.parent(y)
        if p is None:
            return None
        if not oriented or (t.right[p] == y) == want_right:
            return p
        y = p


def decomposition_nodes(c: Circuit, t: Vtree, oriented: bool = False) -> dict[int, int]:
    """Map every non-constant node of ``c`` to its decomposition node in ``t``.

    Literals map to their leaf, AND gates to the minimal respected node, and
    OR gates to the lowest common ancestor of their children's entries, which
    in a smooth circuit is the common entry of all children. Raises
    ``PropertyViolation`` naming the first AND gate that respects no node.
    """
    vs = c._all_vars()
    table: dict[int, int] = {}
    for n, g in enumerate(c.gates):
        if g.kind == LIT:
            if g.var not in t.variables:
                raise PropertyViolation(
                    f"node {n}: variable {g.var} is not in the vtree",
                    {"gate": n, "variable": g.var})
            table[n] = t.leaf_of(g.var)
        elif g.kind == AND:
            a, b = g.children
            z = respected_node(t, vs[a], vs[b], oriented)
            if z is None:
                if not vs[a] and not vs[b] and t.left:
                    continue
                raise PropertyViolation(
                    f"AND node {n} respects no vtree node", {"gate": n})
            table[n] = z
        elif g.kind == OR:
            entry = None
            for ch in g.children:
                e = table.get(ch)
                if e is not None:
                    entry = e if entry is None else t.lca_nodes(entry, e)
            if entry is not None:
                table[n] = entry
    return table
