"""Immutable NNF circuits stored as hash-consed, topologically numbered DAGs.

Variables are positive integers and literals are signed integers in the
DIMACS convention. A circuit keeps its gates in a tuple where every child id
is smaller than its parent id and the root is the last gate, so iterating
``range(len(circuit))`` is a bottom-up traversal.
"""

from __future__ import annotations

from typing import Iterable, Mapping, NamedTuple

from .errors import InputError, PropertyViolation, StructuralError

LIT = "L"
TRUE = "T"
FALSE = "F"
AND = "A"
OR = "O"


class Gate(NamedTuple):
    kind: str
    lit: int = 0
    children: tuple[int, ...] = ()

    @property
    def var(self) -> int:
        return abs(self.lit)

    @property
    def is_const(self) -> bool:
        return self.kind in (TRUE, FALSE)


class CircuitBuilder:
    """Accumulates gates with structural hashing.

    Identical gates are created once, so two calls building the same formula
    return the same id. Nothing is simplified here; ``And(x, TRUE)`` stays as
    written. Transforms own all rewriting.
    """

    def __init__(self):
        self._gates: list[Gate] = []
        self._ids: dict[Gate, int] = {}

    def __len__(self):
        return len(self._gates)

    def gate(self, node: int) -> Gate:
        return self._gates[node]

    def _add(self, gate: Gate) -> int:
        node = self._ids.get(gate)
        if node is None:
            node = len(self._gates)
            self._gates.append(gate)
            self._ids[gate] = node
        return node

    def _check(self, node):
        if not 0 <= node < len(self._gates):
            raise StructuralError(f"unknown node {node}")

    def literal(self, lit: int) -> int:
        if lit == 0:
            raise InputError("literal 0 is not a variable")
        return self._add(Gate(LIT, lit))

    def true(self) -> int:
        return self._add(Gate(TRUE))

    def false(self) -> int:
        return self._add(Gate(FALSE))

    def const(self, value: bool) -> int:
        return self.true() if value else self.false()

    def conj(self, left: int, right: int) -> int:
        self._check(left)
        self._check(right)
        return self._add(Gate(AND, 0, (left, right)))

    def conj_chain(self, children: Iterable[int]) -> int:
        """Left-associated binary conjunction; an empty chain is TRUE."""
        children = list(children)
        if not children:
            return self.true()
        node = children[0]
        self._check(node)
        for child in children[1:]:
            node = self.conj(node, child)
        return node

    def disj(self, children: Iterable[int]) -> int:
        children = tuple(children)
        if not children:
            raise StructuralError("an OR gate needs at least one child")
        for child in children:
            self._check(child)
        return self._add(Gate(OR, 0, children))

    def copy_from(self, circuit: "Circuit", node: int | None = None,
                  memo: dict[int, int] | None = None) -> int:
        """Import the subcircuit of ``circuit`` at ``node``; returns its new id."""
        if node is None:
            node = circuit.root
        if memo is None:
            memo = {}
        for old in circuit.reachable(node):
            if old in memo:
                continue
            g = circuit.gates[old]
            if g.kind == LIT:
                memo[old] = self.literal(g.lit)
            elif g.kind == TRUE:
                memo[old] = self.true()
            elif g.kind == FALSE:
                memo[old] = self.false()
            elif g.kind == AND:
                memo[old] = self.conj(memo[g.children[0]], memo[g.children[1]])
            else:
                memo[old] = self.disj(memo[c] for c in g.children)
        return memo[node]

    def build(self, root: int, universe: Iterable[int] = (),
              aux: Iterable[int] = ()) -> "Circuit":
        """Freeze the part of the store reachable from ``root``.

        Nodes are renumbered by a depth-first post-order walk that visits
        children in their stored order, which makes ids deterministic.
        """
        return self.build_with_map(root, universe, aux)[0]

    def build_with_map(self, root: int, universe: Iterable[int] = (),
                       aux: Iterable[int] = ()) -> tuple["Circuit", dict[int, int]]:
        """Like ``build`` but also returns the store-id to circuit-id map."""
        self._check(root)
        order: list[int] = []
        seen: set[int] = set()
        stack = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if node in seen:
                continue
            seen.add(node)
            stack.append((node, True))
            for child in reversed(self._gates[node].children):
                if child not in seen:
                    stack.append((child, False))
        renumber = {old: new for new, old in enumerate(order)}
        gates = []
        for old in order:
            g = self._gates[old]
            if g.children:
                g = Gate(g.kind, 0, tuple(renumber[c] for c in g.children))
            gates.append(g)
        return Circuit(gates, len(gates) - 1, universe, aux), renumber


class Circuit:
    """Rooted NNF DAG over a variable universe.

    ``universe`` always contains every variable mentioned by a literal and
    may contain more (a function need not depend on all its inputs).
    ``aux`` marks the auxiliary variables inside the universe.
    """

    __slots__ = ("gates", "root", "universe", "aux", "_vars", "_decomposable")

    def __init__(self, gates: Iterable[Gate], root: int,
                 universe: Iterable[int] = (), aux: Iterable[int] = ()):
        self.gates: tuple[Gate, ...] = tuple(gates)
        if not 0 <= root < len(self.gates):
            raise StructuralError(f"root {root} is not a node")
        self.root = root
        mentioned = set()
        for i, g in enumerate(self.gates):
            if g.kind == LIT:
                if g.lit == 0:
                    raise StructuralError(f"node {i} has literal 0")
                mentioned.add(g.var)
            elif g.kind == AND:
                if len(g.children) != 2:
                    raise StructuralError(f"AND node {i} must have two children")
            elif g.kind == OR:
                if not g.children:
                    raise StructuralError(f"OR node {i} has no children")
            elif g.kind not in (TRUE, FALSE):
                raise StructuralError(f"node {i} has unknown kind {g.kind!r}")
            for c in g.children:
                if not 0 <= c < i:
                    raise StructuralError(
                        f"node {i} refers to {c}; children must precede parents")
        self.aux = frozenset(aux)
        self.universe = frozenset(universe) | frozenset(mentioned) | self.aux
        self._vars: list[frozenset[int]] | None = None
        self._decomposable: bool | None = None

    def __len__(self):
        return len(self.gates)

    def __repr__(self):
        return (f"Circuit(size={len(self.gates)}, root={self.root}, "
                f"vars={len(self.universe)})")

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return (self.gates == other.gates and self.root == other.root
                and self.universe == other.universe and self.aux == other.aux)

    def __hash__(self):
        return hash((self.gates, self.root))

    @property
    def original_vars(self) -> frozenset[int]:
        return self.universe - self.aux

    def _node(self, node: int) -> int:
        if not isinstance(node, int) or not 0 <= node < len(self.gates):
            raise StructuralError(f"unknown node {node!r}")
        return node

    def gate(self, node: int) -> Gate:
        return self.gates[self._node(node)]

    def children(self, node: int) -> tuple[int, ...]:
        return self.gates[self._node(node)].children

    def size(self) -> int:
        """Number of gates reachable from the root, leaves included."""
        return len(self.reachable())

    def edge_count(self) -> int:
        return sum(len(self.gates[n].children) for n in self.reachable())

    def reachable(self, node: int | None = None) -> list[int]:
        """Ids reachable from ``node`` (default: root) in increasing order."""
        node = self.root if node is None else self._node(node)
        seen = {node}
        stack = [node]
        while stack:
            for c in self.gates[stack.pop()].children:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return sorted(seen)

    def parents(self) -> list[list[int]]:
        """Parent lists indexed by node, in increasing parent id order."""
        result: list[list[int]] = [[] for _ in self.gates]
        for i, g in enumerate(self.gates):
            for c in g.children:
                if not result[c] or result[c][-1] != i:
                    result[c].append(i)
        return result

    def _all_vars(self) -> list[frozenset[int]]:
        if self._vars is None:
            out: list[frozenset[int]] = []
            empty: frozenset[int] = frozenset()
            for g in self.gates:
                if g.kind == LIT:
                    out.append(frozenset((g.var,)))
                elif g.kind in (TRUE, FALSE):
                    out.append(empty)
                elif len(g.children) == 1:
                    out.append(out[g.children[0]])
                else:
                    acc: set[int] = set()
                    for c in g.children:
                        acc |= out[c]
                    out.append(frozenset(acc))
            self._vars = out
        return self._vars

    def vars_of(self, node: int | None = None) -> frozenset[int]:
        """Variables whose literals occur below ``node``."""
        node = self.root if node is None else self._node(node)
        return self._all_vars()[node]

    def evaluate(self, assignment: Mapping[int, int | bool],
                 node: int | None = None) -> int:
        node = self.root if node is None else self._node(node)
        values: dict[int, int] = {}
        for n in self.reachable(node):
            g = self.gates[n]
            if g.kind == LIT:
                try:
                    bit = assignment[g.var]
                except KeyError:
                    raise InputError(f"assignment misses variable {g.var}") from None
                values[n] = int(bool(bit)) if g.lit > 0 else 1 - int(bool(bit))
            elif g.kind == TRUE:
                values[n] = 1
            elif g.kind == FALSE:
                values[n] = 0
            elif g.kind == AND:
                values[n] = values[g.children[0]] & values[g.children[1]]
            else:
                values[n] = int(any(values[c] for c in g.children))
        return values[node]

    def decomposition_witness(self) -> tuple[int, int] | None:
        """First AND gate whose children share a variable, with that variable."""
        vs = self._all_vars()
        for i, g in enumerate(self.gates):
            if g.kind == AND:
                shared = vs[g.children[0]] & vs[g.children[1]]
                if shared:
                    return i, min(shared)
        return None

    def is_decomposable(self) -> bool:
        if self._decomposable is None:
            self._decomposable = self.decomposition_witness() is None
        return self._decomposable

    def satisfiable_nodes(self) -> list[bool]:
        """DNNF satisfiability of every node (valid only when decomposable)."""
        sat: list[bool] = []
        for g in self.gates:
            if g.kind in (LIT, TRUE):
                sat.append(True)
            elif g.kind == FALSE:
                sat.append(False)
            elif g.kind == AND:
                sat.append(sat[g.children[0]] and sat[g.children[1]])
            else:
                sat.append(any(sat[c] for c in g.children))
        return sat

    def is_satisfiable_dnnf(self, node: int | None = None) -> bool:
        node = self.root if node is None else self._node(node)
        if not self.is_decomposable():
            raise PropertyViolation("satisfiability by propagation needs a decomposable circuit")
        return self.satisfiable_nodes()[node]

    def subcircuit(self, node: int) -> "Circuit":
        """The circuit rooted at ``node`` over the same universe."""
        b = CircuitBuilder()
        root = b.copy_from(self, self._node(node))
        return b.build(root, self.universe, self.aux)

    def with_universe(self, universe: Iterable[int], aux: Iterable[int] = ()) -> "Circuit":
        return Circuit(self.gates, self.root, universe, aux)
