"""Brute-force semantic ground truth.

Everything here enumerates assignments. Evaluation is bit-parallel: each
node's value over all 2**n assignments is one Python integer, bit ``i``
holding the value under assignment ``i``. Assignment ``i`` gives the k-th
variable of the order the value of bit ``n-1-k`` of ``i``, so the first
variable is the most significant one and a table printed from bit 0 upward
reads like a textbook truth table.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .circuit import AND, FALSE, LIT, OR, TRUE, Circuit, CircuitBuilder
from .errors import CapExceeded, InputError

DEFAULT_CAP = 22


def var_mask(position: int, n: int) -> int:
    """Bitset of assignments (out of 2**n) where variable ``position`` is 1."""
    block = 1 << (n - 1 - position)
    chunk = ((1 << block) - 1) << block
    width = 2 * block
    reps = 1 << position
    return chunk * (((1 << (width * reps)) - 1) // ((1 << width) - 1))


def exhaustive_masks(order: Sequence[int]) -> tuple[dict[int, int], int]:
    n = len(order)
    return {x: var_mask(k, n) for k, x in enumerate(order)}, (1 << (1 << n)) - 1


def random_masks(variables: Iterable[int], samples: int,
                 rng: random.Random) -> tuple[dict[int, int], int]:
    return {x: rng.getrandbits(samples) for x in sorted(variables)}, (1 << samples) - 1


def bit_tables(c: Circuit, masks: Mapping[int, int], full: int,
               node: int | None = None) -> dict[int, int]:
    """Propagate variable bitsets through the subcircuit at ``node``."""
    out: dict[int, int] = {}
    for n in c.reachable(node):
        g = c.gates[n]
        if g.kind == LIT:
            try:
                m = masks[g.var]
            except KeyError:
                raise InputError(f"no value for variable {g.var}") from None
            out[n] = m if g.lit > 0 else full ^ m
        elif g.kind == TRUE:
            out[n] = full
        elif g.kind == FALSE:
            out[n] = 0
        elif g.kind == AND:
            out[n] = out[g.children[0]] & out[g.children[1]]
        else:
            acc = 0
            for ch in g.children:
                acc |= out[ch]
            out[n] = acc
    return out


def _check_cap(n: int, cap: int):
    if n > cap:
        raise CapExceeded(n, cap)


def index_to_assignment(order: Sequence[int], index: int) -> dict[int, int]:
    n = len(order)
    return {x: (index >> (n - 1 - k)) & 1 for k, x in enumerate(order)}


def assignment_to_index(order: Sequence[int], assignment: Mapping[int, int]) -> int:
    index = 0
    for x in order:
        index = (index << 1) | int(bool(assignment[x]))
    return index


@dataclass(frozen=True)
class TruthTable:
    variables: tuple[int, ...]
    bits: int

    @property
    def n(self) -> int:
        return len(self.variables)

    def __call__(self, assignment: Mapping[int, int]) -> int:
        return (self.bits >> assignment_to_index(self.variables, assignment)) & 1

    def count(self) -> int:
        return self.bits.bit_count()

    def __str__(self):
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(1 << self.n))

    def to_array(self) -> np.ndarray:
        size = 1 << self.n
        raw = self.bits.to_bytes((size + 7) // 8, "little")
        return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:size]

    @classmethod
    def from_array(cls, variables: Sequence[int], values) -> "TruthTable":
        arr = np.asarray(values, dtype=np.uint8).ravel()
        if arr.size != 1 << len(variables):
            raise InputError("table length does not match the variable count")
        packed = np.packbits(arr, bitorder="little").tobytes()
        return cls(tuple(variables), int.from_bytes(packed, "little"))

    @classmethod
    def from_function(cls, variables: Sequence[int], fn) -> "TruthTable":
        """Tabulate ``fn(assignment_dict)`` one assignment at a time."""
        bits = 0
        for i in range(1 << len(variables)):
            if fn(index_to_assignment(variables, i)):
                bits |= 1 << i
        return cls(tuple(variables), bits)


def truth_table(c: Circuit, over: Iterable[int] | None = None,
                cap: int = DEFAULT_CAP, node: int | None = None) -> TruthTable:
    order = tuple(sorted(c.universe if over is None else over))
    missing = c.vars_of(c.root if node is None else node) - set(order)
    if missing:
        raise InputError(f"variables {sorted(missing)} are not in the table order")
    _check_cap(len(order), cap)
    masks, full = exhaustive_masks(order)
    node = c.root if node is None else node
    return TruthTable(order, bit_tables(c, masks, full, node)[node])


def model_count(c: Circuit, over: Iterable[int] | None = None,
                cap: int = DEFAULT_CAP) -> int:
    return truth_table(c, over, cap).count()


def _aux_settings(aux: Sequence[int]) -> list[dict[int, int]]:
    if len(aux) <= 4:
        return [dict(zip(aux, bits)) for bits in itertools.product((0, 1), repeat=len(aux))]
    return [{h: 0 for h in aux}, {h: 1 for h in aux}]


def equivalent(c1: Circuit, c2: Circuit, modulo_aux: Iterable[int] = (),
               cap: int = DEFAULT_CAP) -> tuple[bool, dict[int, int] | None]:
    """Exhaustive equivalence over all non-auxiliary variables.

    Auxiliary variables are enumerated completely when there are at most
    four of them and otherwise fixed to all-zeros and to all-ones.
    Returns ``(True, None)`` or ``(False, counterexample)``.
    """
    aux = sorted(frozenset(modulo_aux))
    order = sorted((c1.universe | c2.universe) - set(aux))
    _check_cap(len(order), cap)
    masks, full = exhaustive_masks(order)
    for setting in _aux_settings(aux):
        m = dict(masks)
        m.update({h: (full if bit else 0) for h, bit in setting.items()})
        t1 = bit_tables(c1, m, full)[c1.root]
        t2 = bit_tables(c2, m, full)[c2.root]
        diff = t1 ^ t2
        if diff:
            index = (diff & -diff).bit_length() - 1
            witness = index_to_assignment(order, index)
            witness.update(setting)
            return False, witness
    return True, None


def sampled_equivalent(c1: Circuit, c2: Circuit, samples: int, seed: int,
                       modulo_aux: Iterable[int] = ()) -> tuple[bool, dict[int, int] | None]:
    """Compare on ``samples`` uniformly random assignments (not a proof)."""
    rng = random.Random(seed)
    aux = sorted(frozenset(modulo_aux))
    order = sorted((c1.universe | c2.universe) - set(aux))
    masks, full = random_masks(order, samples, rng)
    for setting in _aux_settings(aux):
        m = dict(masks)
        m.update({h: (full if bit else 0) for h, bit in setting.items()})
        diff = bit_tables(c1, m, full)[c1.root] ^ bit_tables(c2, m, full)[c2.root]
        if diff:
            j = (diff & -diff).bit_length() - 1
            witness = {x: (masks[x] >> j) & 1 for x in order}
            witness.update(setting)
            return False, witness
    return True, None


def count_subfunctions(f: TruthTable, fixed: Sequence[int]) -> int:
    """Number of distinct residual functions as ``fixed`` ranges over all values."""
    fixed = list(fixed)
    unknown = set(fixed) - set(f.variables)
    if unknown:
        raise InputError(f"variables {sorted(unknown)} are not in the table")
    if not fixed:
        return 1
    pos = {x: k for k, x in enumerate(f.variables)}
    free = [x for x in f.variables if x not in set(fixed)]
    axes = [pos[x] for x in fixed] + [pos[x] for x in free]
    arr = f.to_array().reshape((2,) * f.n).transpose(axes)
    rows = arr.reshape(1 << len(fixed), 1 << len(free))
    return int(np.unique(rows, axis=0).shape[0])


def minterm_complement(c: Circuit, t, cap: int = DEFAULT_CAP) -> Circuit:
    """Disjunction of the falsifying minterms of ``c``, each shaped like ``t``.

    The minterms are pairwise disjoint and each mentions every variable of
    ``t`` along the vtree's own splits, so the result is deterministic,
    smooth, and respects ``t`` with children in vtree orientation.
    """
    order = tuple(sorted(t.variables))
    if not c.vars_of() <= set(order):
        raise InputError("the vtree does not cover the circuit's variables")
    tt = truth_table(c, order, cap)
    b = CircuitBuilder()
    roots = []
    nodes = t.nodes()
    for i in range(1 << len(order)):
        if (tt.bits >> i) & 1:
            continue
        a = index_to_assignment(order, i)
        built: dict[int, int] = {}
        for v in nodes:
            if v in t.left:
                built[v] = b.conj(built[t.left[v]], built[t.right[v]])
            else:
                x = t.var[v]
                built[v] = b.literal(x if a[x] else -x)
        roots.append(built[t.root])
    root = b.disj(roots) if roots else b.false()
    return b.build(root, c.universe | t.variables, c.aux)
