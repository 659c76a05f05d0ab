"""Hidden weighted bit: structured d-DNNFs for it and its complement, and
the subfunction-count experiment on the split vtree."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .circuit import Circuit, CircuitBuilder
from .errors import CapExceeded, InputError
from .oracle import TruthTable, count_subfunctions
from .vtree import Vtree


def hwb_value(x: Sequence[int] | Mapping[int, int]) -> int:
    """``x[weight]`` (1-based), 0 for the all-zero input."""
    bits = [x[i] for i in sorted(x)] if isinstance(x, Mapping) else list(x)
    w = sum(1 for b in bits if b)
    return int(bool(bits[w - 1])) if w else 0


def hwb_table(n: int) -> TruthTable:
    """Truth table over x1..xn straight from the definition (vectorized)."""
    if n > 24:
        raise CapExceeded(n, 24)
    idx = np.arange(1 << n, dtype=np.int64)
    weight = np.zeros_like(idx)
    for k in range(n):
        weight += (idx >> k) & 1
    shift = np.maximum(n - weight, 0)
    values = np.where(weight > 0, (idx >> shift) & 1, 0)
    return TruthTable.from_array(tuple(range(1, n + 1)), values)


def split_sizes(n: int) -> tuple[int, int]:
    if n < 10 or n % 10:
        raise InputError(f"n must be a positive multiple of 10, got {n}")
    return 6 * n // 10, 4 * n // 10


def hwb_vtree(n: int) -> Vtree:
    """Root with a right-linear left part on x1..x(6n/10) and a right-linear
    right part on the rest. Not normalized at the root."""
    nl, _ = split_sizes(n)

    def chain(vs):
        nested = vs[-1]
        for x in reversed(vs[:-1]):
            nested = (x, nested)
        return nested

    return Vtree.from_nested((chain(list(range(1, nl + 1))), chain(list(range(nl + 1, n + 1)))))


class _Lattice:
    """Counting DAG over a right-linear block: node (pos, remaining ones),
    optionally forcing one variable of the block to a value."""

    def __init__(self, b: CircuitBuilder, block: Sequence[int]):
        self.b = b
        self.block = list(block)
        self.memo: dict[tuple, int | None] = {}

    def count(self, c: int, forced: tuple[int, int] | None = None) -> int | None:
        if forced is not None and forced[0] not in self.block:
            forced = None
        return self._node(0, c, forced)

    def _node(self, pos: int, c: int, forced) -> int | None:
        if forced is not None and self.block.index(forced[0]) < pos:
            forced = None
        key = (pos, c, forced)
        if key in self.memo:
            return self.memo[key]
        remaining = len(self.block) - pos
        out = None
        if 0 <= c <= remaining:
            x = self.block[pos]
            options = (1, 0)
            if forced is not None and forced[0] == x:
                options = (forced[1],)
            kids = []
            for bit in options:
                lit = self.b.literal(x if bit else -x)
                if pos + 1 == len(self.block):
                    if c - bit == 0:
                        kids.append(lit)
                    continue
                rest = self._node(pos + 1, c - bit, forced)
                if rest is not None:
                    kids.append(self.b.conj(lit, rest))
            if len(kids) == 1:
                out = kids[0]
            elif kids:
                out = self.b.disj(kids)
        self.memo[key] = out
        return out


@dataclass(frozen=True)
class HwbInstance:
    n: int
    vtree: Vtree
    d: Circuit
    dbar: Circuit
    x_left: tuple[int, ...]
    x_right: tuple[int, ...]
    terms: tuple[tuple[int, int, int], ...]

    def h_terms(self) -> list[tuple[int, int, int]]:
        """(i, j, node id in d) for every h-term, in construction order."""
        return list(self.terms)


def index_pairs(n: int) -> list[tuple[int, int]]:
    """(i, j) with max(0, i - 4n/10) <= j <= min(i, 6n/10)."""
    nl, nr = split_sizes(n)
    return [(i, j) for i in range(1, n + 1) for j in range(max(0, i - nr), min(i, nl) + 1)]


def build_hwb(n: int) -> HwbInstance:
    nl, _ = split_sizes(n)
    t = hwb_vtree(n)
    xl = tuple(range(1, nl + 1))
    xr = tuple(range(nl + 1, n + 1))

    def assemble(pairs_forced):
        b = CircuitBuilder()
        left, right = _Lattice(b, xl), _Lattice(b, xr)
        terms, kids = [], []
        for i, j, forced in pairs_forced:
            f = left.count(j, forced)
            g = right.count(i - j, forced)
            if f is None or g is None:
                continue
            node = b.conj(f, g)
            terms.append((i, j, node))
            kids.append(node)
        root = b.disj(kids)
        c, renumber = b.build_with_map(root, range(1, n + 1))
        return c, tuple((i, j, renumber[node]) for i, j, node in terms)

    d, terms = assemble([(i, j, (i, 1)) for i, j in index_pairs(n)])
    neg = [(k, j, (k, 0)) for k, j in index_pairs(n)]
    neg.append((0, 0, None))
    dbar, _ = assemble(neg)
    return HwbInstance(n, t, d, dbar, xl, xr, terms)


def subfunction_bound(n: int) -> int:
    return 2 ** (n // 5 - 1)


def separation_experiment(n_values: Iterable[int], cap: int = 20,
                          fixed_set: Sequence[int] | None = None) -> list[dict]:
    """Circuit sizes and subfunction counts per n.

    Rows above ``cap`` variables keep their sizes but leave the count empty
    and say why.
    """
    rows = []
    for n in n_values:
        inst = build_hwb(n)
        fixed = list(fixed_set) if fixed_set is not None else list(inst.x_left)
        row = {"n": n, "size_d": inst.d.size(), "size_dbar": inst.dbar.size(),
               "fixed": len(fixed), "subfunctions": None, "bound": subfunction_bound(n),
               "status": "ok"}
        if n > cap:
            row["status"] = f"skipped: {n} variables exceed the cap of {cap}"
        else:
            row["subfunctions"] = count_subfunctions(hwb_table(n), fixed)
        rows.append(row)
    return rows


CSV_FIELDS = ("n", "size_d", "size_dbar", "fixed", "subfunctions", "bound", "status")


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r[k] is None else r[k]) for k in CSV_FIELDS})
    return buf.getvalue()


def size_slope(rows: Sequence[dict], column: str = "size_d") -> float:
    """Least-squares slope of log(size) against log(n)."""
    if len(rows) < 2:
        raise InputError("need at least two rows to fit a slope")
    xs = [math.log(r["n"]) for r in rows]
    ys = [math.log(r[column]) for r in rows]
    return float(np.polyfit(xs, ys, 1)[0])
