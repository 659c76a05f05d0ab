"""Seeded random structured d-DNNFs and the instance corpus used by the
acceptance suite.

A random circuit is compiled from a random truth table along a random vtree.
At every internal vtree node either the left residuals or the right
residuals are grouped, so the resulting OR gates are deterministic through
disjoint primes (SDD-like) or through disjoint subs (d-DNNF but not
strongly deterministic). Groups are sometimes split to add redundancy.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, CircuitBuilder
from .hwb import build_hwb
from .oracle import TruthTable, minterm_complement
from .vtree import Vtree


def random_function(variables, rng: random.Random, max_zeros: int | None = None) -> TruthTable:
    """Random table; with ``max_zeros`` at most that many falsifying rows."""
    variables = tuple(sorted(variables))
    size = 1 << len(variables)
    if max_zeros is None or max_zeros >= size:
        return TruthTable(variables, rng.getrandbits(size))
    zeros = rng.sample(range(size), rng.randint(1, max_zeros))
    bits = (1 << size) - 1
    for z in zeros:
        bits &= ~(1 << z)
    return TruthTable(variables, bits)


class _Compiler:
    def __init__(self, t: Vtree, rng: random.Random, split: float):
        self.t = t
        self.rng = rng
        self.split = split
        self.b = CircuitBuilder()
        self.memo: dict[tuple[int, int], int] = {}

    def compile(self, f: TruthTable, v: int) -> int:
        key = (v, f.bits)
        if key in self.memo:
            return self.memo[key]
        b, t = self.b, self.t
        full = (1 << (1 << f.n)) - 1
        if f.bits == 0:
            out = b.false()
        elif f.bits == full:
            out = b.true()
        elif v not in t.left:
            x = t.var[v]
            out = b.literal(x if f.bits == 0b10 else -x)
        else:
            out = self._split(f, v)
        self.memo[key] = out
        return out

    def _split(self, f: TruthTable, v: int) -> int:
        t, b, rng = self.t, self.b, self.rng
        lv, rv = t.left[v], t.right[v]
        lvars, rvars = tuple(sorted(t.vars_of(lv))), tuple(sorted(t.vars_of(rv)))
        pos = {x: k for k, x in enumerate(f.variables)}
        arr = f.to_array().reshape((2,) * f.n).transpose([pos[x] for x in lvars + rvars])
        grid = arr.reshape(1 << len(lvars), 1 << len(rvars))
        by_prime = rng.random() < 0.5
        rows = grid if by_prime else grid.T
        residuals, inverse = np.unique(rows, axis=0, return_inverse=True)
        inverse = np.asarray(inverse).ravel()
        groups = [np.flatnonzero(inverse == g) for g in range(len(residuals))]
        pairs = []
        for g, members in enumerate(groups):
            if not residuals[g].any():
                continue
            parts = [members]
            if len(members) > 1 and rng.random() < self.split:
                cut = rng.randint(1, len(members) - 1)
                shuffled = list(members)
                rng.shuffle(shuffled)
                parts = [np.array(sorted(shuffled[:cut])), np.array(sorted(shuffled[cut:]))]
            for part in parts:
                indicator = np.zeros(rows.shape[0], dtype=np.uint8)
                indicator[part] = 1
                pairs.append((indicator, residuals[g]))
        if not pairs:
            return b.false()
        near, far = (lvars, rvars) if by_prime else (rvars, lvars)
        near_v, far_v = (lv, rv) if by_prime else (rv, lv)
        elements = []
        for indicator, residual in pairs:
            a = self.compile(TruthTable.from_array(near, indicator), near_v)
            c = self.compile(TruthTable.from_array(far, residual), far_v)
            elements.append(b.conj(a, c) if by_prime else b.conj(c, a))
        return elements[0] if len(elements) == 1 else b.disj(elements)


def compile_ddnnf(f: TruthTable, t: Vtree, rng: random.Random, split: float = 0.3) -> Circuit:
    """A structured d-DNNF for ``f`` respecting ``t`` (oriented)."""
    comp = _Compiler(t, rng, split)
    root = comp.compile(f, t.root)
    return comp.b.build(root, t.variables)


@dataclass(frozen=True)
class Instance:
    name: str
    d: Circuit
    dbar: Circuit
    t: Vtree


def random_instance(n: int, rng: random.Random, max_zeros: int = 48) -> Instance:
    variables = range(1, n + 1)
    t = Vtree.random(variables, rng)
    f = random_function(variables, rng, max_zeros if n > 5 else None)
    d = compile_ddnnf(f, t, rng)
    return Instance(f"rand-n{n}", d, minterm_complement(d, t), t)


def acceptance_corpus(seed: int = 2024, count: int = 200, n_min: int = 4,
                      n_max: int = 12, include_hwb: bool = True) -> list[Instance]:
    """``count`` random instances cycling n over [n_min, n_max], then HWB10."""
    rng = random.Random(seed)
    out = []
    span = n_max - n_min + 1
    for k in range(count):
        inst = random_instance(n_min + k % span, rng)
        out.append(Instance(f"{inst.name}-{k:03d}", inst.d, inst.dbar, inst.t))
    if include_hwb:
        h = build_hwb(10)
        out.append(Instance("hwb10", h.d, h.dbar, h.vtree))
    return out
