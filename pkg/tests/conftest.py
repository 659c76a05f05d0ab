import random

import pytest
from hypothesis import strategies as st

from ddnnf2sdd.circuit import CircuitBuilder
from ddnnf2sdd.corpus import compile_ddnnf, random_function, random_instance
from ddnnf2sdd.hwb import build_hwb
from ddnnf2sdd.vtree import Vtree

TWELVE = ((1, (2, (3, 4))), (5, ((6, (7, 8)), (9, (10, (11, 12))))))


@pytest.fixture
def twelve():
    return Vtree.from_nested(TWELVE)


def twelve_node_v(t):
    """The node of the twelve-variable tree over variables 6..12."""
    return next(n for n in t.nodes() if t.vars_of(n) == frozenset(range(6, 13)))


@pytest.fixture(scope="session")
def hwb10():
    return build_hwb(10)


def lit_circuit(*shape):
    """Tiny helper: build from a nested tuple shape.

    ints are literals, "T"/"F" constants, ("and", a, b) and ("or", a, ...).
    """
    b = CircuitBuilder()

    def go(s):
        if s == "T":
            return b.true()
        if s == "F":
            return b.false()
        if isinstance(s, int):
            return b.literal(s)
        op, *kids = s
        ids = [go(k) for k in kids]
        return b.conj(*ids) if op == "and" else b.disj(ids)

    return b.build(go(shape[0]), shape[1] if len(shape) > 1 else ())


seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_ddnnf(seed, n_min=2, n_max=7):
    rng = random.Random(seed)
    n = rng.randint(n_min, n_max)
    t = Vtree.random(range(1, n + 1), rng)
    f = random_function(range(1, n + 1), rng)
    return compile_ddnnf(f, t, rng), t, f


def random_pair(seed, n_min=3, n_max=7):
    rng = random.Random(seed)
    return random_instance(rng.randint(n_min, n_max), rng)
