"""Text formats for circuits and vtrees.

Circuit files::

    c aux 13 14            optional; marks auxiliary variables
    c universe 1 2 5       optional; only when the universe is not 1..V
    nnf <nodes> <edges> <V>
    L <signed literal>
    T | F
    A <k> <ids...>         k > 2 is binarized left-associatively on load
    O <k> <ids...>

Node ids are 0-based line numbers among node lines; children come first and
the last line is the root. ``A 0`` reads as TRUE and ``O 0`` as FALSE.

Vtree files::

    vtree <nodes>
    L <id> <var> [aux]
    S <id>                 stub leaf of a pruned vtree
    I <id> <left> <right>

Children are defined before their parent and the last line is the root.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

from .circuit import AND, FALSE, LIT, OR, TRUE, Circuit, CircuitBuilder
from .errors import ParseError
from .vtree import Vtree


def _ints(tokens, line, start_col):
    out = []
    for k, tok in enumerate(tokens):
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError(f"expected an integer, got {tok!r}", line, start_col + k) from None
    return out


def parse_circuit(text: str | bytes) -> Circuit:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    b = CircuitBuilder()
    header = None
    aux: list[int] = []
    universe: list[int] | None = None
    ids: list[int] = []
    edges = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        tokens = raw.split()
        if not tokens:
            continue
        kind = tokens[0]
        if kind == "c":
            if len(tokens) > 1 and tokens[1] == "aux":
                aux.extend(_ints(tokens[2:], lineno, 3))
            elif len(tokens) > 1 and tokens[1] == "universe":
                universe = _ints(tokens[2:], lineno, 3)
            continue
        if header is None:
            if kind != "nnf" or len(tokens) != 4:
                raise ParseError("expected header 'nnf <nodes> <edges> <vars>'", lineno, 1)
            header = _ints(tokens[1:], lineno, 2)
            if min(header) < 0:
                raise ParseError("header counts must be non-negative", lineno, 2)
            continue
        if kind == "L":
            if len(tokens) != 2:
                raise ParseError("literal lines have one argument", lineno, 2)
            lit = _ints(tokens[1:], lineno, 2)[0]
            if lit == 0:
                raise ParseError("literal 0 is not a variable", lineno, 2)
            ids.append(b.literal(lit))
        elif kind in ("T", "F"):
            if len(tokens) != 1:
                raise ParseError(f"'{kind}' takes no arguments", lineno, 2)
            ids.append(b.true() if kind == "T" else b.false())
        elif kind in ("A", "O"):
            if len(tokens) < 2:
                raise ParseError("missing child count", lineno, 2)
            nums = _ints(tokens[1:], lineno, 2)
            k, kids = nums[0], nums[1:]
            if k != len(kids):
                raise ParseError(f"declared {k} children but found {len(kids)}", lineno, 2)
            for col, ch in enumerate(kids, 3):
                if not 0 <= ch < len(ids):
                    raise ParseError(f"child {ch} is not a previously defined node", lineno, col)
            edges += k
            mapped = [ids[ch] for ch in kids]
            if kind == "A":
                ids.append(b.conj_chain(mapped))
            else:
                ids.append(b.disj(mapped) if mapped else b.false())
        else:
            raise ParseError(f"unknown line type {kind!r}", lineno, 1)
    if header is None:
        raise ParseError("missing 'nnf' header")
    if not ids:
        raise ParseError("circuit has no nodes")
    if header[0] != len(ids):
        raise ParseError(f"header announces {header[0]} nodes, found {len(ids)}")
    if header[1] != edges:
        raise ParseError(f"header announces {header[1]} edges, found {edges}")
    if universe is None:
        universe = list(range(1, header[2] + 1))
    try:
        return b.build(ids[-1], universe, aux)
    except Exception as e:  # a structural problem surfaced while freezing
        raise ParseError(str(e)) from None


def serialize_circuit(c: Circuit) -> str:
    """Deterministic text; only the part reachable from the root is written."""
    reach = c.reachable()
    index = {n: k for k, n in enumerate(reach)}
    lines = []
    edges = 0
    for n in reach:
        g = c.gates[n]
        if g.kind == LIT:
            lines.append(f"L {g.lit}")
        elif g.kind in (TRUE, FALSE):
            lines.append(g.kind)
        else:
            edges += len(g.children)
            kids = " ".join(str(index[ch]) for ch in g.children)
            lines.append(f"{g.kind} {len(g.children)} {kids}")
    top = max(c.universe, default=0)
    head = []
    if c.aux:
        head.append("c aux " + " ".join(map(str, sorted(c.aux))))
    if set(c.universe) != set(range(1, top + 1)):
        head.append("c universe " + " ".join(map(str, sorted(c.universe))))
    head.append(f"nnf {len(lines)} {edges} {top}")
    return "\n".join(head + lines) + "\n"


def parse_vtree(text: str | bytes) -> Vtree:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    left, right, var = {}, {}, {}
    aux = []
    header = None
    last = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        tokens = raw.split()
        if not tokens or tokens[0] == "c":
            continue
        kind = tokens[0]
        if header is None:
            if kind != "vtree" or len(tokens) != 2:
                raise ParseError("expected header 'vtree <nodes>'", lineno, 1)
            header = _ints(tokens[1:], lineno, 2)[0]
            continue
        if kind == "L":
            if len(tokens) not in (3, 4) or (len(tokens) == 4 and tokens[3] != "aux"):
                raise ParseError("expected 'L <id> <var> [aux]'", lineno, 1)
            node, x = _ints(tokens[1:3], lineno, 2)
            if x <= 0:
                raise ParseError("variables are positive integers", lineno, 3)
            if x in var.values():
                raise ParseError(f"variable {x} labels two leaves", lineno, 3)
            if len(tokens) == 4:
                aux.append(x)
        elif kind == "S":
            if len(tokens) != 2:
                raise ParseError("expected 'S <id>'", lineno, 1)
            node = _ints(tokens[1:], lineno, 2)[0]
            x = None
        elif kind == "I":
            if len(tokens) != 4:
                raise ParseError("expected 'I <id> <left> <right>'", lineno, 1)
            node, a, c = _ints(tokens[1:], lineno, 2)
            for col, ch in ((3, a), (4, c)):
                if ch not in var and ch not in left:
                    raise ParseError(f"child {ch} is not defined before use", lineno, col)
        else:
            raise ParseError(f"unknown line type {kind!r}", lineno, 1)
        if node < 0:
            raise ParseError("node ids are non-negative", lineno, 2)
        if node in var or node in left:
            raise ParseError(f"node id {node} is defined twice", lineno, 2)
        if kind == "I":
            left[node], right[node] = a, c
        else:
            var[node] = x
        last = node
    if header is None:
        raise ParseError("missing 'vtree' header")
    if last is None:
        raise ParseError("vtree has no nodes")
    if header != len(var) + len(left):
        raise ParseError(f"header announces {header} nodes, found {len(var) + len(left)}")
    try:
        return Vtree(left, right, var, last, aux)
    except Exception as e:
        raise ParseError(str(e)) from None


def serialize_vtree(t: Vtree) -> str:
    lines = [f"vtree {len(t)}"]
    for v in t.nodes():
        if v in t.left:
            lines.append(f"I {v} {t.left[v]} {t.right[v]}")
        elif t.var[v] is None:
            lines.append(f"S {v}")
        else:
            x = t.var[v]
            lines.append(f"L {v} {x}" + (" aux" if x in t.aux else ""))
    return "\n".join(lines) + "\n"


def atomic_write(path: str | os.PathLike, data: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_circuit(path) -> Circuit:
    return parse_circuit(Path(path).read_text(encoding="utf-8"))


def read_vtree(path) -> Vtree:
    return parse_vtree(Path(path).read_text(encoding="utf-8"))
