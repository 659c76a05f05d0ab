"""Command line front end.

Exit codes: 0 success, 1 property violation or inequivalence, 2 usage,
parse or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import CapExceeded, CircuitError, InputError, ParseError, PropertyViolation
from .formats import (atomic_write, read_circuit, read_vtree, serialize_circuit,
                      serialize_vtree)
from .hwb import build_hwb, rows_to_csv, separation_experiment, size_slope
from .oracle import (DEFAULT_CAP, count_subfunctions, equivalent, model_count,
                     sampled_equivalent, truth_table)
from .simulation import simulate
from .transforms import make_simple, restrict, smooth
from .validators import check

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

ALL_PROPS = ("decomposable", "deterministic", "structured", "smooth", "simple", "sdd")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _assignment(text: str) -> dict[int, int]:
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            var, bit = item.split("=")
            var, bit = int(var), int(bit)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad assignment item {item!r}, want var=bit")
        if bit not in (0, 1) or var <= 0:
            raise argparse.ArgumentTypeError(f"bad assignment item {item!r}")
        out[var] = bit
    return out


def _emit(args, payload: dict, text: str):
    payload = {"command": args.command, **payload}
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _cap(args, default: int) -> int:
    return default if args.cap is None else args.cap


def _need(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise InputError(f"--{name.replace('_', '-')} is required for {args.command}")


def cmd_validate(args) -> int:
    _need(args, "circuit")
    c = read_circuit(args.circuit)
    t = read_vtree(args.vtree) if args.vtree else None
    default = ALL_PROPS if t else ("decomposable", "deterministic", "smooth", "simple")
    props = args.props or list(default)
    cap = _cap(args, 20)
    reports = [check(c, p, t, cap, args.seed) for p in props]
    ok = all(r.holds for r in reports)
    lines = []
    for p, r in zip(props, reports):
        line = f"{p}: {'holds' if r.holds else 'VIOLATED'} ({r.method})"
        if r.witness is not None:
            line += f" witness={json.dumps(r.to_json()['witness'], sort_keys=True)}"
        lines.append(line)
    _emit(args, {"ok": ok, "seed": args.seed, "reports": [r.to_json() for r in reports]},
          "\n".join(lines))
    return EXIT_OK if ok else EXIT_VIOLATION


def _write_out(args, c, t=None):
    _need(args, "out")
    atomic_write(args.out, serialize_circuit(c))
    written = [str(args.out)]
    if t is not None:
        vpath = Path(args.out).with_suffix(".vtree")
        atomic_write(vpath, serialize_vtree(t))
        written.append(str(vpath))
    return written


def cmd_simplify(args) -> int:
    _need(args, "circuit")
    c = make_simple(read_circuit(args.circuit))
    written = _write_out(args, c)
    _emit(args, {"ok": True, "size": c.size(), "written": written}, f"size {c.size()}")
    return EXIT_OK


def cmd_smooth(args) -> int:
    _need(args, "circuit", "vtree")
    c = smooth(read_circuit(args.circuit), read_vtree(args.vtree))
    written = _write_out(args, c)
    _emit(args, {"ok": True, "size": c.size(), "written": written}, f"size {c.size()}")
    return EXIT_OK


def cmd_restrict(args) -> int:
    _need(args, "circuit", "vtree")
    rc = restrict(read_circuit(args.circuit), read_vtree(args.vtree), args.assign or {})
    written = _write_out(args, rc.circuit, rc.vtree)
    _emit(args, {"ok": True, "size": rc.circuit.size(), "written": written},
          f"size {rc.circuit.size()}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    _need(args, "circuit", "circuit2", "vtree", "out")
    d, dbar = read_circuit(args.circuit), read_circuit(args.circuit2)
    t = read_vtree(args.vtree)
    s, tp, trace = simulate(d, dbar, t, cap=_cap(args, 16), seed=args.seed)
    written = _write_out(args, s, tp)
    trace_path = Path(args.trace) if args.trace else Path(args.out).parent / "trace.json"
    body = trace.to_json()
    body["seed"] = args.seed
    atomic_write(trace_path, json.dumps(body, indent=1, sort_keys=True) + "\n")
    written.append(str(trace_path))
    for w in trace.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _emit(args, {"ok": True, "size": s.size(), "aux": trace.aux, "written": written,
                 "complement_check": trace.complement_method, "seed": args.seed},
          f"size {s.size()} with {len(trace.aux)} auxiliary variables")
    return EXIT_OK


def cmd_count(args) -> int:
    _need(args, "circuit")
    c = read_circuit(args.circuit)
    over = c.original_vars if args.modulo_aux else c.universe
    n = model_count(c, over, _cap(args, DEFAULT_CAP))
    _emit(args, {"ok": True, "count": n, "variables": len(over)}, str(n))
    return EXIT_OK


def cmd_equiv(args) -> int:
    _need(args, "circuit", "circuit2")
    c1, c2 = read_circuit(args.circuit), read_circuit(args.circuit2)
    aux = (c1.aux | c2.aux) if args.modulo_aux else frozenset()
    cap = _cap(args, DEFAULT_CAP)
    method = "exhaustive"
    try:
        same, witness = equivalent(c1, c2, aux, cap)
    except CapExceeded:
        method = "sampled"
        same, witness = sampled_equivalent(c1, c2, 1 << 14, args.seed, aux)
    payload = {"ok": same, "method": method, "seed": args.seed,
               "witness": {str(k): v for k, v in sorted(witness.items())} if witness else None}
    text = "equivalent" if same else f"differ at {witness}"
    if method == "sampled":
        text += " (sampled, not proven)"
    _emit(args, payload, text)
    return EXIT_OK if same else EXIT_VIOLATION


def cmd_subfuncs(args) -> int:
    _need(args, "circuit", "fixed_set")
    c = read_circuit(args.circuit)
    n = count_subfunctions(truth_table(c, None, _cap(args, DEFAULT_CAP)), args.fixed_set)
    _emit(args, {"ok": True, "subfunctions": n}, str(n))
    return EXIT_OK


def cmd_gen_hwb(args) -> int:
    _need(args, "n", "out_prefix")
    inst = build_hwb(args.n)
    prefix = str(args.out_prefix)
    files = {f"{prefix}.d.nnf": serialize_circuit(inst.d),
             f"{prefix}.dbar.nnf": serialize_circuit(inst.dbar),
             f"{prefix}.vtree": serialize_vtree(inst.vtree)}
    for path, data in files.items():
        atomic_write(path, data)
    _emit(args, {"ok": True, "written": list(files), "size_d": inst.d.size(),
                 "size_dbar": inst.dbar.size()},
          f"size(d)={inst.d.size()} size(dbar)={inst.dbar.size()}")
    return EXIT_OK


def cmd_separation(args) -> int:
    _need(args, "n")
    ns = args.n if isinstance(args.n, list) else [args.n]
    rows = separation_experiment(ns, _cap(args, 20), args.fixed_set)
    text = rows_to_csv(rows)
    if args.csv:
        atomic_write(args.csv, text)
    payload = {"ok": True, "rows": rows}
    if len(rows) > 1:
        payload["slope_d"] = size_slope(rows, "size_d")
        payload["slope_dbar"] = size_slope(rows, "size_dbar")
    _emit(args, payload, text.rstrip("\n"))
    return EXIT_OK


def cmd_stats(args) -> int:
    _need(args, "circuit")
    c = read_circuit(args.circuit)
    kinds: dict[str, int] = {}
    for n in c.reachable():
        kinds[c.gates[n].kind] = kinds.get(c.gates[n].kind, 0) + 1
    payload = {"ok": True, "size": c.size(), "edges": c.edge_count(),
               "variables": len(c.universe), "aux": sorted(c.aux), "gates": kinds}
    text = (f"size {c.size()}, edges {c.edge_count()}, variables {len(c.universe)}, "
            f"aux {len(c.aux)}")
    if args.vtree:
        t = read_vtree(args.vtree)
        payload["vtree_nodes"] = len(t)
        text += f", vtree nodes {len(t)}"
    _emit(args, payload, text)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate, "simplify": cmd_simplify, "smooth": cmd_smooth,
    "restrict": cmd_restrict, "simulate": cmd_simulate, "count": cmd_count,
    "equiv": cmd_equiv, "subfuncs": cmd_subfuncs, "gen-hwb": cmd_gen_hwb,
    "separation": cmd_separation, "stats": cmd_stats,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ddnnf2sdd", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--circuit")
    p.add_argument("--circuit2")
    p.add_argument("--vtree")
    p.add_argument("--out")
    p.add_argument("--trace", help="trace file for simulate (default: trace.json next to --out)")
    p.add_argument("--cap", type=int)
    p.add_argument("--props", type=lambda s: [x for x in s.split(",") if x])
    p.add_argument("--assign", type=_assignment)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--modulo-aux", action="store_true")
    p.add_argument("--n", type=_int_list)
    p.add_argument("--out-prefix")
    p.add_argument("--csv")
    p.add_argument("--fixed-set", type=_int_list)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "gen-hwb" and args.n is not None:
        if len(args.n) != 1:
            print("error: gen-hwb takes a single --n", file=sys.stderr)
            return EXIT_USAGE
        args.n = args.n[0]
    if args.cap is not None and args.cap < 0:
        print("error: --cap must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except PropertyViolation as e:
        print(f"violation: {e}", file=sys.stderr)
        return EXIT_VIOLATION
    except (ParseError, InputError, CapExceeded, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CircuitError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
