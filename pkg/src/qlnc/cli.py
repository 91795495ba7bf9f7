"""``qlnc`` command line: compile, verify, bench and network export."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Callable

from . import bench as benchmod
from .circuit import QlncCircuit, validate
from .compiler import (
    CompileError,
    butterfly_out_of_order,
    compile_chain_sequential,
    compile_constant_depth,
    compile_inorder,
    composite_swap_circuit,
    report,
    separation_circuit,
)
from .network import (
    LinearCode,
    Network,
    butterfly,
    chain,
    composite_swap,
    directed_speedup,
    grid,
    plus_graph,
    spoke_graph,
    star_multicast,
)
from .stabref import MAX_QUBITS
from .verify import BranchExplosion, verify_circuit

EXIT_FAIL = 1
EXIT_ERROR = 2

# networks with a code; the optional d argument overrides the field size
NETWORKS: dict[str, Callable] = {
    "butterfly": lambda d: butterfly(d or 2),
    "butterfly3": lambda d: butterfly(d or 3),
    "grid4x3": lambda d: grid(4, 3, d=d or 2),
    "grid6x4": lambda d: grid(6, 4, d=d or 2),
    "speedup3": lambda d: directed_speedup(3, d or 2),
    "speedup4": lambda d: directed_speedup(4, d or 2),
    "star3": lambda d: star_multicast(3, d or 2),
    "star3q3": lambda d: star_multicast(3, d or 3),
    "chain4": lambda d: chain(4, d or 2),
    "composite": lambda d: composite_swap()[:2],
}
# fixed circuits that are not produced by a compiler mode
CIRCUITS: dict[str, Callable] = {
    "butterfly_ooo": lambda d: butterfly_out_of_order(d or 2),
    "separation": lambda d: separation_circuit(),
    "composite_swap": lambda d: composite_swap_circuit(),
}
# graphs for the chain baseline with their default endpoint pairs
CHAIN_GRAPHS: dict[str, tuple[Callable, list]] = {
    "plus": (lambda: plus_graph(2), [("W", "E"), ("N", "S")]),
    "spokes6": (lambda: spoke_graph(6, 2), [("A", "D"), ("B", "E"), ("C", "F")]),
}


class CliError(Exception):
    pass


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _write(path: str | None, text: str):
    if path in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _seed(value):
    if value is not None:
        return value
    env = os.environ.get("QLNC_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise CliError(f"QLNC_SEED must be an integer, got {env!r}") from None


def _resolve(net: Network, name):
    """Map a node given on the command line (id or display name) to its id."""
    for v in net.roles:
        if str(v) == str(name) or net.names.get(v) == str(name):
            return v
    raise CliError(f"unknown node {name!r} in {net.name}")


def _parse_pairs(net: Network, text: str | None, default) -> list[tuple]:
    if text is None:
        raw = default
    else:
        try:
            raw = [tuple(p.split(":")) for p in text.split(",")]
        except ValueError:
            raw = None
        if not raw or any(len(p) != 2 for p in raw):
            raise CliError("--pairs expects a:b[,c:d...]")
    return [(_resolve(net, a), _resolve(net, b)) for a, b in raw]


def _load_coloring(path: str, net: Network):
    obj = _read_json(path)
    try:
        vc = {_resolve(net, k): int(v) for k, v in obj["vertex"].items()} if "vertex" in obj else None
        ec = None
        if "edge" in obj:
            ec = {(_resolve(net, e["from"]), _resolve(net, e["to"])): int(e["color"]) for e in obj["edge"]}
    except (KeyError, TypeError, AttributeError) as exc:
        raise CliError(f"{path}: coloring needs 'vertex' {{node: colour}} and/or 'edge' [{{from, to, color}}] ({exc})") from None
    return vc, ec


def _load_network(args) -> tuple[Network, LinearCode | None, list | None]:
    if args.example:
        if args.example in NETWORKS:
            net, code = NETWORKS[args.example](args.d)
            return net, code, None
        if args.example in CHAIN_GRAPHS:
            make, pairs = CHAIN_GRAPHS[args.example]
            return make(), None, pairs
        raise CliError(f"unknown example {args.example!r}")
    if not args.network:
        raise CliError("give --example or --network")
    obj = _read_json(args.network)
    try:
        # accept the {"network", "code"} bundle written by the network subcommand
        bundled = obj.get("code") if isinstance(obj, dict) else None
        net = Network.from_json(obj["network"] if isinstance(obj, dict) and "network" in obj else obj)
        if args.code:
            code = LinearCode.from_json(_read_json(args.code))
        else:
            code = LinearCode.from_json(bundled) if bundled else LinearCode()
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"invalid network or code file: {exc}") from None
    return net, code, None


# -- subcommands --------------------------------------------------------------------------
def cmd_compile(args) -> int:
    if args.example in CIRCUITS:
        c = CIRCUITS[args.example](args.d)
    else:
        net, code, default_pairs = _load_network(args)
        mode = args.mode
        if mode == "chain":
            if default_pairs is None:
                default_pairs = [(net.names.get(t, t), rs[0]) for t, rs in sorted(net.multicast.items()) if len(rs) == 1]
            c = compile_chain_sequential(_parse_pairs(net, args.pairs, default_pairs), net)
        elif code is None:
            raise CliError(f"{args.example} carries no code; use --mode chain")
        elif mode == "inorder":
            c = compile_inorder(net, code, destructive=args.destructive)
        else:
            vc, ec = _load_coloring(args.coloring, net) if args.coloring else (None, None)
            if ec is None and args.edge_coloring != "bipartite":
                from .coloring import directed_edge_coloring

                ec = directed_edge_coloring([e for e in net.edges if code.beta(e, net.d)], args.edge_coloring)
            c = compile_constant_depth(net, code, vc, ec)
    rep = report(c).to_json()
    if args.format == "dot":
        _write(args.output, c.to_dot())
        print(json.dumps(rep), file=sys.stderr)
    elif args.output:
        _write(args.output, c.dumps(indent=1))
        print(json.dumps(rep, indent=1))
    else:
        print(json.dumps({"circuit": c.to_json(), "report": rep}, indent=1))
    return 0


def _load_circuit(args) -> QlncCircuit:
    if args.example:
        if args.example in CIRCUITS:
            return CIRCUITS[args.example](args.d)
        if args.example in NETWORKS:
            return compile_inorder(*NETWORKS[args.example](args.d))
        raise CliError(f"unknown example {args.example!r}")
    if not args.circuit:
        raise CliError("give a circuit file (or - for stdin) or --example")
    obj = _read_json(args.circuit)
    if isinstance(obj, dict) and "circuit" in obj:
        obj = obj["circuit"]
    try:
        c = QlncCircuit.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"{args.circuit}: invalid circuit: {exc}") from None
    problems = validate(c)
    if problems:
        raise CliError("invalid circuit:\n  " + "\n  ".join(problems))
    return c


def cmd_verify(args) -> int:
    c = _load_circuit(args)
    groups = None
    if args.groups:
        try:
            groups = json.loads(args.groups)
        except json.JSONDecodeError as exc:
            raise CliError(f"--groups: malformed JSON ({exc.msg})") from None
        groups = [[_match_qubit(c, q) for q in g] for g in groups]
    v = verify_circuit(
        c, groups, oracle=args.oracle, branches=args.branches, samples=args.samples, seed=_seed(args.seed), limit=args.limit
    )
    out = v.to_json()
    if not args.all_branches:
        out.pop("branches")
    print(json.dumps(out, indent=1))
    line = "PASS" if v.passed else "FAIL"
    print(f"{line}: {len(v.branches)} branch(es) checked with the {v.oracle} oracle", file=sys.stderr)
    return 0 if v.passed else EXIT_FAIL


def _match_qubit(c: QlncCircuit, q):
    for x in c.qubits:
        if x == q or str(x) == str(q):
            return x
    raise CliError(f"--groups references unknown qubit {q!r}")


def cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",")]
    except ValueError:
        raise CliError("--sizes expects comma-separated integers") from None
    engines = args.engines.split(",")
    if "stabref" in engines and max(sizes) > MAX_QUBITS:
        raise CliError(f"refusing sizes above {MAX_QUBITS} qubits: the stabilizer tableau would not fit the memory guard")
    rows = benchmod.run_bench(sizes, args.family, engines, args.repeats, _seed(args.seed))
    _write(args.output, benchmod.to_csv(rows))
    if len(sizes) > 1:
        for e in engines:
            print(f"{e}: log-log slope of per-measurement time {benchmod.loglog_slope(rows, e):.2f}", file=sys.stderr)
    return 0


def cmd_network(args) -> int:
    net, code, _ = _load_network(args)
    if args.format == "dot":
        _write(args.output, net.to_dot())
    else:
        obj = {"network": net.to_json()}
        if code is not None:
            obj["code"] = code.to_json()
        _write(args.output, json.dumps(obj, indent=1))
    return 0


# -- parser -------------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    examples = sorted(NETWORKS) + sorted(CIRCUITS) + sorted(CHAIN_GRAPHS)
    p = argparse.ArgumentParser(prog="qlnc", description="Compile and verify quantum linear network coding circuits.")
    sub = p.add_subparsers(dest="command", required=True)

    def source(sp):
        sp.add_argument("--example", choices=examples, help="built-in network or circuit")
        sp.add_argument("--d", type=int, default=None, help="field size for built-in networks that accept one")

    c = sub.add_parser("compile", help="compile a network code into a circuit")
    source(c)
    c.add_argument("--network", help="network JSON file (- for stdin)")
    c.add_argument("--code", help="code JSON file")
    c.add_argument("--mode", choices=("inorder", "constdepth", "chain"), default="inorder")
    c.add_argument("--coloring", help="JSON with 'vertex' and/or 'edge' colourings for constdepth")
    c.add_argument("--edge-coloring", choices=("bipartite", "misra_gries"), default="bipartite")
    c.add_argument("--pairs", help="chain endpoints as a:b,c:d (ids or names)")
    c.add_argument("--destructive", action="store_true", help="discard relays after measuring them (inorder)")
    c.add_argument("--format", choices=("json", "dot"), default="json")
    c.add_argument("-o", "--output", help="write the circuit here; the report goes to stdout")
    c.set_defaults(func=cmd_compile)

    v = sub.add_parser("verify", help="check the distributed entangled states on every branch")
    source(v)
    v.add_argument("circuit", nargs="?", help="circuit JSON file, or - for stdin")
    v.add_argument("--groups", help='JSON list of qubit groups, e.g. "[[1,6],[3,4]]"')
    v.add_argument("--branches", choices=("exhaustive", "sample"), default="exhaustive")
    v.add_argument("--samples", type=int, default=16)
    v.add_argument("--limit", type=int, default=2**16, help="refuse exhaustive runs with more branches")
    v.add_argument("--oracle", choices=("auto", "dense", "stab", "tableau"), default="auto")
    v.add_argument("--seed", type=int, default=None, help="defaults to $QLNC_SEED, then 0")
    v.add_argument("--all-branches", action="store_true", help="include every branch in the output")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="time the tableau and stabilizer engines")
    b.add_argument("--family", choices=sorted(benchmod.FAMILIES), default="comb")
    b.add_argument("--sizes", default=",".join(map(str, benchmod.DEFAULT_SIZES)))
    b.add_argument("--engines", default="tableau,stabref")
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("-o", "--output", help="CSV path (default stdout)")
    b.set_defaults(func=cmd_bench)

    n = sub.add_parser("network", help="export a network as JSON or DOT")
    source(n)
    n.add_argument("--network", help="network JSON file")
    n.add_argument("--code", help="code JSON file")
    n.add_argument("--format", choices=("json", "dot"), default="json")
    n.add_argument("-o", "--output")
    n.set_defaults(func=cmd_network)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, CompileError, BranchExplosion) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
