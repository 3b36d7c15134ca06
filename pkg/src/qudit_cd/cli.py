"""Command-line entry point: ``qudit-cd <subcommand>``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .cd import cd_coefficients, cd_pool
from .experiment import ConfigError, load_config, solve
from .graph import GraphFormatError, decode_graph6, encode_graph6, format_edgelist, parse_graph, read_graph6_corpus
from .hamiltonians import PROBLEM_KINDS, mixer, problem_hamiltonian
from .optimizer import summarize
from .symmetry import automorphism_group, group_parameters, orbit_partition


def _read_graph(path: str, fmt: str):
    data = sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()
    return parse_graph(data, fmt)


def _dump(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    outdir = args.output_dir or cfg.output_dir
    _, summary = solve(cfg, outdir)
    if outdir is None:
        _dump(summary)
    else:
        print(f"wrote {Path(outdir) / 'trace.csv'} and {Path(outdir) / 'summary.json'}")
        for key, val in summary["report"].items():
            print(f"{key}: {val}")
    return 0


def cmd_orbits(args) -> int:
    g = _read_graph(args.graph, args.format)
    auts = automorphism_group(g)
    out = orbit_partition(g, auts).one_based()
    out["automorphisms"] = len(auts)
    _dump(out)
    return 0


def cmd_cdterms(args) -> int:
    g = _read_graph(args.graph, args.format)
    hp = problem_hamiltonian(args.problem, g, d=args.d, k=args.k)
    h0 = mixer(g.n, hp.d)
    pool = cd_pool(h0, hp)
    groups = group_parameters(pool, orbit_partition(g))
    terms = []
    for k, e in enumerate(pool.elements):
        kind, where = e.support
        if kind == "vertex":
            sup = [where + 1]
        elif kind == "arc":
            sup = [where[0] + 1, where[1] + 1]
        else:
            sup = [s + 1 for s in where]
        terms.append({"index": k, "kind": kind, "sites": sup, "labels": list(e.labels), "group": groups.group_of[k]})
    out = {
        "problem": args.problem,
        "d": hp.d,
        "pool_size": len(pool),
        "groups": groups.n_groups,
        "terms": terms,
    }
    if args.lam is not None:
        coeffs = cd_coefficients(h0, hp, pool, args.lam, groups if args.grouped else None)
        out["lambda"] = args.lam
        out["grouped"] = bool(args.grouped)
        out["alphas"] = [float(a) for a in coeffs.alphas]
        out["action"] = coeffs.action
        out["action_without_cd"] = coeffs.baseline_action
    _dump(out)
    return 0


def cmd_stats(args) -> int:
    data = sys.stdin.buffer.read() if args.graphs == "-" else Path(args.graphs).read_bytes()
    graphs = read_graph6_corpus(data)
    ratios = []
    rows = []
    for g in graphs:
        hp = problem_hamiltonian(args.problem, g, d=args.d, k=args.k)
        pool = cd_pool(mixer(g.n, hp.d), hp)
        grouped = group_parameters(pool, orbit_partition(g)).n_groups
        ratios.append(grouped / len(pool))
        rows.append({"graph6": encode_graph6(g).decode(), "n": g.n, "total": len(pool), "grouped": grouped, "ratio": ratios[-1]})
    stats = summarize(ratios)
    out = {"graphs": len(graphs), "ratio": stats}
    if args.per_graph:
        out["per_graph"] = rows
    _dump(out)
    return 0


def cmd_encode(args) -> int:
    g = _read_graph(args.graph, "edgelist")
    print(encode_graph6(g).decode())
    return 0


def cmd_decode(args) -> int:
    if args.string is not None:
        g = decode_graph6(args.string)
    else:
        g = _read_graph(args.graph, "graph6")
    sys.stdout.write(format_edgelist(g))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qudit-cd", description="Symmetry-grouped counterdiabatic ansatze on qudits.")
    p.add_argument("-v", "--verbose", action="store_true", help="log optimizer warnings")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run an experiment from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--output-dir", help="override the config's output_dir")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("orbits", help="vertex, edge and arc orbits (1-based JSON)")
    s.add_argument("--graph", required=True, help="graph file, '-' for stdin")
    s.add_argument("--format", choices=("graph6", "edgelist"), default="graph6")
    s.set_defaults(func=cmd_orbits)

    s = sub.add_parser("cdterms", help="first-order CD pool, grouping and optional coefficients")
    s.add_argument("--graph", required=True)
    s.add_argument("--format", choices=("graph6", "edgelist"), default="graph6")
    s.add_argument("--problem", choices=PROBLEM_KINDS, required=True)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--grouped", action="store_true")
    s.add_argument("--d", type=int, default=3, help="local dimension for ising")
    s.add_argument("--k", type=int, default=3, help="colours for maxkcut")
    s.set_defaults(func=cmd_cdterms)

    s = sub.add_parser("stats", help="grouped/total CD parameter ratio over a graph6 corpus")
    s.add_argument("--graphs", required=True)
    s.add_argument("--problem", choices=PROBLEM_KINDS, default="ising")
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--per-graph", action="store_true")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("encode-graph6", help="edge list (1-based) to graph6")
    s.add_argument("--graph", default="-")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("decode-graph6", help="graph6 to edge list (1-based)")
    g = s.add_mutually_exclusive_group()
    g.add_argument("string", nargs="?")
    g.add_argument("--graph")
    s.set_defaults(func=cmd_decode, graph="-")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, GraphFormatError, ValueError, OSError) as exc:
        print(f"qudit-cd {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
