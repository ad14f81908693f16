"""Command line front end.

Five subcommands: `pair` runs the critical-point pairing on a graph
file, `bench` replays a named workload and reports counter bounds,
`fuzz` cross-checks backends on a random trace, `run` executes an
op-trace file and prints its query answers, and `sort` demos the
sorting reduction.  Exit codes: 0 success, 1 a differential mismatch
or an exceeded bound, 2 invalid input or an unusable configuration.
"""

from __future__ import annotations

import argparse
import sys

from .core import InvalidHandleError, UnsupportedOperationError
from .harness import (
    BACKENDS,
    format_pairing,
    fuzz,
    make_forest,
    read_reeb,
    read_trace,
    replay_trace,
    run_workload,
    sort_via_merge,
    workload_fig6,
    workload_fig7,
    workload_interleave,
    workload_random,
)
from .reeb import InvalidReebGraph, pair_single_pass, pair_two_pass

_WORKLOADS = {
    "fig6": workload_fig6,
    "fig7": workload_fig7,
    "interleave": workload_interleave,
    "random": workload_random,
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mergetree",
        description="mergeable heap-ordered forests: pairing, workloads, "
                    "fuzzing, and the sorting reduction")
    sub = p.add_subparsers(dest="cmd", required=True)

    pair = sub.add_parser(
        "pair", help="pair the critical points of a graph file")
    pair.add_argument("--input", required=True, metavar="FILE")
    pair.add_argument("--algo", choices=("single", "twopass"),
                      default="single")
    pair.add_argument("--backend", choices=tuple(BACKENDS),
                      help="forest driving the sweep; defaults to rank "
                           "for single, implicit for twopass")
    pair.add_argument("--require-connected", action="store_true")

    bench = sub.add_parser(
        "bench", help="replay a workload and check its counter bounds")
    bench.add_argument("--workload", choices=tuple(_WORKLOADS), required=True)
    bench.add_argument("--param", type=int, required=True, metavar="K",
                       help="k for fig6/fig7, n for interleave, "
                            "op budget and seed for random")
    bench.add_argument("--backend", choices=tuple(BACKENDS), default="dyn")
    bench.add_argument("--report", choices=("text", "json"), default="text")

    fz = sub.add_parser(
        "fuzz", help="differential fuzz of the backends against the oracle")
    fz.add_argument("--ops", type=int, required=True, metavar="N")
    fz.add_argument("--seed", type=int, required=True, metavar="S")
    fz.add_argument("--cuts", choices=("on", "off"), required=True)
    fz.add_argument("--backends", metavar="LIST",
                    help="comma-separated subset of "
                         f"{{{','.join(BACKENDS)}}}; defaults to dyn with "
                         "cuts on, dyn,rank,implicit with cuts off")

    run = sub.add_parser(
        "run", help="execute an op-trace file and print query answers")
    run.add_argument("--input", required=True, metavar="FILE")
    run.add_argument("--backend", choices=tuple(BACKENDS), default="dyn")

    srt = sub.add_parser(
        "sort", help="sort a file of reals through the merge reduction")
    srt.add_argument("--input", required=True, metavar="FILE",
                     help="one real per line")
    return p


def _cmd_pair(args) -> int:
    try:
        g = read_reeb(args.input)
    except OSError as exc:
        print(f"mergetree pair: {exc}", file=sys.stderr)
        return 2
    except InvalidReebGraph as exc:
        print(f"mergetree pair: invalid graph: {exc}", file=sys.stderr)
        return 2
    backend = args.backend or \
        ("implicit" if args.algo == "twopass" else "rank")
    try:
        if args.algo == "single":
            pairs = pair_single_pass(
                g, make_forest(backend),
                require_connected=args.require_connected)
        else:
            pairs = pair_two_pass(
                g, make_forest(backend), make_forest(backend),
                require_connected=args.require_connected)
    except InvalidReebGraph as exc:
        print(f"mergetree pair: invalid graph: {exc}", file=sys.stderr)
        return 2
    except UnsupportedOperationError as exc:
        print(f"mergetree pair: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(format_pairing(pairs))
    return 0


def _cmd_bench(args) -> int:
    try:
        workload = _WORKLOADS[args.workload](args.param)
    except ValueError as exc:
        print(f"mergetree bench: {exc}", file=sys.stderr)
        return 2
    try:
        report = run_workload(workload, args.backend)
    except UnsupportedOperationError as exc:
        print(f"mergetree bench: {exc}", file=sys.stderr)
        return 2
    if args.report == "json":
        print(report.to_json())
    else:
        print(report.to_text())
    return 0 if report.ok else 1


def _cmd_fuzz(args) -> int:
    backends = None
    if args.backends:
        backends = tuple(b.strip() for b in args.backends.split(",")
                         if b.strip())
    try:
        report = fuzz(args.seed, args.ops, cuts=args.cuts == "on",
                      backends=backends)
    except ValueError as exc:
        print(f"mergetree fuzz: {exc}", file=sys.stderr)
        return 2
    print(report.to_text())
    return 0 if report.ok else 1


def _cmd_run(args) -> int:
    try:
        ops = read_trace(args.input)
    except OSError as exc:
        print(f"mergetree run: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"mergetree run: {exc}", file=sys.stderr)
        return 2
    try:
        answers = replay_trace(ops, make_forest(args.backend))
    except (InvalidHandleError, UnsupportedOperationError,
            ValueError) as exc:
        print(f"mergetree run: {exc}", file=sys.stderr)
        return 2
    for line in answers:
        print(line)
    return 0


def _cmd_sort(args) -> int:
    values = []
    try:
        with open(args.input, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    values.append(float(line))
                except ValueError:
                    print(f"mergetree sort: line {lineno}: "
                          f"not a real number: {line!r}", file=sys.stderr)
                    return 2
    except OSError as exc:
        print(f"mergetree sort: {exc}", file=sys.stderr)
        return 2
    for v in sort_via_merge(values):
        print(v)
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.cmd == "pair":
        return _cmd_pair(args)
    if args.cmd == "bench":
        return _cmd_bench(args)
    if args.cmd == "fuzz":
        return _cmd_fuzz(args)
    if args.cmd == "run":
        return _cmd_run(args)
    return _cmd_sort(args)
