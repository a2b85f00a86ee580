"""Command-line interface.

Exit codes: 0 success, 1 input error, 2 an audit verdict failed,
3 unphysical setup (zero total probability weight).
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys

from .audit import POSTULATES, audit_dimension, run_audits
from .correlations import UnphysicalSetupError
from .demo import born_demo, load_bundled_theory, ocb_demo
from .network import evaluate
from .reports import (
    census_to_dict,
    evaluation_to_dict,
    report_to_dict,
    table_to_dict,
)
from .theoryfile import TheoryError, build_network, load_theory


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="conetheory", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    p_eval = sub.add_parser("eval", help="evaluate a theory file's wire network")
    p_eval.add_argument("file")
    p_eval.add_argument("--seed", type=int, default=None)
    p_eval.add_argument("--machine", action="store_true")

    p_audit = sub.add_parser("audit", help="audit a theory file")
    p_audit.add_argument("file")
    p_audit.add_argument(
        "--postulates",
        nargs="+",
        required=True,
        help=f"subset of {', '.join(POSTULATES)} (comma- or space-separated)",
    )
    p_audit.add_argument("--seed", type=int, default=None)
    p_audit.add_argument("--machine", action="store_true")

    p_dims = sub.add_parser("dims", help="dimension census for every system pair")
    p_dims.add_argument("file")
    p_dims.add_argument("--machine", action="store_true")

    p_demo = sub.add_parser("demo", help="run a bundled demonstration")
    p_demo.add_argument("name", choices=["ocb", "born"])
    p_demo.add_argument("--seed", type=int, default=0)
    p_demo.add_argument("--trials", type=int, default=50)
    p_demo.add_argument("--machine", action="store_true")

    return parser


def run_cli(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(parser.format_usage(), file=sys.stderr, end="")
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.command is None:
        print(parser.format_usage(), file=sys.stderr, end="")
        return 1
    try:
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "audit":
            return _cmd_audit(args)
        if args.command == "dims":
            return _cmd_dims(args)
        return _cmd_demo(args)
    except UnphysicalSetupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (TheoryError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_eval(args) -> int:
    theory = load_theory(args.file)
    network = build_network(theory)
    result = evaluate(
        network, tol=theory.options.tolerance,
        strict_normalization=theory.options.strict_oc_normalization,
    )
    if args.machine:
        _emit(evaluation_to_dict(result))
        return 0
    _print_table(result.table)
    for rep in result.normalization:
        mark = "ok" if rep.satisfied else "off"
        extra = f" [{rep.note}]" if rep.note else ""
        print(
            f"trace convention {rep.operation}.{rep.action}: "
            f"{rep.trace_total:.12g} vs {rep.expected:.12g} ({mark}){extra}"
        )
    return 0


def _cmd_audit(args) -> int:
    theory = load_theory(args.file)
    postulates = []
    for token in args.postulates:
        postulates.extend(p for p in token.split(",") if p)
    for p in postulates:
        if p not in POSTULATES:
            raise TheoryError("postulates", f"unknown postulate {p!r}")
    seed = args.seed if args.seed is not None else theory.options.seed
    reports = run_audits(theory, postulates, seed=seed)
    if args.machine:
        _emit([report_to_dict(r) for r in reports])
    else:
        for r in reports:
            print(f"[{r.verdict}] {r.postulate} {r.subject} (seed {r.seed})")
            for e in r.evidence:
                print(f"    {e.check} = {e.value:.12g} (tol {e.tolerance:.12g})")
            for note in r.notes:
                print(f"    note: {note}")
    return 2 if any(r.verdict == "fail" for r in reports) else 0


def _cmd_dims(args) -> int:
    theory = load_theory(args.file)
    names = list(theory.systems)
    out = []
    for i, na in enumerate(names):
        for nb in names[i:]:
            census, report = audit_dimension(
                theory.systems[na], theory.systems[nb], subject=f"{na} x {nb}"
            )
            out.append((report, census))
    if args.machine:
        tree = []
        for report, census in out:
            tree.append(report_to_dict(report))
            if census is not None:
                tree.append(census_to_dict(census))
        _emit(tree)
        return 0
    for report, census in out:
        if census is None:
            print(f"{report.subject}: undefined ({'; '.join(report.notes)})")
            continue
        print(
            f"{report.subject}: d_ab={census.d_ab} d_a*d_b={census.d_a * census.d_b} "
            f"c_ab={census.c_ab} t_ab={census.t_ab} t_ba={census.t_ba} "
            f"r_ab={census.r_ab} slack={census.slack} -> {report.verdict}"
        )
    return 0


def _cmd_demo(args) -> int:
    if args.name == "ocb":
        result = ocb_demo()
        if args.machine:
            _emit(
                {
                    "game_success": result.game_success,
                    "causal_successes": result.causal_successes,
                    "causal_best": result.causal_best,
                    "table": table_to_dict(result.table),
                }
            )
            return 0
        print(f"game success probability: {result.game_success:.12g}")
        print(f"  (2 + sqrt 2)/4        = {(2 + 2 ** 0.5) / 4:.12g}")
        for name, s in result.causal_successes.items():
            print(f"causally ordered {name}: {s:.12g}")
        print(f"causal best: {result.causal_best:.12g} (bound 0.75)")
        return 0
    result = born_demo(seed=args.seed, trials=args.trials)
    if args.machine:
        _emit({"trials": result.trials, "max_deviation": result.max_deviation})
        return 0
    print(
        f"{result.trials} random causally ordered chains: "
        f"max |network - density matrix| = {result.max_deviation:.3e}"
    )
    return 0


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _emit(tree) -> None:
    print(json.dumps(tree, sort_keys=True, indent=2))


def _print_table(table) -> None:
    width = max(len(" ".join(r.outcome)) for r in table.rows)
    width = max(width, len("outcome"))
    print(f"{'outcome':<{width}}  {'weight':<24}  probability")
    for r in table.rows:
        label = " ".join(r.outcome)
        print(f"{label:<{width}}  {r.weight!r:<24}  {r.probability:.12g}")
    print(f"total weight: {table.total_weight!r}")
