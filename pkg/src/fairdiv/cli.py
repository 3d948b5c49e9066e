"""Command-line surface tying the library together.

Every invocation prints a single JSON document on stdout (diagnostics go to
stderr).  Exit codes: 0 decided/succeeded, 1 negative decision (e.g. no
orientation exists), 2 usage or input error, 3 budget exceeded / undecided.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import allocators, chores, gadgets, mms, oracle
from .checks import CRITERIA, check, mms_threshold
from .core import (Allocation, Instance, Multigraph, Orientation, dump_json,
                   load_json, parse_rational)
from .dot import export_dot
from .efx_multigraph import ORIENTED, BiValuedGraph, efx_orient_bivalued

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class UsageError(Exception):
    pass


def _load_instance(path: str) -> Instance:
    return Instance.from_json_dict(load_json(path))


def _load_graph(path: str) -> Multigraph:
    return Multigraph.from_json_dict(load_json(path))


def _load_allocation(path: str) -> Allocation:
    return Allocation.from_json_dict(load_json(path))


def _emit(payload, args) -> None:
    print(dump_json(payload, pretty=getattr(args, "pretty", False)))


def _bivalued_from_flags(g: Multigraph, args) -> BiValuedGraph:
    weights = sorted({e.weight_a for e in g.edges} | {e.weight_b for e in g.edges})
    if args.alpha is not None and args.beta is not None:
        return BiValuedGraph(g, parse_rational(args.alpha), parse_rational(args.beta))
    if len(weights) == 2:
        return BiValuedGraph(g, weights[1], weights[0])
    if len(weights) == 1:
        return BiValuedGraph(g, weights[0] + 1, weights[0])
    if len(weights) == 0:
        return BiValuedGraph(g, Fraction(1), Fraction(0))
    raise UsageError("graph has more than two weight values; pass --alpha/--beta")


def _cmd_check(args) -> int:
    inst = _load_instance(args.instance)
    alloc = _load_allocation(args.allocation)
    reports = []
    all_hold = True
    for criterion in args.criteria.split(","):
        criterion = criterion.strip()
        if criterion not in CRITERIA:
            raise UsageError(f"unknown criterion {criterion!r}")
        report = check(inst, alloc, criterion)
        all_hold = all_hold and report.holds
        reports.append(report.to_json_dict())
    _emit(reports, args)
    return EXIT_OK if all_hold else EXIT_NEGATIVE


def _cmd_allocate(args) -> int:
    inst = _load_instance(args.instance)
    if args.algo == "rr":
        order = ([int(tok) for tok in args.order.split(",")]
                 if args.order else list(range(inst.n)))
        alloc = allocators.round_robin(inst, order)
    elif args.algo == "drr":
        alloc = allocators.double_round_robin(inst)
    elif args.algo == "ece":
        alloc = allocators.envy_cycle_elimination(inst)
    elif args.algo == "ttece":
        alloc = allocators.top_trading_ece(inst)
    elif args.algo == "dece":
        alloc = allocators.double_ece(inst)
    else:
        raise UsageError(f"unknown algorithm {args.algo!r}")
    report = check(inst, alloc, "ef1")
    _emit({"allocation": alloc.to_json_dict(), "ef1": report.to_json_dict()}, args)
    return EXIT_OK


def _cmd_mms(args) -> int:
    inst = _load_instance(args.instance)
    thresholds = [str(mms_threshold(inst, i)[0]) for i in range(inst.n)]
    if args.thresholds_only:
        _emit({"thresholds": thresholds}, args)
        return EXIT_OK
    result = mms.solve_mms(inst)
    payload = {
        "thresholds": thresholds,
        "verdict": result.verdict,
        "allocation": result.allocation.to_json_dict() if result.allocation else None,
        "trail": [step.to_json_dict() for step in result.trail],
    }
    _emit(payload, args)
    return EXIT_OK if result.verdict == mms.FOUND else EXIT_BUDGET


def _cmd_orient(args) -> int:
    g = _load_graph(args.graph)
    if args.goods == args.chores:
        raise UsageError("pass exactly one of --goods / --chores")
    dot_target = None
    if args.goods:
        if args.criterion != "efx0":
            raise UsageError("goods orientation supports --criterion efx0")
        bg = _bivalued_from_flags(g, args)
        verdict, pi = efx_orient_bivalued(bg)
        payload = {"verdict": verdict,
                   "orientation": pi.to_json_dict() if pi else None}
        code = EXIT_OK if verdict == ORIENTED else EXIT_NEGATIVE
        dot_target = pi
    else:
        if args.criterion == "ef1":
            pi = chores.ef1_orient_graph(g)
        elif args.criterion == "efx0":
            pi = chores.efx_orient_chores(g)
        else:
            raise UsageError("chores orientation supports ef1 or efx0")
        payload = {"exists": pi is not None,
                   "orientation": pi.to_json_dict() if pi else None}
        code = EXIT_OK if pi is not None else EXIT_NEGATIVE
        dot_target = pi
    if args.emit_dot:
        with open(args.emit_dot, "w", encoding="utf-8") as fh:
            fh.write(export_dot(g, dot_target))
    _emit(payload, args)
    return code


def _cmd_gadget(args) -> int:
    if args.gadget_kind == "circuit":
        with open(args.file, "r", encoding="utf-8") as fh:
            circuit = gadgets.parse_circuit(fh.read())
        bg = gadgets.build_circuit_gadget(circuit, args.q, args.alpha, args.beta)
        payload = bg.g.to_json_dict()
        payload["alpha"] = str(bg.alpha)
        payload["beta"] = str(bg.beta)
    else:
        values = [int(tok) for tok in args.set.split(",")]
        if args.variant == "selfloop":
            g = gadgets.build_partition_selfloop_gadget(values, args.criterion)
        else:
            g = gadgets.build_partition_triangle_gadget(values)
        payload = g.to_json_dict()
    if args.output:
        dump_json(payload, path=args.output, pretty=getattr(args, "pretty", False))
        _emit({"written": args.output}, args)
    else:
        _emit(payload, args)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    budget = oracle.SearchBudget(max_states=args.budget, on_exceed="unknown")
    try:
        if args.graph:
            g = _load_graph(args.graph)
            mapping = {"efx0-orientation": "efx0", "ef1-orientation": "ef1"}
            if args.exists not in mapping:
                raise UsageError("graph oracle supports efx0-orientation / ef1-orientation")
            pi = oracle.first_orientation_satisfying(g, mapping[args.exists], budget)
            payload = {"exists": pi is not None,
                       "witness": pi.to_json_dict() if pi else None}
            _emit(payload, args)
            return EXIT_OK if pi is not None else EXIT_NEGATIVE
        if args.instance:
            inst = _load_instance(args.instance)
            if args.exists == "mms":
                predicate = oracle.mms_predicate(inst)
            elif args.exists in ("efx0", "ef1", "ef", "prop", "efx-"):
                criterion = args.exists

                def predicate(alloc, _criterion=criterion):
                    return check(inst, alloc, _criterion).holds
            else:
                raise UsageError(f"unknown existence question {args.exists!r}")
            alloc = oracle.brute_exists_allocation(inst, predicate, budget)
            payload = {"exists": alloc is not None,
                       "witness": alloc.to_json_dict() if alloc else None}
            _emit(payload, args)
            return EXIT_OK if alloc is not None else EXIT_NEGATIVE
        raise UsageError("pass --graph or --instance")
    except oracle.BudgetExceeded:
        _emit({"exists": "unknown", "reason": "budget exceeded"}, args)
        return EXIT_BUDGET


def _cmd_export_dot(args) -> int:
    g = _load_graph(args.graph)
    pi = Orientation.from_json_dict(load_json(args.orientation)) \
        if args.orientation else None
    text = export_dot(g, pi, style=args.style)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        _emit({"written": args.output}, args)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_report(args) -> int:
    from .report import run_growth_report

    sizes = tuple(int(tok) for tok in args.sizes.split(",")) if args.sizes else \
        (8, 16, 32, 64, 128)
    summary = run_growth_report(args.out, sizes=sizes, trials=args.trials,
                                seed=args.seed)
    _emit(summary, args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairdiv",
        description="Fair division of indivisible items: checkers, allocators, "
                    "orientation deciders, hardness gadgets, and brute-force oracles.")
    parser.add_argument("--pretty", action="store_true",
                        help="indent JSON output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check fairness criteria of an allocation")
    p.add_argument("--instance", required=True)
    p.add_argument("--allocation", required=True)
    p.add_argument("--criteria", required=True,
                   help="comma-separated: ef,prop,ef1,efx0,efx-,mms,po")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("allocate", help="run an allocation algorithm")
    p.add_argument("--algo", required=True, choices=["rr", "drr", "ece", "ttece", "dece"])
    p.add_argument("--instance", required=True)
    p.add_argument("--order", help="picking order for rr, e.g. 1,0,2")
    p.set_defaults(func=_cmd_allocate)

    p = sub.add_parser("mms", help="exact MMS thresholds and allocation search")
    p.add_argument("--instance", required=True)
    p.add_argument("--thresholds-only", action="store_true")
    p.set_defaults(func=_cmd_mms)

    p = sub.add_parser("orient", help="decide EF1/EFX0 orientations")
    p.add_argument("--graph", required=True)
    p.add_argument("--goods", action="store_true")
    p.add_argument("--chores", action="store_true")
    p.add_argument("--criterion", required=True, choices=["ef1", "efx0"])
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--emit-dot", metavar="PATH",
                   help="also write the oriented multigraph as DOT")
    p.set_defaults(func=_cmd_orient)

    p = sub.add_parser("gadget", help="generate hardness-reduction instances")
    gsub = p.add_subparsers(dest="gadget_kind", required=True)
    gc = gsub.add_parser("circuit")
    gc.add_argument("--file", required=True, help="circuit description file")
    gc.add_argument("--q", type=int, default=2)
    gc.add_argument("--alpha", default="5")
    gc.add_argument("--beta", default="1")
    gc.add_argument("-o", "--output")
    gc.set_defaults(func=_cmd_gadget)
    gp = gsub.add_parser("partition")
    gp.add_argument("--set", required=True, help="comma-separated positive integers")
    gp.add_argument("--variant", required=True, choices=["selfloop", "triangle"])
    gp.add_argument("--criterion", default="ef1", choices=["ef1", "efx0"])
    gp.add_argument("-o", "--output")
    gp.set_defaults(func=_cmd_gadget)

    p = sub.add_parser("oracle", help="brute-force existence questions")
    p.add_argument("--graph")
    p.add_argument("--instance")
    p.add_argument("--exists", required=True)
    p.add_argument("--budget", type=int, default=oracle.DEFAULT_MAX_STATES)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("export-dot", help="render a multigraph as DOT")
    p.add_argument("--graph", required=True)
    p.add_argument("--orientation")
    p.add_argument("--style", default="paper", choices=["paper", "plain"])
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_export_dot)

    p = sub.add_parser("report", help="growth report with figures (informational)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--sizes", help="comma-separated edge counts")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=2024)
    p.set_defaults(func=_cmd_report)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except oracle.BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
