"""Command-line front end.

Subcommands: count (run one instance at a target precision), bound
(a-priori error bound and digit floor), generate (benchmark instances),
check (precision scorecard against an oracle), and report (corpus sweep
with CSV and figures).

Exit codes: 0 when the requested guarantee is met, 2 when the run
finished but could not certify the target, 1 for input or resource
errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from .evaluator import (
    BoundUnavailable,
    DoubleDomain,
    ErdDomain,
    IntervalDomain,
    RationalDomain,
    SoftFloatDomain,
    bound_digits_floor,
    digits_floor,
    error_bound,
    evaluate,
    hybrid_count,
    select_fraction_width,
)
from .generators import (
    WEIGHT_FAMILIES,
    gen_product,
    gen_random_ddnnf,
    gen_tau,
    gen_weights,
)
from .interval import iv_decimal_precision
from .metrics import approx_error, decimal_precision
from .nnf import (
    EnumerationRefused,
    NnfParseError,
    model_enumerate,
    parse_nnf,
    render_nnf,
    validate,
)
from .rational import (
    RationalParseError,
    ResourceLimitExceeded,
    rat_from_text,
    render_decimal,
)
from .weights import WeightParseError, build_plan, parse_weights, render_weights

MODES = ("hybrid", "float", "interval", "rational")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # input errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        sys.stderr.write("error: %s\n" % message)
        raise SystemExit(1)


def _load_instance(nnf_path: str, weights_path):
    try:
        dag = parse_nnf(Path(nnf_path).read_text())
    except (OSError, NnfParseError) as exc:
        raise SystemExit(_fail("cannot load formula: %s" % exc))
    if weights_path:
        try:
            wm = parse_weights(Path(weights_path).read_text())
        except (OSError, WeightParseError) as exc:
            raise SystemExit(_fail("cannot load weights: %s" % exc))
    else:
        from .weights import WeightMap

        wm = WeightMap()
    return dag, wm


def _fail(message: str) -> int:
    sys.stderr.write("error: %s\n" % message)
    return 1


def _digits_json(value):
    if value is None:
        return None
    if value == math.inf:
        return "inf"
    return round(value, 4)


def _render_value(nominal, guaranteed, target):
    if nominal is None:
        return None
    if guaranteed is None:
        digits = 18  # no certificate, print a plain double's worth
    elif guaranteed == math.inf:
        digits = max(1, math.ceil(max(target, 1.0))) + 2
    else:
        digits = max(1, math.ceil(guaranteed)) + 2
    return render_decimal(nominal, digits)


def _stage_json(stages):
    return [
        {
            "method": s.method,
            "accepted": s.accepted,
            "guaranteed_digits": _digits_json(s.guaranteed_digits),
            "op_count": s.op_count,
            "seconds": round(s.elapsed, 6),
        }
        for s in stages
    ]


def _emit_report(report: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report, indent=2, sort_keys=True))
        return
    print("instance:  %s" % report["instance"])
    print("method:    %s" % report["method"])
    print("value:     %s" % report["value"])
    guaranteed = report["guaranteed_digits"]
    shown = guaranteed if guaranteed is not None else "unknown"
    print(
        "digits:    %s guaranteed (target %s) -> %s"
        % (shown, report["target_precision"], "met" if report["guarantee_met"] else "NOT met")
    )
    if report.get("overflow"):
        print("flag:      overflow encountered")
    if report.get("underflow"):
        print("flag:      underflow encountered")
    for s in report["stages"]:
        print(
            "stage:     %-14s %-8s guaranteed=%s ops=%d t=%.4fs"
            % (
                s["method"],
                "accept" if s["accepted"] else "retry",
                s["guaranteed_digits"],
                s["op_count"],
                s["seconds"],
            )
        )
    print("wall:      %.4f s" % report["wall_seconds"])


def cmd_count(args) -> int:
    dag, wm = _load_instance(args.nnf, args.weights)
    structure = validate(dag)
    if not structure.decomposable:
        return _fail(
            "formula is not decomposable, counts would be wrong: %s"
            % structure.notes.get("decomposable", "")
        )
    target = args.target_precision
    if target < 0:
        return _fail("target precision must be nonnegative")
    if args.precision is not None and args.precision < 2:
        return _fail("fraction width must be at least 2")
    plan = build_plan(wm, dag)
    started = time.perf_counter()
    notes = []
    if not structure.decision_form:
        notes.append(
            "general disjunctions: count is correct only if they are deterministic"
        )

    try:
        if args.mode == "hybrid":
            res = hybrid_count(
                dag, wm, target, rational_max_bits=args.max_rational_bits
            )
        elif args.mode == "float":
            p = args.precision or select_fraction_width(
                plan.bound_vars, target, plan.any_rescaled
            )
            domain = ErdDomain() if p == 53 else SoftFloatDomain(p)
            res = evaluate(dag, plan, domain)
            if plan.all_nonnegative:
                res.guaranteed_digits = digits_floor(
                    p, plan.bound_vars, "rescaled" if plan.any_rescaled else "plain"
                )
            else:
                notes.append(
                    "mixed weights: float evaluation carries no digit certificate"
                )
        elif args.mode == "interval":
            p = max(64, args.precision or select_fraction_width(plan.bound_vars, target))
            res = evaluate(dag, plan, IntervalDomain(p))
            res.guaranteed_digits = iv_decimal_precision(res.value)
        else:
            res = evaluate(dag, plan, RationalDomain(args.max_rational_bits))
    except ResourceLimitExceeded as exc:
        return _fail("exact evaluation hit the resource ceiling: %s" % exc)
    wall = time.perf_counter() - started

    met = res.guaranteed_digits is not None and res.guaranteed_digits >= target
    report = {
        "instance": str(args.nnf),
        "mode": args.mode,
        "target_precision": target,
        "method": res.method,
        "value": _render_value(res.nominal, res.guaranteed_digits, target),
        "guaranteed_digits": _digits_json(res.guaranteed_digits),
        "guarantee_met": met,
        "exact": res.exact is not None,
        "overflow": res.overflow,
        "underflow": res.underflow,
        "op_count": res.op_count,
        "wall_seconds": round(wall, 6),
        "stages": _stage_json(res.stages),
    }
    if notes:
        report["note"] = "; ".join(notes)
    _emit_report(report, args.json)
    return 0 if met else 2


def cmd_bound(args) -> int:
    dag, wm = _load_instance(args.nnf, args.weights)
    plan = build_plan(wm, dag)
    try:
        units = error_bound(dag, plan)
    except BoundUnavailable as exc:
        return _fail(str(exc))
    floor = bound_digits_floor(args.precision, units)
    if args.json:
        print(
            json.dumps(
                {
                    "error_bound_units": units,
                    "precision": args.precision,
                    "digit_floor": round(floor, 4),
                },
                indent=2,
                sort_keys=True,
            )
        )
    else:
        print("error bound: %d units" % units)
        print("digit floor at p=%d: %.4f" % (args.precision, floor))
    return 0


def cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if args.family in WEIGHT_FAMILIES:
        if args.seed is None:
            return _fail("--seed is required for randomized families")
        wm = gen_weights(args.family, args.n, args.seed)
        path = out / ("%s-n%d-s%d.w" % (args.family, args.n, args.seed))
        path.write_text(render_weights(wm))
        written.append(path)
    elif args.family == "tau":
        dag, wm = gen_tau(args.n)
        stem = "tau-n%d" % args.n
        written.append(_write_pair(out, stem, dag, wm))
    elif args.family == "product":
        try:
            w = rat_from_text(args.w)
        except RationalParseError as exc:
            return _fail(str(exc))
        dag, wm = gen_product(args.n, w)
        stem = "product-n%d" % args.n
        written.append(_write_pair(out, stem, dag, wm))
    elif args.family == "ddnnf":
        if args.seed is None:
            return _fail("--seed is required for randomized families")
        dag = gen_random_ddnnf(args.n, args.nodes, args.seed)
        path = out / ("ddnnf-n%d-b%d-s%d.nnf" % (args.n, args.nodes, args.seed))
        path.write_text(render_nnf(dag))
        written.append(path)
    else:
        return _fail("unknown family %r" % args.family)
    for item in written:
        if isinstance(item, tuple):
            for p in item:
                print(p)
        else:
            print(item)
    return 0


def _write_pair(out: Path, stem: str, dag, wm):
    nnf_path = out / (stem + ".nnf")
    w_path = out / (stem + ".w")
    nnf_path.write_text(render_nnf(dag))
    w_path.write_text(render_weights(wm))
    return (nnf_path, w_path)


def cmd_check(args) -> int:
    dag, wm = _load_instance(args.nnf, args.weights)
    if args.precision < 2:
        return _fail("fraction width must be at least 2")
    plan = build_plan(wm, dag)

    if args.oracle == "enumerate":
        try:
            exact = model_enumerate(dag, wm)
        except EnumerationRefused as exc:
            return _fail(str(exc))
    else:
        try:
            exact = evaluate(dag, plan, RationalDomain(args.max_rational_bits)).value
        except ResourceLimitExceeded as exc:
            return _fail("oracle hit the resource ceiling: %s" % exc)

    p = args.precision
    if args.method == "double":
        res = evaluate(dag, plan, DoubleDomain())
    elif args.method == "erd":
        res = evaluate(dag, plan, ErdDomain())
    elif args.method == "float":
        res = evaluate(dag, plan, SoftFloatDomain(p))
    elif args.method == "interval":
        res = evaluate(dag, plan, IntervalDomain(max(64, p)))
        res.guaranteed_digits = iv_decimal_precision(res.value)
    else:
        res = evaluate(dag, plan, RationalDomain(args.max_rational_bits))

    if res.nominal is None:
        delta, digits = None, 0.0
    else:
        delta = approx_error(res.nominal, exact)
        digits = decimal_precision(res.nominal, exact)

    floor = None
    above = None
    if plan.all_nonnegative and args.method in ("erd", "float", "double"):
        c_mode = "rescaled" if plan.any_rescaled else "plain"
        if dag.meta.get("family") == "product":
            c_mode = "product"
        width = 53 if args.method in ("erd", "double") else p
        floor = digits_floor(width, plan.bound_vars, c_mode)
        above = digits >= floor

    scorecard = {
        "instance": str(args.nnf),
        "method": res.method,
        "oracle": args.oracle,
        "delta": None if delta is None else (0.0 if delta == 0 else float(delta)),
        "digits": _digits_json(digits),
        "bound_floor": None if floor is None else round(floor, 4),
        "above_bound": above,
        "estimated_digits": _digits_json(res.guaranteed_digits),
        "overflow": res.overflow,
        "underflow": res.underflow,
        "op_count": res.op_count,
    }
    if args.json:
        print(json.dumps(scorecard, indent=2, sort_keys=True))
    else:
        for key in (
            "instance",
            "method",
            "oracle",
            "delta",
            "digits",
            "bound_floor",
            "above_bound",
            "estimated_digits",
            "op_count",
        ):
            print("%-17s %s" % (key + ":", scorecard[key]))
        if res.overflow or res.underflow:
            print("range flags:      overflow=%s underflow=%s" % (res.overflow, res.underflow))
    return 0


def cmd_report(args) -> int:
    from .report import write_report

    targets = [float(t) for t in args.targets.split(",") if t]
    summary = write_report(
        Path(args.out),
        args.families.split(",") if args.families else list(WEIGHT_FAMILIES),
        args.per_family,
        args.max_vars,
        args.nodes,
        args.seed,
        targets,
        jobs=args.jobs,
    )
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_validate(args) -> int:
    dag, _ = _load_instance(args.nnf, None)
    rep = validate(dag)
    print(
        json.dumps(
            {
                "decomposable": rep.decomposable,
                "decision_form": rep.decision_form,
                "smooth": rep.smooth,
                "notes": rep.notes,
                "nodes": dag.size,
                "variables": dag.num_vars,
            },
            indent=2,
            sort_keys=True,
        )
    )
    return 0 if (rep.decomposable and rep.decision_form) else 2


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="surecount", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", help="count one instance at a target precision")
    c.add_argument("nnf")
    c.add_argument("weights", nargs="?")
    c.add_argument("--target-precision", type=float, default=30.0, metavar="D")
    c.add_argument("--mode", choices=MODES, default="hybrid")
    c.add_argument("--precision", type=int, help="fraction width for forced modes")
    c.add_argument("--max-rational-bits", type=int)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_count)

    b = sub.add_parser("bound", help="a-priori error bound for nonnegative weights")
    b.add_argument("nnf")
    b.add_argument("weights", nargs="?")
    b.add_argument("--precision", type=int, default=128)
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bound)

    g = sub.add_parser("generate", help="emit benchmark instances")
    g.add_argument("family", choices=list(WEIGHT_FAMILIES) + ["tau", "product", "ddnnf"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int)
    g.add_argument("--w", default="0.5", help="literal weight for product")
    g.add_argument("--nodes", type=int, default=60, help="node budget for ddnnf")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    k = sub.add_parser("check", help="precision scorecard against an oracle")
    k.add_argument("nnf")
    k.add_argument("weights", nargs="?")
    k.add_argument("--method", choices=("double", "erd", "float", "interval", "rational"),
                   default="float")
    k.add_argument("--precision", type=int, default=128)
    k.add_argument("--oracle", choices=("enumerate", "rational"), default="enumerate")
    k.add_argument("--max-rational-bits", type=int)
    k.add_argument("--json", action="store_true")
    k.set_defaults(func=cmd_check)

    r = sub.add_parser("report", help="corpus sweep: CSV plus figures")
    r.add_argument("--out", required=True)
    r.add_argument("--families", help="comma list, default all weight families")
    r.add_argument("--per-family", type=int, default=20)
    r.add_argument("--max-vars", type=int, default=10)
    r.add_argument("--nodes", type=int, default=40)
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--targets", default="1,15,30,70")
    r.add_argument("--jobs", type=int, default=1)
    r.set_defaults(func=cmd_report)

    v = sub.add_parser("validate", help="structural checks for a formula file")
    v.add_argument("nnf")
    v.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
