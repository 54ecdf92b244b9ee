"""Command-line front end.

Exit codes: 0 success, 1 I/O or parse error, 2 no certified order
(not agreeable), 3 verification failure, 4 transform precondition.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import oracle, pfs_lp, transform, validate
from .documents import (
    SHORTCUTS,
    CriterionSpec,
    DocumentError,
    InstanceDocument,
    ScheduleDocument,
    dumps,
    loads_instance,
    loads_schedule,
    number_from_json,
    number_to_json,
    shortcut_criterion,
)
from .errors import (
    InfeasibleInput,
    NotAgreeable,
    OrderHypothesisViolated,
    PreconditionViolated,
    SchedulingError,
    TooLarge,
)
from .gantt import render_svg
from .model import Criterion, CriterionKind, evaluate, render_rational

EXIT_OK, EXIT_IO, EXIT_NOT_AGREEABLE, EXIT_VERIFY, EXIT_PRECONDITION = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message, code=EXIT_IO):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _write(text: str, path: Optional[str]):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from None


def _load_instance(path) -> InstanceDocument:
    return loads_instance(_read(path))


def _load_schedule(path) -> ScheduleDocument:
    return loads_schedule(_read(path))


def _parse_order(text):
    if text is None:
        return None
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise CliError(f"--order must be comma-separated job ids, got {text!r}") from None


def _criterion(args, doc: InstanceDocument, required=True) -> Optional[Criterion]:
    """--criterion wins over the document's criterion."""
    name = getattr(args, "criterion", None)
    due = getattr(args, "common_due", None)
    if name is None and doc.criterion is None:
        if required:
            raise CliError("no criterion: pass --criterion or add one to the instance document")
        return None
    if name is None:
        spec = doc.criterion
        if due is not None:
            spec = CriterionSpec(spec.kind, spec.functions, number_from_json(due, "--common-due"))
        return spec.resolve(doc.instance)
    if name == "wulj":
        if due is None and doc.criterion is not None:
            due = doc.criterion.common_due
        if due is None:
            raise CliError("criterion wulj needs --common-due")
        return CriterionSpec("wulj", None, number_from_json(due, "--common-due")).resolve(doc.instance)
    return shortcut_criterion(name, doc.instance)


def _completions_line(label, schedule):
    done = schedule.completion_times()
    return f"{label}: " + " ".join(f"C{j}={render_rational(done[j])}" for j in sorted(done))


def cmd_solve(args) -> int:
    doc = _load_instance(args.instance)
    crit = _criterion(args, doc)
    order = _parse_order(args.order)
    try:
        if crit.kind is CriterionKind.WEIGHTED_LATE_COMMON_DUE:
            if order is not None:
                raise CliError("--order is not supported for wulj")
            sol = pfs_lp.solve_common_due_late_jobs(doc.instance, crit.common_due)
        else:
            sol = pfs_lp.solve(doc.instance, crit, order, enumerate_cap=args.oracle_cap)
    except NotAgreeable as exc:
        a, b = exc.pair
        raise CliError(f"not agreeable: jobs {a} and {b}: {exc.reason}; "
                       f"pass --order to solve a fixed job order", EXIT_NOT_AGREEABLE) from None
    except TooLarge as exc:
        raise CliError(f"no certified order: {exc}; raise --oracle-cap or pass --order",
                       EXIT_NOT_AGREEABLE) from None
    except ValueError as exc:
        raise CliError(str(exc)) from None
    out = ScheduleDocument(sol.schedule, sol.value, tuple(sol.order), sol.certificate.case.name)
    _write(dumps(out), args.out)
    return EXIT_OK


def _verification(instance, schedule, order, flags):
    checks = {"feasible": validate.check_feasible(instance, schedule)}
    if checks["feasible"].ok:
        if flags.non_delay:
            checks["non_delay"] = validate.is_non_delay(instance, schedule)
        if flags.vertical:
            checks["vertical"] = validate.is_vertically_ordered(schedule, order)
        if flags.pfs:
            checks["pfs"] = validate.is_pfs_like(schedule, order)
    return checks


def cmd_verify(args) -> int:
    doc = _load_instance(args.instance)
    sched = _load_schedule(args.schedule)
    order = _parse_order(args.order) or sched.order
    checks = _verification(doc.instance, sched.schedule, order, args)
    ok = all(report.ok for report in checks.values())
    for name, report in checks.items():
        print(f"{name}: {'ok' if report.ok else 'FAILED'}", file=sys.stderr)
        for v in report.violations:
            print(f"  [{v.kind}] {v.message}", file=sys.stderr)
    skipped = [name for name in ("non_delay", "vertical", "pfs")
               if getattr(args, name) and name not in checks]
    for name in skipped:
        print(f"{name}: skipped (schedule is infeasible)", file=sys.stderr)
    body = {"ok": ok, "checks": {name: report.as_dict() for name, report in checks.items()},
            "skipped": skipped}
    _write(json.dumps(body, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_transform(args) -> int:
    doc = _load_instance(args.instance)
    sched = _load_schedule(args.schedule)
    instance, schedule = doc.instance, sched.schedule
    order = _parse_order(args.order) or sched.order
    extra = args.jobs
    if args.mode == "exchange":
        if len(extra) != 2:
            raise CliError("exchange needs two job ids: exchange J K")
    elif extra:
        raise CliError(f"mode {args.mode} takes no job ids")
    report = validate.check_feasible(instance, schedule)
    if not report.ok:
        raise CliError("schedule is not feasible: " + "; ".join(v.message for v in report.violations))
    try:
        if args.mode == "normalize":
            result, new_order = transform.left_shift_normalize(instance, schedule, order), order
        elif args.mode == "vertical":
            result, new_order = transform.vertical_order(schedule, instance.machines, order), order
        elif args.mode == "pfs":
            if order is None:
                order = transform.completion_order(instance, schedule)
            transform.check_order_hypothesis(instance, schedule, list(order))
            result, new_order = transform.to_pfs(instance, schedule, order)
        else:
            j, k = extra
            result, new_order = transform.exchange_pair(instance, schedule, j, k), None
    except (OrderHypothesisViolated, PreconditionViolated) as exc:
        raise CliError(f"precondition violated: {exc}", EXIT_PRECONDITION) from None
    except InfeasibleInput as exc:
        details = "; ".join(v.message for v in exc.report.violations) if exc.report else ""
        raise CliError(f"{exc}: {details}" if details else str(exc)) from None
    except ValueError as exc:
        raise CliError(str(exc)) from None
    print(_completions_line("before", schedule), file=sys.stderr)
    print(_completions_line("after", result), file=sys.stderr)
    if result == schedule:
        out = sched
    else:
        crit = _criterion(args, doc, required=False)
        value = None if crit is None else evaluate(instance, result, crit)
        out = ScheduleDocument(result, value, None if new_order is None else tuple(new_order), None)
    _write(dumps(out), args.out)
    return EXIT_OK


def cmd_gantt(args) -> int:
    doc = _load_instance(args.instance)
    sched = _load_schedule(args.schedule)
    _write(render_svg(doc.instance, sched.schedule), args.out or args.out_path)
    return EXIT_OK


def cmd_oracle(args) -> int:
    doc = _load_instance(args.instance)
    crit = _criterion(args, doc)
    try:
        if crit.kind is CriterionKind.WEIGHTED_LATE_COMMON_DUE:
            value, on_time = oracle.brute_force_late_jobs(doc.instance, crit.common_due,
                                                          cap=max(args.oracle_cap, 16))
            body = {"value": number_to_json(value), "on_time": sorted(on_time), "label": oracle.OPTIMAL}
        else:
            res = oracle.enumerate_orders_optimum(doc.instance, crit, cap=args.oracle_cap)
            body = {"value": number_to_json(res.value), "order": list(res.order), "label": res.label}
    except TooLarge as exc:
        raise CliError(f"{exc}; raise --oracle-cap") from None
    _write(json.dumps(body, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        config = oracle.GeneratorConfig(args.n, args.m, args.max_value, args.seed, args.agreeable)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    instance = oracle.random_instance(config)
    spec = None
    if args.criterion == "wulj":
        if args.common_due is None:
            raise CliError("criterion wulj needs --common-due")
        spec = CriterionSpec("wulj", None, number_from_json(args.common_due, "--common-due"))
    elif args.criterion is not None:
        spec = CriterionSpec(shortcut_criterion(args.criterion, instance).kind.value, args.criterion)
    _write(dumps(InstanceDocument(instance, spec)), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pfsched",
        description="Exact preemptive parallel-machine scheduling via PFS-like schedules.")
    sub = parser.add_subparsers(dest="command", required=True)
    criteria = sorted(SHORTCUTS) + ["wulj"]

    def common(p, criterion=True):
        p.add_argument("--out", help="write the result here instead of standard output")
        p.add_argument("--order", help="job order as comma-separated ids, e.g. 2,1,3")
        if criterion:
            p.add_argument("--criterion", choices=criteria,
                           help="named criterion; overrides the instance document")
            p.add_argument("--common-due", help="common due date for wulj (integer or a/b)")

    p = sub.add_parser("solve", help="optimal schedule as a schedule document")
    p.add_argument("instance")
    common(p)
    p.add_argument("--oracle-cap", type=int, default=8,
                   help="largest n for which equal-release orders may be found by enumeration")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check feasibility and structural properties")
    p.add_argument("instance")
    p.add_argument("schedule")
    common(p, criterion=False)
    p.add_argument("--non-delay", action="store_true")
    p.add_argument("--vertical", action="store_true")
    p.add_argument("--pfs", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("transform", help="normalize, verticalize, make PFS-like or exchange two jobs")
    p.add_argument("instance")
    p.add_argument("schedule")
    p.add_argument("mode", choices=["normalize", "vertical", "pfs", "exchange"])
    p.add_argument("jobs", nargs="*", type=int, help="J K for exchange")
    common(p)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("gantt", help="render a schedule as SVG")
    p.add_argument("instance")
    p.add_argument("schedule")
    p.add_argument("out_path", nargs="?", help="SVG file (default: standard output)")
    p.add_argument("--out", help="same as OUT_PATH")
    p.set_defaults(func=cmd_gantt)

    p = sub.add_parser("oracle", help="brute-force reference value for small instances")
    p.add_argument("instance")
    common(p)
    p.add_argument("--oracle-cap", type=int, default=8, help="largest n to enumerate")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("generate", help="random instance document")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--max-value", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--agreeable", action="store_true", help="co-sort release and processing times")
    p.add_argument("--criterion", choices=criteria)
    p.add_argument("--common-due")
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"pfsched: {exc}", file=sys.stderr)
        return exc.code
    except DocumentError as exc:
        print(f"pfsched: {exc}", file=sys.stderr)
        return EXIT_IO
    except SchedulingError as exc:
        print(f"pfsched: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
