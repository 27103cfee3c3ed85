"""Command-line entry point.

Exit codes: 0 success, 1 usage or input error, 2 infeasible instance or a
method that ended without a plan.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from .analysis import gantt_csv, gantt_segments, savings_report
from .colgen import cg_bound_report
from .errors import HubflowError, InfeasibleError, SizeGuardError, SolveFailure
from .generator import PRESETS, generate_instance
from .io import load_instance, load_plan, save_instance, save_plan
from .nf import DELTA_GRID, LADDER_STEP, delta_ladder_ub, max_workers, nf_bound_report, solve_nf_lb
from .oracle import brute_force_optimal, greedy_baseline
from .plan import verify_plan
from .report import BoundReport, format_table, write_csv

log = logging.getLogger("hubflow")

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2
METHODS = ("nf", "cg", "greedy", "oracle")
DEFAULT_TIME_LIMIT = 60.0
SWEEP_FIELDS = ("delta", "lb_nf", "ub_nf", "ub_greedy", "gap_nf", "nf_delta_used")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 0:
        raise argparse.ArgumentTypeError("expected non-negative integers")
    return values


def _method_list(text: str) -> list[str]:
    methods = [m.strip().lower() for m in text.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise argparse.ArgumentTypeError(f"unknown method(s) {bad}; choose from {', '.join(METHODS)}")
    return methods


# running methods -----------------------------------------------------------


def run_method(inst, method: str, delta: int, ladder=None, time_limit: float = DEFAULT_TIME_LIMIT):
    """Returns ``(report, plan_or_None)``. Infeasibility and solver failures
    come back as a report with a note, never as an exception; only the
    oracle size guard propagates."""
    if method == "nf":
        try:
            report, plan, _ = nf_bound_report(inst, delta, ladder)
        except InfeasibleError as exc:
            return BoundReport("NF", note=str(exc)), None
        return report, plan
    if method == "cg":
        try:
            report, plan, _ = cg_bound_report(inst, delta, time_limit=time_limit, ip_time_limit=time_limit)
        except InfeasibleError as exc:
            return BoundReport("CG", note=str(exc)), None
        return report, plan
    if method == "greedy":
        t0 = time.perf_counter()
        try:
            plan = greedy_baseline(inst, delta)
        except SolveFailure as exc:
            return BoundReport("Greedy", ub_time=time.perf_counter() - t0, note=str(exc)), None
        return BoundReport("Greedy", ub=plan.total_cost, ub_time=time.perf_counter() - t0,
                           delta_used_for_ub=delta), plan
    if method == "oracle":
        t0 = time.perf_counter()
        try:
            res = brute_force_optimal(inst, delta)
        except InfeasibleError as exc:
            return BoundReport("Oracle", note=str(exc)), None
        dt = time.perf_counter() - t0
        return BoundReport("Oracle", lb=res.optimum, ub=res.optimum, lb_time=dt, ub_time=dt,
                           delta_used_for_ub=delta, converged=True), res.plan
    raise ValueError(f"unknown method {method!r}")


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# verbs -----------------------------------------------------------------------


def cmd_gen(args) -> int:
    params = PRESETS[args.preset]
    overrides = {
        "n_orders": args.orders,
        "n_hubs": args.hubs,
        "fleet_size": args.fleet,
        "flexibility": args.delta,
        "auto_cost_factor": args.auto_cost_factor,
    }
    params = replace(params, **{k: v for k, v in overrides.items() if v is not None})
    inst = generate_instance(params, args.seed)
    save_instance(inst, args.out)
    log.info("wrote %s: %d hubs, %d autonomous tasks", args.out, len(inst.hubs), len(inst.auto_tasks))
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    delta = inst.flexibility if args.delta is None else args.delta
    report, plan = run_method(inst, args.method, delta, args.ladder, args.time_limit_s)
    if plan is not None:
        check = verify_plan(plan, inst, delta)
        if not check.ok:
            raise AssertionError(f"emitted plan fails verification: {check.message}")
        if args.out:
            save_plan(plan, args.out)
    if args.format == "csv":
        text = write_csv([report.csv_row(Path(args.instance).stem)])
    else:
        text = report.to_json() + "\n"
    _emit(text, args.report)
    if report.note:
        print(report.note, file=sys.stderr)
    return EXIT_OK if plan is not None else EXIT_FAILED


def compare_reports(inst, methods, delta: int, ladder=None, time_limit: float = DEFAULT_TIME_LIMIT):
    def one(m):
        try:
            return run_method(inst, m, delta, ladder, time_limit)[0]
        except SizeGuardError as exc:
            return BoundReport(m.capitalize(), note=str(exc))

    workers = min(max_workers(), len(methods))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            reports = list(pool.map(one, methods))
    else:
        reports = [one(m) for m in methods]
    return reports


def lb_agreement_note(reports) -> str | None:
    by = {r.method: r for r in reports}
    nf, cg = by.get("NF"), by.get("CG")
    if not nf or not cg or nf.lb is None or cg.lb is None or not cg.converged:
        return None
    diff = cg.lb - nf.lb
    if abs(diff) <= 1:
        return None
    if diff > 0:
        return f"CG lower bound is above NF by {diff:.1f} units"
    return f"CG lower bound is BELOW NF by {-diff:.1f} units; one of the solvers is wrong"


def cmd_compare(args) -> int:
    inst = load_instance(args.instance)
    delta = inst.flexibility if args.delta is None else args.delta
    reports = compare_reports(inst, args.methods, delta, args.ladder, args.time_limit_s)
    name = Path(args.instance).stem
    rows = [r.csv_row(name) for r in reports]
    if args.format == "csv":
        text = write_csv(rows)
    else:
        text = json.dumps([{"instance": name, **r.to_dict()} for r in reports], indent=2) + "\n"
    if args.out:
        _emit(text, args.out)
        print(format_table(reports, name))
    else:
        sys.stdout.write(text)
        print(format_table(reports, name), file=sys.stderr)
    note = lb_agreement_note(reports)
    if note:
        print(note, file=sys.stderr)
    for r in reports:
        if r.note:
            print(f"{r.method}: {r.note}", file=sys.stderr)
    return EXIT_OK


def sweep_rows(inst, deltas):
    """One row per flexibility, ascending. The NF ladder at each value is
    the rung grid plus every swept value up to it, so ladders are nested;
    the greedy column keeps the best plan seen so far."""
    deltas = sorted(set(deltas))
    rows = []
    best_greedy = None
    cache = {}  # rungs repeat across rows
    for d in deltas:
        ladder = sorted(set(range(0, d + 1, LADDER_STEP)) | {x for x in deltas if x <= d} | {0})
        try:
            if d not in cache:
                cache[d] = solve_nf_lb(inst, d)
            lb = cache[d].lb
        except InfeasibleError:
            lb = None
        ub = used = None
        try:
            plan, rungs = delta_ladder_ub(inst, d, ladder, cache)
            ub = plan.total_cost
            used = min((r for r in rungs if r.status == "ok"), key=lambda r: (r.cost, r.delta)).delta
        except InfeasibleError:
            pass
        try:
            g = greedy_baseline(inst, d).total_cost
            best_greedy = g if best_greedy is None else min(best_greedy, g)
        except SolveFailure:
            pass
        gap_nf = None if lb is None or ub is None else (ub - lb) / lb
        rows.append({"delta": d, "lb_nf": lb, "ub_nf": ub, "ub_greedy": best_greedy,
                     "gap_nf": gap_nf, "nf_delta_used": used})
    return rows


def cmd_sweep(args) -> int:
    inst = load_instance(args.instance)
    rows = sweep_rows(inst, args.deltas)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=SWEEP_FIELDS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: "-" if v is None else (f"{v:.6f}" if k == "gap_nf" else v) for k, v in r.items()})
        text = buf.getvalue()
    else:
        text = json.dumps(rows, indent=2) + "\n"
    _emit(text, args.out)
    if args.out:
        for r in rows:
            gap = "-" if r["gap_nf"] is None else f"{100 * r['gap_nf']:.1f}%"
            print(f"delta={r['delta']:>4}  LB-NF={r['lb_nf']}  UB-NF={r['ub_nf']} ({gap})  UB-Greedy={r['ub_greedy']}")
    return EXIT_OK


def cmd_gantt(args) -> int:
    inst = load_instance(args.instance)
    plan = load_plan(args.plan, inst)
    _emit(gantt_csv(gantt_segments(plan, inst)), args.out)
    return EXIT_OK


def cmd_savings(args) -> int:
    inst = load_instance(args.instance)
    plan = load_plan(args.plan, inst)
    rep = savings_report(inst, plan, args.empty_mile_factor, args.auto_cost_factor)
    if args.format == "json":
        text = json.dumps(rep.to_dict(), indent=2) + "\n"
    else:
        d = rep.to_dict()
        fields = ("current_cost", "athn_cost", "savings_fraction", "empty_mile_factor", "auto_cost_factor")
        text = ",".join(fields) + "\n" + ",".join(f"{d[k]:.6f}" if isinstance(d[k], float) else str(d[k]) for k in fields) + "\n"
    _emit(text, args.out)
    return EXIT_OK


# parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hubflow", description="Truck scheduling between transfer hubs: bounds and plans.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a synthetic instance")
    g.add_argument("--preset", choices=sorted(PRESETS), default="n17")
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--orders", type=int)
    g.add_argument("--hubs", type=int)
    g.add_argument("--fleet", type=int)
    g.add_argument("--delta", type=int)
    g.add_argument("--auto-cost-factor", type=float)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    def common(sp, *, ladder=True):
        sp.add_argument("--instance", required=True)
        sp.add_argument("--delta", type=int, help="flexibility in minutes (default: from the instance)")
        if ladder:
            sp.add_argument("--ladder", type=_int_list, help="NF rungs, e.g. 0,30,60")
        sp.add_argument("--time-limit-s", type=float, default=DEFAULT_TIME_LIMIT)
        sp.add_argument("--format", choices=("csv", "json"), default="json")

    s = sub.add_parser("solve", help="run one method")
    common(s)
    s.add_argument("--method", choices=METHODS, required=True)
    s.add_argument("--out", help="plan JSON path")
    s.add_argument("--report", help="report path (default: stdout)")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("compare", help="bound table over several methods")
    common(c)
    c.add_argument("--methods", type=_method_list, default=["nf", "cg", "greedy"])
    c.add_argument("--out")
    c.set_defaults(func=cmd_compare, format="csv")

    w = sub.add_parser("sweep", help="NF and greedy across flexibilities")
    w.add_argument("--instance", required=True)
    w.add_argument("--deltas", type=_int_list, default=[d for d in DELTA_GRID if d > 0])
    w.add_argument("--format", choices=("csv", "json"), default="csv")
    w.add_argument("--out")
    w.set_defaults(func=cmd_sweep)

    t = sub.add_parser("gantt", help="export plan segments as CSV")
    t.add_argument("--instance", required=True)
    t.add_argument("--plan", required=True)
    t.add_argument("--out")
    t.set_defaults(func=cmd_gantt)

    v = sub.add_parser("savings", help="estimate savings over direct trucking")
    v.add_argument("--instance", required=True)
    v.add_argument("--plan", required=True)
    v.add_argument("--empty-mile-factor", type=float, default=0.25)
    v.add_argument("--auto-cost-factor", type=float)
    v.add_argument("--format", choices=("csv", "json"), default="json")
    v.add_argument("--out")
    v.set_defaults(func=cmd_savings)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except SizeGuardError as exc:
        print(f"hubflow: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleError, SolveFailure) as exc:
        print(f"hubflow: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (HubflowError, OSError, ValueError) as exc:
        print(f"hubflow: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
