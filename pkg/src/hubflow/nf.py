"""Network-flow relaxation: lower bounds, route extraction, and repaired plans.

The vehicle-flow model without subtour and time constraints is a min-cost
flow on the task graph with every task split into an in-node and an
out-node joined by an arc that must carry exactly one unit. Its optimum is
a lower bound at the flexibility the graph was built with. Routes read off
the flow can be scheduled at earliest start times; if that works for a
larger target flexibility the result is a feasible plan.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, RepairFailure
from .flow import FlowNetwork, FlowSolution, solve_min_cost_flow
from .graph import TaskGraph, build_graph, time_window
from .model import Instance
from .plan import Plan, Route, make_plan
from .report import BoundReport

SRC_NODE, SNK_NODE = 0, 1
DELTA_GRID = (0, 30, 60, 90, 120)
LADDER_STEP = 10  # minutes between ladder rungs


def max_workers() -> int:
    try:
        return max(1, int(os.environ.get("HUBFLOW_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True, eq=False)
class NfModel:
    """Node 0 is the source, 1 the sink, task i is split into 2+2i / 3+2i.

    Arc blocks, in order: source->task (n), task service (n),
    task->task (one per graph arc), task->sink (n), source->sink bypass (1).
    """

    graph: TaskGraph
    network: FlowNetwork
    fleet_size: int

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def task_arcs(self) -> slice:
        return slice(2 * self.n, 2 * self.n + len(self.graph.tail))

    @property
    def sink_arcs(self) -> slice:
        s = 2 * self.n + len(self.graph.tail)
        return slice(s, s + self.n)


def build_nf_model(g: TaskGraph, fleet_size: int) -> NfModel:
    n = g.n
    idx = np.arange(n, dtype=np.int64)
    t_in, t_out = 2 + 2 * idx, 3 + 2 * idx
    zeros, ones = np.zeros(n, np.int64), np.ones(n, np.int64)
    n_tt = len(g.tail)
    tail = np.concatenate([zeros + SRC_NODE, t_in, t_out[g.tail], t_out, [SRC_NODE]])
    head = np.concatenate([t_in, t_out, t_in[g.head], zeros + SNK_NODE, [SNK_NODE]])
    lower = np.concatenate([zeros, ones, np.zeros(n_tt, np.int64), zeros, [0]])
    upper = np.concatenate([ones, ones, np.ones(n_tt, np.int64), ones, [fleet_size]])
    cost = np.concatenate([zeros, g.service, g.reloc, zeros, [0]])
    supply = np.zeros(2 + 2 * n, np.int64)
    supply[SRC_NODE], supply[SNK_NODE] = fleet_size, -fleet_size
    net = FlowNetwork(2 + 2 * n, tail, head, lower, upper, cost, supply)
    return NfModel(g, net, fleet_size)


@dataclass(frozen=True, eq=False)
class NfSolution:
    lb: int
    flow: FlowSolution
    model: NfModel


def solve_nf(g: TaskGraph, fleet_size: int) -> NfSolution:
    model = build_nf_model(g, fleet_size)
    try:
        sol = solve_min_cost_flow(model.network)
    except InfeasibleError as exc:
        raise InfeasibleError(
            f"flow relaxation at delta={g.delta} is infeasible with {fleet_size} vehicles",
            certificate=exc.certificate,
        ) from exc
    return NfSolution(sol.objective, sol, model)


def solve_nf_lb(inst: Instance, delta: int) -> NfSolution:
    """Exact optimum of the flow relaxation at flexibility ``delta``."""
    return solve_nf(build_graph(inst, delta), inst.fleet_size)


@dataclass(frozen=True)
class Cycle:
    tasks: tuple[int, ...]
    cost: int


def extract_routes(sol: NfSolution) -> tuple[list[Route], list[Cycle]]:
    """Split the unit flow into source-sink routes and leftover cycles.

    Routes are read in the order of the source arcs, so output is
    deterministic. Route and cycle costs sum to the flow objective.
    """
    model, flow = sol.model, sol.flow.flow
    g = model.graph
    n = g.n
    succ = np.full(n, -1, dtype=np.int64)
    used = flow[model.task_arcs] > 0
    succ[g.tail[used]] = g.head[used]
    succ_cost = np.zeros(n, dtype=np.int64)
    succ_cost[g.tail[used]] = g.reloc[used]
    starts = np.flatnonzero(flow[:n] > 0)

    seen = np.zeros(n, dtype=bool)
    ids = [t.id for t in g.tasks]
    routes = []
    for s in starts.tolist():
        seq, cost, v = [], 0, s
        while v >= 0:
            seen[v] = True
            seq.append(ids[v])
            cost += int(g.service[v]) + int(succ_cost[v])
            v = int(succ[v])
        routes.append(Route(tuple(seq), None, cost))
    cycles = []
    for s in np.flatnonzero(~seen).tolist():
        if seen[s]:
            continue
        seq, cost, v = [], 0, s
        while not seen[v]:
            seen[v] = True
            seq.append(ids[v])
            cost += int(g.service[v]) + int(succ_cost[v])
            v = int(succ[v])
        cycles.append(Cycle(tuple(seq), cost))
    return routes, cycles


def earliest_starts(task_ids, inst: Instance, delta: int) -> list[int]:
    """Earliest-start schedule of one route; raises RepairFailure on the
    first task whose window closes before the truck can get there."""
    tb = inst.task_by_id
    starts = []
    prev = None
    for tid in task_ids:
        t = tb[tid]
        lo, hi = time_window(t, delta)
        s = lo
        if prev is not None:
            pt, ps = prev
            ready = ps + inst.time(pt.origin, pt.dest) + 2 * inst.service_time + inst.time(pt.dest, t.origin)
            s = max(lo, ready)
        if s > hi:
            raise RepairFailure(f"task {tid} cannot start before {s}, window closes at {hi}", task=tid)
        starts.append(s)
        prev = (t, s)
    return starts


def repair_schedule(routes, inst: Instance, target_delta: int) -> Plan:
    """Attach earliest start times at ``target_delta`` to every route."""
    out = []
    for k, r in enumerate(routes):
        try:
            starts = earliest_starts(r.tasks, inst, target_delta)
        except RepairFailure as exc:
            raise RepairFailure(f"route {k}: {exc}", route=k, task=exc.task) from None
        out.append(Route(r.tasks, tuple(starts), r.cost))
    return make_plan(out, inst)


def default_ladder(delta: int) -> list[int]:
    """Every ``LADDER_STEP`` minutes from 0 up to ``delta``, plus ``delta // 2``
    and ``delta``. Ladders for different targets are nested on the grid."""
    return sorted(set(range(0, delta + 1, LADDER_STEP)) | {delta // 2, delta})


@dataclass
class Rung:
    delta: int
    status: str  # "ok", "cycles", "late", "infeasible"
    lb: int | None = None
    cost: int | None = None
    seconds: float = 0.0
    plan: Plan | None = None
    detail: str = ""


def _run_rung(inst: Instance, target: int, delta: int, cache: dict | None) -> Rung:
    t0 = time.perf_counter()
    try:
        if cache is not None and delta in cache:
            sol = cache[delta]
        else:
            sol = solve_nf_lb(inst, delta)
            if cache is not None:
                cache[delta] = sol
    except InfeasibleError as exc:
        return Rung(delta, "infeasible", seconds=time.perf_counter() - t0, detail=str(exc))
    routes, cycles = extract_routes(sol)
    if cycles:
        return Rung(delta, "cycles", sol.lb, seconds=time.perf_counter() - t0,
                    detail=f"{len(cycles)} cycle(s)")
    try:
        plan = repair_schedule(routes, inst, target)
    except RepairFailure as exc:
        return Rung(delta, "late", sol.lb, seconds=time.perf_counter() - t0, detail=str(exc))
    return Rung(delta, "ok", sol.lb, plan.total_cost, time.perf_counter() - t0, plan)


def delta_ladder_ub(inst: Instance, delta: int, ladder=None, cache: dict | None = None):
    """Best repaired plan over the rungs of ``ladder`` (all <= ``delta``).

    Returns ``(plan, rungs)``; the plan has minimum cost, ties going to the
    lower rung. Raises InfeasibleError only when no rung yields a plan,
    which with a zero rung means the zero-flexibility relaxation itself is
    infeasible.
    """
    ladder = default_ladder(delta) if ladder is None else sorted(set(ladder))
    if not ladder or ladder[0] != 0 or ladder[-1] > delta:
        raise ValueError(f"ladder must contain 0 and stay within [0, {delta}]: {ladder}")
    workers = min(max_workers(), len(ladder))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rungs = list(pool.map(lambda d: _run_rung(inst, delta, d, cache), ladder))
    else:
        rungs = [_run_rung(inst, delta, d, cache) for d in ladder]
    ok = [r for r in rungs if r.status == "ok"]
    if not ok:
        raise InfeasibleError(f"no rung of {ladder} produced a feasible plan")
    best = min(ok, key=lambda r: (r.cost, r.delta))
    return best.plan, rungs


def nf_bound_report(inst: Instance, delta: int | None = None, ladder=None):
    """Lower bound at ``delta`` plus the ladder upper bound; returns
    ``(report, plan, rungs)``. ``plan`` is None if no rung succeeded."""
    delta = inst.flexibility if delta is None else delta
    t0 = time.perf_counter()
    lb_sol = solve_nf_lb(inst, delta)
    lb_time = time.perf_counter() - t0
    t1 = time.perf_counter()
    try:
        plan, rungs = delta_ladder_ub(inst, delta, ladder, cache={delta: lb_sol})
    except InfeasibleError as exc:
        report = BoundReport("NF", lb=lb_sol.lb, lb_time=lb_time,
                             ub_time=time.perf_counter() - t1, note=str(exc))
        return report, None, []
    best = min((r for r in rungs if r.status == "ok"), key=lambda r: (r.cost, r.delta))
    report = BoundReport(
        "NF",
        lb=lb_sol.lb,
        ub=plan.total_cost,
        lb_time=lb_time,
        ub_time=time.perf_counter() - t1,
        delta_used_for_ub=best.delta,
    )
    return report, plan, rungs
