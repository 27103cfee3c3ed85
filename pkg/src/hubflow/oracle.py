"""Exhaustive optimum for tiny instances and a greedy scheduling baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InfeasibleError, SizeGuardError, SolveFailure
from .graph import time_window
from .model import Instance, Task, service_cost, task_duration
from .plan import Plan, Route, make_plan, verify_plan

ORACLE_MAX_TASKS = 9


@dataclass(frozen=True)
class OracleResult:
    optimum: int
    plan: Plan
    nodes_explored: int


class _Schedule:
    """Earliest-start arithmetic for one flexibility."""

    def __init__(self, inst: Instance, delta: int):
        self.inst = inst
        self.delta = delta

    def window(self, t: Task):
        return time_window(t, self.delta)

    def ready(self, prev: Task, start: int, nxt: Task) -> int:
        return start + task_duration(prev, self.inst) + self.inst.time(prev.dest, nxt.origin)

    def starts(self, seq) -> list[int] | None:
        out, prev = [], None
        for t in seq:
            lo, hi = self.window(t)
            s = lo if prev is None else max(lo, self.ready(prev, out[-1], t))
            if s > hi:
                return None
            out.append(s)
            prev = t
        return out

    def cost(self, seq) -> int:
        c = sum(service_cost(t, self.inst) for t in seq)
        return c + sum(self.inst.dist(a.dest, b.origin) for a, b in zip(seq, seq[1:]))


def brute_force_optimal(inst: Instance, delta: int | None = None, prune: bool = True) -> OracleResult:
    """Minimum-cost plan by depth-first insertion of tasks (in pickup order)
    into every position of every route, or into a new route while the fleet
    allows. ``prune=False`` disables the cost bound, leaving only the
    time-feasibility cut, which is exact because removing a task never
    delays the rest of a route under the triangle inequality."""
    delta = inst.flexibility if delta is None else delta
    tasks = sorted(inst.auto_tasks, key=lambda t: (t.pickup_time, t.id))
    if len(tasks) > ORACLE_MAX_TASKS:
        raise SizeGuardError(f"oracle handles at most {ORACLE_MAX_TASKS} tasks, got {len(tasks)}")
    sch = _Schedule(inst, delta)
    K = inst.fleet_size
    best = [math.inf, None]
    nodes = 0

    def dfs(k: int, routes: list[list[Task]], costs: list[int]):
        nonlocal nodes
        nodes += 1
        total = sum(costs)
        if prune and total >= best[0]:
            return
        if k == len(tasks):
            if total < best[0]:
                best[0], best[1] = total, [list(r) for r in routes]
            return
        t = tasks[k]
        for ri, r in enumerate(routes):
            old = costs[ri]
            for pos in range(len(r) + 1):
                r.insert(pos, t)
                if sch.starts(r) is not None:
                    costs[ri] = sch.cost(r)
                    dfs(k + 1, routes, costs)
                    costs[ri] = old
                del r[pos]
        if len(routes) < K and sch.starts([t]) is not None:
            routes.append([t])
            costs.append(service_cost(t, inst))
            dfs(k + 1, routes, costs)
            routes.pop()
            costs.pop()

    dfs(0, [], [])
    if best[1] is None:
        raise InfeasibleError(f"no plan covers all {len(tasks)} tasks with {K} vehicles at delta={delta}")
    plan = make_plan([Route(tuple(t.id for t in r), tuple(sch.starts(r))) for r in best[1]], inst)
    assert plan.total_cost == best[0]
    return OracleResult(plan.total_cost, plan, nodes)


def greedy_baseline(inst: Instance, delta: int | None = None) -> Plan:
    """Tasks in pickup order, each appended to the feasible route with the
    least added relocation (ties: lowest route index), else a new route.
    Raises SolveFailure once a task fits nowhere and the fleet is used up."""
    delta = inst.flexibility if delta is None else delta
    sch = _Schedule(inst, delta)
    routes: list[list[Task]] = []
    starts: list[list[int]] = []
    for t in sorted(inst.auto_tasks, key=lambda t: (t.pickup_time, t.id)):
        lo, hi = sch.window(t)
        choice = None
        for ri, r in enumerate(routes):
            s = max(lo, sch.ready(r[-1], starts[ri][-1], t))
            if s > hi:
                continue
            added = inst.dist(r[-1].dest, t.origin)
            if choice is None or added < choice[0]:
                choice = (added, ri, s)
        if choice is not None:
            _, ri, s = choice
            routes[ri].append(t)
            starts[ri].append(s)
        elif len(routes) < inst.fleet_size:
            routes.append([t])
            starts.append([lo])
        else:
            raise SolveFailure(f"fleet of {inst.fleet_size} exhausted at task {t.id}")
    plan = make_plan([Route(tuple(x.id for x in r), tuple(s)) for r, s in zip(routes, starts)], inst)
    report = verify_plan(plan, inst, delta)
    assert report.ok, report.message
    return plan
