"""Routes, plans, and the independent plan checker."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .model import Instance, service_cost, task_duration


@dataclass(frozen=True)
class Route:
    tasks: tuple[int, ...]
    start_times: tuple[int, ...] | None = None
    cost: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        if self.start_times is not None:
            object.__setattr__(self, "start_times", tuple(self.start_times))
            if len(self.start_times) != len(self.tasks):
                raise ValueError("start_times and tasks differ in length")


@dataclass(frozen=True)
class Plan:
    routes: tuple[Route, ...]
    total_cost: int
    empty_cost: int

    def __post_init__(self):
        object.__setattr__(self, "routes", tuple(self.routes))

    @property
    def n_vehicles(self) -> int:
        return sum(1 for r in self.routes if r.tasks)


def relocation_cost(task_ids, inst: Instance) -> int:
    tb = inst.task_by_id
    return sum(inst.dist(tb[a].dest, tb[b].origin) for a, b in zip(task_ids, task_ids[1:]))


def route_cost(task_ids, inst: Instance) -> int:
    """Loaded plus empty distance of a task sequence."""
    tb = inst.task_by_id
    return sum(service_cost(tb[t], inst) for t in task_ids) + relocation_cost(task_ids, inst)


def make_plan(routes, inst: Instance) -> Plan:
    """Assemble a Plan, recomputing every route cost from the instance."""
    routes = [
        Route(r.tasks, r.start_times, route_cost(r.tasks, inst)) for r in routes if r.tasks
    ]
    return Plan(
        tuple(routes),
        sum(r.cost for r in routes),
        sum(relocation_cost(r.tasks, inst) for r in routes),
    )


class Check(str, Enum):
    COVERAGE = "a:coverage"
    FLEET = "b:fleet"
    WINDOW = "c:window"
    OVERLAP = "d:overlap"
    COST = "e:cost"


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    failed: Check | None = None
    message: str = ""

    def __bool__(self):
        return self.ok


def _fail(check, message):
    return VerificationReport(False, check, message)


def verify_plan(plan: Plan, inst: Instance, flexibility: int | None = None) -> VerificationReport:
    """Check a plan against the instance; reports the first violated check.

    Checks run in a fixed order over the whole plan: coverage, fleet size,
    time windows, no-overlap between consecutive tasks, reported costs.
    """
    delta = inst.flexibility if flexibility is None else flexibility
    tb = inst.task_by_id
    routes = [r for r in plan.routes if r.tasks]

    seen = Counter(t for r in routes for t in r.tasks)
    expected = {t.id for t in inst.auto_tasks}
    for tid, n in seen.items():
        if tid not in expected:
            return _fail(Check.COVERAGE, f"task {tid} is not an autonomous task of the instance")
        if n > 1:
            return _fail(Check.COVERAGE, f"task {tid} covered {n} times")
    missing = expected - seen.keys()
    if missing:
        return _fail(Check.COVERAGE, f"tasks not covered: {sorted(missing)[:10]}")

    if len(routes) > inst.fleet_size:
        return _fail(Check.FLEET, f"{len(routes)} routes exceed fleet size {inst.fleet_size}")

    for k, r in enumerate(routes):
        if r.start_times is None:
            return _fail(Check.WINDOW, f"route {k} has no start times")
        for tid, s in zip(r.tasks, r.start_times):
            p = tb[tid].pickup_time
            if not max(0, p - delta) <= s <= p + delta:
                return _fail(
                    Check.WINDOW, f"task {tid} starts at {s}, window [{max(0, p - delta)}, {p + delta}]"
                )

    for k, r in enumerate(routes):
        for i in range(len(r.tasks) - 1):
            t, u = tb[r.tasks[i]], tb[r.tasks[i + 1]]
            ready = r.start_times[i] + task_duration(t, inst) + inst.time(t.dest, u.origin)
            if ready > r.start_times[i + 1]:
                return _fail(
                    Check.OVERLAP,
                    f"route {k}: task {u.id} starts at {r.start_times[i + 1]} "
                    f"but the truck is ready only at {ready}",
                )

    for k, r in enumerate(routes):
        if r.cost != route_cost(r.tasks, inst):
            return _fail(Check.COST, f"route {k} reports cost {r.cost}, actual {route_cost(r.tasks, inst)}")
    total = sum(route_cost(r.tasks, inst) for r in routes)
    empty = sum(relocation_cost(r.tasks, inst) for r in routes)
    if plan.total_cost != total or plan.empty_cost != empty:
        return _fail(
            Check.COST,
            f"plan reports ({plan.total_cost}, {plan.empty_cost}), actual ({total}, {empty})",
        )
    return VerificationReport(True)
