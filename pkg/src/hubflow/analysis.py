"""Gantt segments of a plan and the savings estimate against direct trucking."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass

from .errors import ValidationError
from .model import MILE, Instance, Leg, service_cost, task_duration
from .orders import orders_from_tasks
from .plan import Plan, verify_plan

GANTT_FIELDS = ("row", "kind", "task_id", "start", "end")


@dataclass(frozen=True)
class Segment:
    row: int
    kind: str  # "task" or "relocation"
    task_id: int | None
    start: int
    end: int


def gantt_segments(plan: Plan, inst: Instance) -> list[Segment]:
    """One row per route: each task, then the drive to the next task's
    origin. Relocations of zero length are left out."""
    tb = inst.task_by_id
    out = []
    for row, r in enumerate(plan.routes):
        if r.start_times is None:
            raise ValidationError(f"route {row} has no start times")
        for k, (tid, s) in enumerate(zip(r.tasks, r.start_times)):
            if tid not in tb:
                raise ValidationError(f"plan task {tid} is not in the instance")
            t = tb[tid]
            end = s + task_duration(t, inst)
            out.append(Segment(row, "task", tid, s, end))
            if k + 1 < len(r.tasks):
                nxt = tb.get(r.tasks[k + 1])
                if nxt is None:
                    raise ValidationError(f"plan task {r.tasks[k + 1]} is not in the instance")
                drive = inst.time(t.dest, nxt.origin)
                if drive > 0:
                    out.append(Segment(row, "relocation", None, end, end + drive))
    return out


def gantt_csv(segments) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GANTT_FIELDS)
    for s in segments:
        w.writerow((s.row, s.kind, "" if s.task_id is None else s.task_id, s.start, s.end))
    return buf.getvalue()


@dataclass(frozen=True)
class SavingsReport:
    current_cost: float  # miles
    athn_cost: float  # miles
    empty_mile_factor: float
    auto_cost_factor: float

    @property
    def savings_fraction(self) -> float:
        return 1.0 - self.athn_cost / self.current_cost

    def to_dict(self) -> dict:
        d = asdict(self)
        d["savings_fraction"] = self.savings_fraction
        d["model"] = "estimate: every order is a direct trip with an empty return"
        return d


def savings_report(inst: Instance, plan: Plan, empty_mile_factor: float = 0.25,
                   auto_cost_factor: float | None = None) -> SavingsReport:
    """Cost model, all in miles.

    current: each order driven directly, then driven back empty.
    network: first and last miles at the conventional rate plus
    ``empty_mile_factor`` of empty driving, and the plan's autonomous miles
    (loaded and empty) weighted by ``auto_cost_factor``.
    """
    report = verify_plan(plan, inst)
    if not report.ok:
        raise ValidationError(f"plan does not fit the instance: {report.message}")
    factor = inst.auto_cost_factor if auto_cost_factor is None else auto_cost_factor
    current = sum(2 * inst.dist(o.pickup_loc, o.dropoff_loc) for o in orders_from_tasks(inst))
    if current == 0:
        raise ValidationError("instance has no order miles")
    manual = sum(service_cost(t, inst) for t in inst.tasks if t.leg is not Leg.AUTONOMOUS)
    athn = manual * (1 + empty_mile_factor) + plan.total_cost * factor
    return SavingsReport(current / MILE, athn / MILE, empty_mile_factor, factor)
