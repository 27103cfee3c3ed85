import csv
import io

import pytest
from conftest import line_matrix, scaled_instance

from hubflow.analysis import GANTT_FIELDS, gantt_csv, gantt_segments, savings_report
from hubflow.errors import ValidationError
from hubflow.model import MILE, Instance, Leg, Location, Task
from hubflow.nf import delta_ladder_ub
from hubflow.plan import Plan, Route, make_plan


def two_leg_instance():
    # pickup site 0, hubs 1 and 2, dropoff site 3
    m = line_matrix([0, 20, 320, 340])
    locs = (Location(0, False), Location(1, True), Location(2, True), Location(3, False))
    tasks = (
        Task(0, 0, 1, 0, Leg.FIRST_MILE, 0),
        Task(1, 1, 2, 80, Leg.AUTONOMOUS, 0),
        Task(2, 2, 3, 440, Leg.LAST_MILE, 0),
    )
    return Instance(locs, m, tasks, 1, 0, 30, 10080, 0.5)


def test_gantt_rows(chain3):
    plan = make_plan([Route((0, 2), (0, 320)), Route((1,), (160,))], chain3)
    segs = gantt_segments(plan, chain3)
    kinds = [(s.row, s.kind, s.task_id, s.start, s.end) for s in segs]
    assert kinds == [
        (0, "task", 0, 0, 160),
        (0, "relocation", None, 160, 260),
        (0, "task", 2, 320, 480),
        (1, "task", 1, 160, 320),
    ]
    rows = list(csv.reader(io.StringIO(gantt_csv(segs))))
    assert tuple(rows[0]) == GANTT_FIELDS and rows[2][2] == ""


def test_gantt_needs_schedule(chain3):
    with pytest.raises(ValidationError):
        gantt_segments(make_plan([Route((0, 1, 2))], chain3), chain3)
    with pytest.raises(ValidationError):
        gantt_segments(Plan((Route((0, 9), (0, 500)),), 0, 0), chain3)


def test_savings_arithmetic():
    inst = two_leg_instance()
    plan = make_plan([Route((1,), (80,))], inst)
    rep = savings_report(inst, plan, empty_mile_factor=0.25)
    assert rep.current_cost == pytest.approx(2 * 340)
    # first/last 20 mi each at 1.25, autonomous 300 mi at 0.5
    assert rep.athn_cost == pytest.approx(40 * 1.25 + 300 * 0.5)
    assert rep.savings_fraction == pytest.approx(1 - 200 / 680)
    assert savings_report(inst, plan, auto_cost_factor=1.0).athn_cost == pytest.approx(350)
    assert "estimate" in rep.to_dict()["model"]


def test_savings_rejects_foreign_plan(chain3):
    with pytest.raises(ValidationError):
        savings_report(two_leg_instance(), make_plan([Route((0, 1, 2), (0, 160, 320))], chain3))


def test_savings_on_generated():
    inst = scaled_instance(1, 60)
    plan, _ = delta_ladder_ub(inst, 60)
    rep = savings_report(inst, plan)
    assert 0 < rep.savings_fraction < 1
    assert rep.current_cost > rep.athn_cost > plan.total_cost * inst.auto_cost_factor / MILE
