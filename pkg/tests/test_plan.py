import pytest
from conftest import build, line_matrix, scaled_instance

from hubflow.model import MILE
from hubflow.nf import delta_ladder_ub
from hubflow.plan import Check, Plan, Route, make_plan, relocation_cost, route_cost, verify_plan


def good_plan(chain3):
    return make_plan([Route((0, 1, 2), (0, 160, 320))], chain3)


def test_costs(chain3):
    assert route_cost((0, 1, 2), chain3) == 300 * MILE
    assert relocation_cost((0, 1, 2), chain3) == 0
    assert route_cost((0, 2), chain3) == 300 * MILE
    assert relocation_cost((2, 0), chain3) == 300 * MILE


def test_feasible_plan_passes(chain3):
    assert verify_plan(good_plan(chain3), chain3).ok


def test_start_after_window(chain3):
    plan = make_plan([Route((0, 1, 2), (0, 160, 321))], chain3)
    rep = verify_plan(plan, chain3)
    assert not rep.ok and rep.failed is Check.WINDOW


def test_window_uses_given_flexibility(chain3):
    plan = make_plan([Route((0, 1, 2), (0, 160, 380))], chain3)
    assert verify_plan(plan, chain3, flexibility=60).ok
    assert verify_plan(plan, chain3, flexibility=59).failed is Check.WINDOW


def test_missing_task(chain3):
    plan = make_plan([Route((0, 1), (0, 160))], chain3)
    assert verify_plan(plan, chain3).failed is Check.COVERAGE


def test_duplicate_task(chain3):
    plan = make_plan([Route((0, 1, 2), (0, 160, 320)), Route((1,), (160,))], chain3)
    assert verify_plan(plan, chain3).failed is Check.COVERAGE


def test_foreign_task(chain3):
    plan = Plan((Route((0, 1, 2, 7), (0, 160, 320, 500), 0),), 0, 0)
    rep = verify_plan(plan, chain3)
    assert rep.failed is Check.COVERAGE


def test_too_many_routes(chain3):
    one_truck = build(line_matrix([0, 100, 200, 300]), [(0, 1, 0), (1, 2, 160), (2, 3, 320)], fleet=1)
    plan = make_plan([Route((0,), (0,)), Route((1, 2), (160, 320))], one_truck)
    assert verify_plan(plan, one_truck).failed is Check.FLEET


def test_overlap(chain3):
    inst = build(line_matrix([0, 100, 200, 300]), [(0, 1, 0), (1, 2, 159), (2, 3, 320)], delta=0)
    plan = make_plan([Route((0, 1, 2), (0, 159, 320))], inst)
    rep = verify_plan(plan, inst)
    assert rep.failed is Check.OVERLAP and "ready only at 160" in rep.message


def test_cost_tamper(chain3):
    plan = good_plan(chain3)
    bad = Plan(plan.routes, plan.total_cost + 1, plan.empty_cost)
    assert verify_plan(bad, chain3).failed is Check.COST
    wrong_route = Plan((Route((0, 1, 2), (0, 160, 320), 5),), plan.total_cost, plan.empty_cost)
    assert verify_plan(wrong_route, chain3).failed is Check.COST


def test_unscheduled_route_fails_window(chain3):
    plan = make_plan([Route((0, 1, 2))], chain3)
    assert verify_plan(plan, chain3).failed is Check.WINDOW


def test_first_failing_check_in_order(chain3):
    # both a coverage and a window problem: coverage is reported
    plan = make_plan([Route((0, 1), (0, 999))], chain3)
    assert verify_plan(plan, chain3).failed is Check.COVERAGE


def test_make_plan_drops_empty_routes(chain3):
    plan = make_plan([Route(()), Route((0, 1, 2), (0, 160, 320))], chain3)
    assert plan.n_vehicles == 1 and len(plan.routes) == 1


def test_route_length_mismatch():
    with pytest.raises(ValueError):
        Route((1, 2), (0,))


def test_ladder_plans_verify_on_generated():
    inst = scaled_instance(5, 80)
    plan, _ = delta_ladder_ub(inst, 60)
    assert verify_plan(plan, inst).ok
