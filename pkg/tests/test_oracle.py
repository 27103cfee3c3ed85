import pytest
from conftest import build, line_matrix, scaled_instance, tiny_instance
from oracles import partition_ip_value

from hubflow.errors import InfeasibleError, SizeGuardError, SolveFailure
from hubflow.model import MILE
from hubflow.oracle import ORACLE_MAX_TASKS, brute_force_optimal, greedy_baseline
from hubflow.plan import verify_plan


def test_chain_optimum(chain3):
    res = brute_force_optimal(chain3)
    assert res.optimum == 300 * MILE
    assert res.plan.total_cost == res.optimum
    assert verify_plan(res.plan, chain3).ok
    assert res.nodes_explored > 0


def test_cheaper_to_split_than_relocate():
    # two tasks far apart in space: one truck would relocate 500 mi
    m = line_matrix([0, 10, 510, 520])
    inst = build(m, [(0, 1, 0), (2, 3, 2000)], fleet=2)
    res = brute_force_optimal(inst)
    assert res.optimum == 20 * MILE and res.plan.n_vehicles == 2
    one = build(m, [(0, 1, 0), (2, 3, 2000)], fleet=1)
    assert brute_force_optimal(one).optimum == (20 + 500) * MILE


@pytest.mark.parametrize("seed", range(40))
def test_matches_subset_dp(seed):
    inst = tiny_instance(seed, n_orders=3 + seed % 4)
    for delta in (0, 45, 120):
        ref = partition_ip_value(inst, delta)
        if ref is None:
            with pytest.raises(InfeasibleError):
                brute_force_optimal(inst, delta)
            continue
        pruned = brute_force_optimal(inst, delta)
        full = brute_force_optimal(inst, delta, prune=False)
        assert pruned.optimum == full.optimum == ref
        assert pruned.nodes_explored <= full.nodes_explored
        assert verify_plan(pruned.plan, inst, delta).ok


def test_size_guard():
    inst = scaled_instance(1, ORACLE_MAX_TASKS + 1)
    with pytest.raises(SizeGuardError):
        brute_force_optimal(inst)


def test_infeasible():
    inst = build(line_matrix([0, 100]), [(0, 1, 0), (0, 1, 0)], fleet=1)
    with pytest.raises(InfeasibleError):
        brute_force_optimal(inst)


@pytest.mark.parametrize("seed", range(40))
def test_greedy_never_beats_optimum(seed):
    inst = tiny_instance(seed)
    for delta in (0, 60):
        try:
            opt = brute_force_optimal(inst, delta).optimum
        except InfeasibleError:
            with pytest.raises(SolveFailure):
                greedy_baseline(inst, delta)
            continue
        try:
            plan = greedy_baseline(inst, delta)
        except SolveFailure:
            continue
        assert verify_plan(plan, inst, delta).ok
        assert plan.total_cost >= opt


def test_greedy_prefers_least_relocation():
    m = line_matrix([0, 100, 300, 400])
    # trucks end at hubs 1 and 3; next task starts at hub 3
    inst = build(m, [(0, 1, 0), (2, 3, 0), (3, 0, 600)], fleet=3)
    plan = greedy_baseline(inst)
    assert [r.tasks for r in plan.routes] == [(0,), (1, 2)]


def test_greedy_tie_goes_to_first_route():
    m = line_matrix([0, 100])
    inst = build(m, [(0, 1, 0), (0, 1, 0), (1, 0, 500)], fleet=2)
    plan = greedy_baseline(inst)
    assert [r.tasks for r in plan.routes] == [(0, 2), (1,)]


def test_greedy_fleet_exhausted():
    inst = build(line_matrix([0, 100]), [(0, 1, 0), (0, 1, 0)], fleet=1)
    with pytest.raises(SolveFailure, match="exhausted"):
        greedy_baseline(inst)


def test_greedy_on_generated():
    inst = scaled_instance(3, 120)
    plan = greedy_baseline(inst)
    assert verify_plan(plan, inst).ok
