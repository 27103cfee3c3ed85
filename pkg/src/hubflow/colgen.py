"""Column generation over the set-partitioning model and the restricted
master heuristic.

Master: one covering row per task (equality in the LP phase), one fleet row
``sum x <= K``. Columns are time-feasible routes found by a labeling
algorithm on the task graph; labels are not made elementary.
"""

from __future__ import annotations

import heapq
import math
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError, RepairFailure, SolveFailure
from .graph import TaskGraph, build_graph
from .lp import LinearProgram, LpSolution, Status, solve_lp
from .model import Instance
from .nf import earliest_starts
from .plan import Plan, Route, make_plan, verify_plan
from .report import BoundReport

RC_TOL = 1e-7
MAX_COLS = 50


@dataclass(frozen=True)
class Column:
    route: Route
    cost: int
    covers: Counter = field(compare=False)

    @property
    def tasks(self) -> tuple[int, ...]:
        return self.route.tasks


def make_column(task_ids, starts, g: TaskGraph) -> Column:
    cost = 0
    for a, b in zip(task_ids, task_ids[1:]):
        i, j = g.index[a], g.index[b]
        cost += int(g.service[i]) + _reloc(g, i, j)
    cost += int(g.service[g.index[task_ids[-1]]])
    return Column(Route(tuple(task_ids), tuple(starts), cost), cost, Counter(task_ids))


def _reloc(g: TaskGraph, i: int, j: int) -> int:
    k = g.arc_lookup[(i, j)]
    return int(g.reloc[k])


def initial_columns(inst: Instance, delta: int | None = None, *, graph: TaskGraph | None = None) -> list[Column]:
    """One single-task route per task, started at its window opening."""
    g = graph if graph is not None else build_graph(inst, inst.flexibility if delta is None else delta)
    return [make_column((t.id,), (g.window(i)[0],), g) for i, t in enumerate(g.tasks)]


# master --------------------------------------------------------------------


def master_lp(pool, g: TaskGraph, fleet_size: int, *, cover_sense="=", elastic_cost=None,
              upper=None) -> LinearProgram:
    """Rows: tasks in graph order, then the fleet row.

    With ``elastic_cost`` column 0 is an extra variable that relaxes the
    fleet row at that price per vehicle.
    """
    n = g.n
    off = 0 if elastic_cost is None else 1
    a = np.zeros((n + 1, off + len(pool)))
    costs = np.empty(off + len(pool))
    if off:
        a[n, 0] = -1.0
        costs[0] = elastic_cost
    index = g.index
    for j, c in enumerate(pool, start=off):
        for tid, k in c.covers.items():
            a[index[tid], j] = k
        costs[j] = c.cost
    a[n, off:] = 1.0
    b = np.concatenate([np.ones(n), [fleet_size]])
    return LinearProgram(costs, a, b, [cover_sense] * n + ["<="], upper)


def solve_master(pool, g: TaskGraph, fleet_size: int, *, elastic_cost=None, basis=None) -> LpSolution:
    lp = master_lp(pool, g, fleet_size, elastic_cost=elastic_cost)
    return solve_lp(lp, basis=basis)


# pricing -------------------------------------------------------------------


@dataclass
class Pricing:
    columns: list[Column]
    reduced_costs: list[float]
    min_rc: float  # most negative reduced cost over all routes, 0 if none
    labels: int = 0


def price(g: TaskGraph, task_duals, fleet_dual: float, delta: int | None = None,
          max_cols: int = MAX_COLS, dominance: bool = True) -> Pricing:
    """Labeling search for routes with negative reduced cost.

    ``task_duals`` is indexed like ``g.tasks``. A label holds the reduced
    cost so far and the earliest start of its last task; labels are
    expanded in order of time. With ``dominance`` a label is dropped when
    another at the same task is no worse in both cost and time.
    """
    delta = g.delta if delta is None else delta
    n = g.n
    pi = np.asarray(task_duals, dtype=float)
    lo = np.maximum(0, g.pickup - delta).tolist()
    hi = (g.pickup + delta).tolist()
    service = g.service.tolist()
    succ = g.successor_lists

    rc, tm, vert, parent, alive = [], [], [], [], []
    at = [[] for _ in range(n)]  # alive label ids per task
    heap = []

    def add(v, r, t, par):
        if dominance:
            for k in at[v]:
                if rc[k] <= r and tm[k] <= t:
                    return
            keep = []
            for k in at[v]:
                if r <= rc[k] and t <= tm[k]:
                    alive[k] = False
                else:
                    keep.append(k)
            at[v] = keep
        lid = len(rc)
        rc.append(r)
        tm.append(t)
        vert.append(v)
        parent.append(par)
        alive.append(True)
        at[v].append(lid)
        heapq.heappush(heap, (t, lid))

    for i in range(n):
        add(i, -fleet_dual - pi[i], lo[i], -1)
    while heap:
        t, lid = heapq.heappop(heap)
        if not alive[lid]:
            continue
        v = vert[lid]
        r = rc[lid]
        for j, arc_t, arc_c in succ[v]:
            s = t + arc_t
            if s > hi[j]:
                continue
            if s < lo[j]:
                s = lo[j]
            add(j, r + arc_c - pi[j], s, lid)

    finals = []
    for lid in range(len(rc)):
        if alive[lid] or not dominance:
            r = rc[lid] + service[vert[lid]]
            if r < -RC_TOL:
                finals.append((r, lid))
    finals.sort()
    min_rc = finals[0][0] if finals else 0.0
    columns, rcs, seen = [], [], set()
    for r, lid in finals:
        seq, starts, k = [], [], lid
        while k >= 0:
            seq.append(g.tasks[vert[k]].id)
            starts.append(tm[k])
            k = parent[k]
        seq.reverse()
        starts.reverse()
        key = tuple(seq)
        if key in seen:
            continue
        seen.add(key)
        columns.append(make_column(seq, starts, g))
        rcs.append(r)
        if len(columns) >= max_cols:
            break
    return Pricing(columns, rcs, min_rc, len(rc))


# column generation loop -------------------------------------------------------


@dataclass
class CgResult:
    lb: float
    pool: list[Column]
    converged: bool
    lp_value: float
    iterations: int
    seconds: float
    history: list[float] = field(default_factory=list)

    @property
    def lb_int(self) -> int:
        """Bound rounded up to the next integer, valid since costs are integral."""
        return math.ceil(self.lb - 1e-6)


def elastic_price(g: TaskGraph) -> float:
    """Per-vehicle price above any plan's total cost, so relaxing the fleet
    row never pays when the true master is feasible."""
    max_reloc = int(g.reloc.max()) if len(g.reloc) else 0
    return float(int(g.service.sum()) + g.n * max_reloc + 1)


def cg_loop(inst: Instance, delta: int | None = None, *, max_iter: int = 10_000,
            time_limit: float | None = None, max_cols: int = MAX_COLS, graph: TaskGraph | None = None
            ) -> CgResult:
    """Column generation on the LP relaxation of the set-partitioning model.

    Converged: ``lb`` is the master LP value. Stopped early: ``lb`` is the
    best Lagrangian bound seen, master value + fleet size * most negative
    reduced cost.
    """
    t0 = time.perf_counter()
    delta = inst.flexibility if delta is None else delta
    g = build_graph(inst, delta) if graph is None else graph
    pool = initial_columns(inst, delta, graph=g)
    big_m = elastic_price(g)
    K = inst.fleet_size
    known = {c.tasks for c in pool}
    basis = None
    history = []
    best_bound = -math.inf
    it = 0
    converged = False
    while True:
        sol = solve_master(pool, g, K, elastic_cost=big_m, basis=basis)
        if sol.status is not Status.OPTIMAL:
            raise RuntimeError(f"restricted master ended with status {sol.status.value}")
        basis = sol.basis
        value = sol.objective
        if history and value > history[-1] + 1e-6 * (1 + abs(value)):
            raise AssertionError(f"master value rose from {history[-1]} to {value}")
        history.append(value)
        pi, sigma = sol.duals[: g.n], min(sol.duals[g.n], 0.0)
        it += 1
        pr = price(g, pi, sigma, delta, max_cols=max_cols)
        best_bound = max(best_bound, value + K * min(pr.min_rc, 0.0))
        # columns already in the pool are priced out within LP tolerance
        fresh = [c for c in pr.columns if c.tasks not in known]
        if not fresh:
            converged = True
            if sol.x[0] > 1e-6:
                raise InfeasibleError(
                    f"LP relaxation needs {K + sol.x[0]:.2f} vehicles; fleet is {K}"
                )
            break
        out_of_time = time_limit is not None and time.perf_counter() - t0 > time_limit
        if it >= max_iter or out_of_time:
            break
        pool.extend(fresh)
        known.update(c.tasks for c in fresh)
    lb = history[-1] if converged else best_bound
    return CgResult(lb, pool, converged, history[-1], it, time.perf_counter() - t0, history)


# restricted master IP -----------------------------------------------------------


def restricted_master_ip(pool, inst: Instance, delta: int | None = None,
                         time_limit: float = 60.0, graph: TaskGraph | None = None) -> Plan:
    """Covering version of the master over ``pool`` with binary columns,
    solved by depth-first branch and bound; over-covered tasks are then
    removed and the routes rescheduled. Raises SolveFailure when no
    incumbent is found in time or the covering problem is infeasible."""
    delta = inst.flexibility if delta is None else delta
    g = build_graph(inst, delta) if graph is None else graph
    pool = list(pool)
    if not pool:
        raise SolveFailure("empty column pool")
    K = inst.fleet_size
    full = master_lp(pool, g, K, cover_sense=">=")
    A, b, c = full.a, full.b, full.c
    t0 = time.perf_counter()
    best_cost, best_sel = math.inf, None
    n_cols = len(pool)
    stack = [((), ())]  # (fixed to one, fixed to zero)
    nodes = 0
    timed_out = False
    while stack:
        if time.perf_counter() - t0 > time_limit:
            timed_out = True
            break
        ones, zeros = stack.pop()
        nodes += 1
        free = np.ones(n_cols, dtype=bool)
        free[list(ones)] = False
        rhs = b - A[:, list(ones)].sum(axis=1) if ones else b
        if rhs[-1] < -1e-9:
            continue
        fixed_cost = float(c[list(ones)].sum()) if ones else 0.0
        upper = np.ones(n_cols)
        upper[list(zeros)] = 0.0
        idx = np.flatnonzero(free)
        lp = LinearProgram(c[idx], A[:, idx], rhs, full.senses, upper[idx])
        sol = solve_lp(lp)
        if sol.status is not Status.OPTIMAL:
            continue
        bound = fixed_cost + sol.objective
        if math.ceil(bound - 1e-6) >= best_cost:
            continue
        frac = np.abs(sol.x - np.round(sol.x))
        if frac.max() < 1e-6:
            sel = list(ones) + [int(idx[k]) for k in np.flatnonzero(np.round(sol.x) > 0.5)]
            best_cost, best_sel = round(bound), sel
            continue
        k = int(np.argmin(np.abs(sol.x - 0.5)))
        j = int(idx[k])
        stack.append((ones, zeros + (j,)))
        stack.append((ones + (j,), zeros))
    if best_sel is None:
        reason = "time limit" if timed_out else "covering master infeasible"
        raise SolveFailure(f"restricted master found no integer solution ({reason}, {nodes} nodes)")
    routes = dedupe_tasks([pool[j].tasks for j in sorted(best_sel)], inst)
    scheduled = []
    for seq in routes:
        try:
            starts = earliest_starts(seq, inst, delta)
        except RepairFailure as exc:
            raise AssertionError(f"rescheduling after duplicate removal failed: {exc}") from exc
        scheduled.append(Route(seq, tuple(starts)))
    plan = make_plan(scheduled, inst)
    report = verify_plan(plan, inst, delta)
    assert report.ok, report.message
    return plan


def splice_saving(seq, pos: int, inst: Instance) -> int:
    """Relocation saved by dropping ``seq[pos]`` and driving from its
    predecessor straight to its successor; missing neighbours count zero."""
    tb = inst.task_by_id
    t = tb[seq[pos]]
    pred = tb[seq[pos - 1]] if pos > 0 else None
    succ = tb[seq[pos + 1]] if pos + 1 < len(seq) else None
    saving = 0
    if pred is not None:
        saving += inst.dist(pred.dest, t.origin)
    if succ is not None:
        saving += inst.dist(t.dest, succ.origin)
    if pred is not None and succ is not None:
        saving -= inst.dist(pred.dest, succ.origin)
    return saving


def dedupe_tasks(routes, inst: Instance) -> list[tuple[int, ...]]:
    """Remove repeated task occurrences greedily, largest splice saving
    first (ties: lowest route, then position). Empty routes are dropped."""
    routes = [list(r) for r in routes]
    count = Counter(t for r in routes for t in r)
    while True:
        best = None
        for ri, r in enumerate(routes):
            for pos, tid in enumerate(r):
                if count[tid] > 1:
                    s = splice_saving(r, pos, inst)
                    if best is None or s > best[0]:
                        best = (s, ri, pos)
        if best is None:
            break
        _, ri, pos = best
        count[routes[ri][pos]] -= 1
        del routes[ri][pos]
    return [tuple(r) for r in routes if r]


def cg_bound_report(inst: Instance, delta: int | None = None, *, time_limit: float = 60.0,
                    ip_time_limit: float = 60.0, max_cols: int = MAX_COLS):
    """Returns ``(report, plan_or_None, cg_result)``."""
    delta = inst.flexibility if delta is None else delta
    g = build_graph(inst, delta)
    res = cg_loop(inst, delta, time_limit=time_limit, max_cols=max_cols, graph=g)
    report = BoundReport("CG", lb=res.lb_int, lb_time=res.seconds, converged=res.converged)
    t1 = time.perf_counter()
    try:
        plan = restricted_master_ip(res.pool, inst, delta, ip_time_limit, graph=g)
    except SolveFailure as exc:
        report.ub_time = time.perf_counter() - t1
        report.note = str(exc)
        return report, None, res
    report.ub = plan.total_cost
    report.ub_time = time.perf_counter() - t1
    report.delta_used_for_ub = delta
    return report, plan, res
