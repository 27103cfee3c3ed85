"""Independent reference implementations used only by the tests."""

import itertools

import numpy as np

from hubflow.flow import FlowNetwork
from hubflow.lp import LinearProgram
from hubflow.model import task_duration


def tableau_simplex(c, a, b, senses, upper=None, max_pivots=20_000):
    """Two-phase full-tableau simplex with Bland's rule.

    Upper bounds become explicit rows. Returns ("optimal", value),
    ("infeasible", None) or ("unbounded", None).
    """
    c = np.asarray(c, float)
    a = np.asarray(a, float).reshape(-1, len(c))
    b = np.asarray(b, float)
    n = len(c)
    rows, rhs, kinds = list(a), list(b), list(senses)
    if upper is not None:
        for j, u in enumerate(upper):
            if np.isfinite(u):
                e = np.zeros(n)
                e[j] = 1
                rows.append(e)
                rhs.append(u)
                kinds.append("<=")
    m = len(rows)
    n_slack = sum(1 for k in kinds if k != "=")
    width = n + n_slack + m
    T = np.zeros((m, width + 1))
    s = n
    for i, (row, r, k) in enumerate(zip(rows, rhs, kinds)):
        T[i, :n] = row
        if k == "<=":
            T[i, s] = 1
            s += 1
        elif k == ">=":
            T[i, s] = -1
            s += 1
        T[i, -1] = r
        if r < 0:
            T[i] *= -1
        T[i, n + n_slack + i] = 1
    basis = [n + n_slack + i for i in range(m)]

    def run(cost, allowed):
        for _ in range(max_pivots):
            cb = cost[basis]
            red = cost - cb @ T[:, :-1]
            enter = next((j for j in range(width) if allowed[j] and red[j] < -1e-9), None)
            if enter is None:
                return "optimal"
            col = T[:, enter]
            ratios = [(T[i, -1] / col[i], basis[i], i) for i in range(m) if col[i] > 1e-9]
            if not ratios:
                return "unbounded"
            best = min(r[0] for r in ratios)
            _, _, leave = min((r for r in ratios if r[0] <= best + 1e-12), key=lambda r: r[1])
            T[leave] /= T[leave, enter]
            for i in range(m):
                if i != leave and T[i, enter] != 0:
                    T[i] -= T[i, enter] * T[leave]
            basis[leave] = enter
        raise RuntimeError("pivot limit")

    allowed = np.ones(width, bool)
    phase1 = np.zeros(width)
    phase1[n + n_slack:] = 1
    run(phase1, allowed)
    if T[:, -1] @ phase1[basis] > 1e-7:
        return "infeasible", None
    allowed[n + n_slack:] = False
    # drive zero-level artificials out where possible
    for i in range(m):
        if basis[i] >= n + n_slack:
            j = next((j for j in range(n + n_slack) if abs(T[i, j]) > 1e-9), None)
            if j is not None:
                T[i] /= T[i, j]
                for r in range(m):
                    if r != i and T[r, j] != 0:
                        T[r] -= T[r, j] * T[i]
                basis[i] = j
    cost = np.zeros(width)
    cost[:n] = c
    if run(cost, allowed) == "unbounded":
        return "unbounded", None
    x = np.zeros(width)
    x[basis] = T[:, -1]
    return "optimal", float(c @ x[:n])


def enumerate_flow_optimum(net):
    """Cheapest integral flow by trying every flow vector; None if none is feasible."""
    ranges = [range(int(lo), int(up) + 1) for lo, up in zip(net.lower, net.upper)]
    best = None
    for f in itertools.product(*ranges):
        f = np.asarray(f, dtype=np.int64)
        bal = np.zeros(net.n_nodes, dtype=np.int64)
        np.add.at(bal, net.tail, f)
        np.subtract.at(bal, net.head, f)
        if np.array_equal(bal, net.supply):
            v = int(f @ net.cost)
            best = v if best is None else min(best, v)
    return best


def route_starts(seq, inst, delta):
    """Earliest starts along ``seq`` or None; written independently of nf.py."""
    out = []
    for k, t in enumerate(seq):
        lo, hi = max(0, t.pickup_time - delta), t.pickup_time + delta
        s = lo
        if k:
            prev = seq[k - 1]
            s = max(s, out[-1] + task_duration(prev, inst) + inst.time(prev.dest, t.origin))
        if s > hi:
            return None
        out.append(s)
    return out


def route_cost_of(seq, inst):
    c = sum(inst.dist(t.origin, t.dest) for t in seq)
    return c + sum(inst.dist(a.dest, b.origin) for a, b in zip(seq, seq[1:]))


def all_routes(inst, delta):
    """Every elementary time-feasible task sequence, as (ids, cost)."""
    tasks = list(inst.auto_tasks)
    out = []

    def grow(seq, used):
        out.append((tuple(t.id for t in seq), route_cost_of(seq, inst)))
        for t in tasks:
            if t.id not in used and route_starts(seq + [t], inst, delta) is not None:
                grow(seq + [t], used | {t.id})

    for t in tasks:
        if route_starts([t], inst, delta) is not None:
            grow([t], {t.id})
    return out


def partition_lp_value(inst, delta):
    """Set-partitioning LP over all elementary feasible routes (scipy HiGHS)."""
    from scipy.optimize import linprog

    routes = all_routes(inst, delta)
    ids = [t.id for t in inst.auto_tasks]
    pos = {tid: i for i, tid in enumerate(ids)}
    a_eq = np.zeros((len(ids), len(routes)))
    for j, (seq, _) in enumerate(routes):
        for tid in seq:
            a_eq[pos[tid], j] = 1
    cost = [c for _, c in routes]
    res = linprog(cost, A_ub=np.ones((1, len(routes))), b_ub=[inst.fleet_size],
                  A_eq=a_eq, b_eq=np.ones(len(ids)), bounds=(0, None), method="highs")
    return res.fun if res.status == 0 else None


def partition_ip_value(inst, delta):
    """Exact optimum by DP over task subsets and vehicle count; None if infeasible."""
    ids = [t.id for t in inst.auto_tasks]
    bit = {tid: 1 << i for i, tid in enumerate(ids)}
    route_cost = {}
    for seq, cost in all_routes(inst, delta):
        mask = sum(bit[t] for t in seq)
        route_cost[mask] = min(cost, route_cost.get(mask, cost))
    full = (1 << len(ids)) - 1
    inf = float("inf")
    best = {0: 0}
    for _ in range(inst.fleet_size):
        nxt = dict(best)
        for mask, v in best.items():
            low = (full & ~mask) & -(full & ~mask)  # cover the lowest uncovered task next
            if not low:
                continue
            for rm, c in route_cost.items():
                if rm & low and not rm & mask:
                    m2 = mask | rm
                    if v + c < nxt.get(m2, inf):
                        nxt[m2] = v + c
        best = nxt
    return best.get(full)


# random instances for the kernel checks ----------------------------------


def net(n, arcs, supply):
    tail, head, lo, up, cost = zip(*arcs) if arcs else ([],) * 5
    return FlowNetwork(n, tail, head, lo, up, cost, supply)


def random_network(rng, feasible_bias=True):
    n = int(rng.integers(2, 11))
    m = int(rng.integers(1, 10))
    arcs = []
    for _ in range(m):
        u, v = rng.choice(n, 2, replace=False)
        lo = int(rng.integers(0, 2))
        arcs.append((int(u), int(v), lo, lo + int(rng.integers(0, 3)), int(rng.integers(-5, 10))))
    supply = np.zeros(n, np.int64)
    if feasible_bias:
        # route a random feasible flow to define the supplies
        for u, v, lo, up, _ in arcs:
            f = int(rng.integers(lo, up + 1))
            supply[u] += f
            supply[v] -= f
    else:
        a, b = rng.choice(n, 2, replace=False)
        k = int(rng.integers(1, 4))
        supply[a], supply[b] = k, -k
    return net(n, arcs, supply)


SENSES = ("<=", ">=", "=")


def random_lp(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 6)), int(rng.integers(1, 7))
    a = rng.integers(-3, 4, size=(m, n)).astype(float)
    c = rng.integers(-5, 6, size=n).astype(float)
    b = rng.integers(-4, 9, size=m).astype(float)
    senses = [SENSES[k] for k in rng.integers(0, 3, size=m)]
    upper = np.where(rng.random(n) < 0.5, rng.integers(1, 5, size=n), np.inf).astype(float)
    return LinearProgram(c, a, b, senses, upper)
