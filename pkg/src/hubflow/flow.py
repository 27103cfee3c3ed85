"""Integral min-cost flow by successive shortest paths with node potentials.

Lower bounds are removed by pre-sending ``lower`` units on every arc and
moving the corresponding supply; arcs with negative cost are saturated up
front so that every residual arc starts with a non-negative reduced cost.
From then on each augmentation runs Dijkstra on reduced costs from all
nodes with excess and stops at the first deficit node it settles.

All arithmetic is int64; inputs whose cost/capacity products could overflow
are rejected before solving.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit

from .errors import InfeasibleError, ValidationError
from .lp import LinearProgram

_LIMIT = 1 << 62


@dataclass(frozen=True, eq=False)
class FlowNetwork:
    n_nodes: int
    tail: np.ndarray
    head: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    cost: np.ndarray
    supply: np.ndarray

    def __post_init__(self):
        for name in ("tail", "head", "lower", "upper", "cost", "supply"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.int64))
        m = len(self.tail)
        if not all(len(getattr(self, a)) == m for a in ("head", "lower", "upper", "cost")):
            raise ValidationError("arc arrays differ in length")
        if len(self.supply) != self.n_nodes:
            raise ValidationError("supply vector does not match node count")
        if m and (self.tail.min() < 0 or self.head.min() < 0
                  or max(self.tail.max(), self.head.max()) >= self.n_nodes):
            raise ValidationError("arc endpoint out of range")
        if np.any(self.lower < 0) or np.any(self.lower > self.upper):
            raise ValidationError("arc bounds must satisfy 0 <= lower <= upper")
        if int(self.supply.sum()) != 0:
            raise ValidationError(f"supplies sum to {int(self.supply.sum())}, not 0")

    @property
    def n_arcs(self) -> int:
        return len(self.tail)


@dataclass(frozen=True, eq=False)
class FlowSolution:
    """``potentials`` price the nodes so that ``cost + pot[tail] - pot[head]``
    is the reduced cost of an arc (LP duals of the balance rows are ``-pot``)."""

    flow: np.ndarray
    objective: int
    potentials: np.ndarray

    def reduced_costs(self, net: FlowNetwork) -> np.ndarray:
        return net.cost + self.potentials[net.tail] - self.potentials[net.head]


def _check_overflow(net: FlowNetwork) -> None:
    # float sums with a 4x margin; exact enough to decide the order of magnitude
    cost = np.abs(net.cost).astype(float)
    worst = float(cost @ (net.upper.astype(float) + 1))
    caps = float(net.upper.sum(dtype=float) + np.abs(net.supply).sum(dtype=float))
    if max(worst, caps, float(cost.sum()) * net.n_nodes) >= _LIMIT / 4:
        raise OverflowError("network too large for exact 64-bit min-cost flow")


@njit(cache=True, nogil=True)
def _ssp(n, start, head, tail, rev, cap, cost, excess, pot):
    """Returns -1 if some excess cannot reach any deficit, else 0."""
    inf = np.int64(1) << 62
    dist = np.empty(n, np.int64)
    par = np.empty(n, np.int64)
    done = np.zeros(n, np.bool_)
    settled = np.empty(n, np.int64)
    while True:
        dist[:] = inf
        par[:] = -1
        done[:] = False
        heap = [(np.int64(0), np.int64(0)) for _ in range(0)]
        for v in range(n):
            if excess[v] > 0:
                dist[v] = 0
                heap.append((np.int64(0), np.int64(v)))
        if len(heap) == 0:
            return 0
        heapq.heapify(heap)
        target = -1
        n_settled = 0
        while len(heap) > 0:
            d_v, v = heapq.heappop(heap)
            if done[v]:
                continue
            done[v] = True
            settled[n_settled] = v
            n_settled += 1
            if excess[v] < 0:
                target = v
                break
            p_v = pot[v]
            for e in range(start[v], start[v + 1]):
                if cap[e] > 0:
                    w = head[e]
                    nd = d_v + cost[e] + p_v - pot[w]
                    if nd < dist[w]:
                        dist[w] = nd
                        par[w] = e
                        heapq.heappush(heap, (nd, w))
        if target < 0:
            return -1
        d_t = dist[target]
        for k in range(n_settled):
            v = settled[k]
            pot[v] += dist[v] - d_t
        amount = -excess[target]
        v = target
        while par[v] >= 0:
            e = par[v]
            amount = min(amount, cap[e])
            v = tail[e]
        source = v
        amount = min(amount, excess[source])
        v = target
        while par[v] >= 0:
            e = par[v]
            cap[e] -= amount
            cap[rev[e]] += amount
            v = tail[e]
        excess[source] -= amount
        excess[target] += amount


def _reachable(n, start, head, cap, seeds):
    seen = np.zeros(n, dtype=bool)
    seen[seeds] = True
    stack = list(seeds)
    while stack:
        v = stack.pop()
        for e in range(start[v], start[v + 1]):
            if cap[e] > 0 and not seen[head[e]]:
                seen[head[e]] = True
                stack.append(int(head[e]))
    return np.flatnonzero(seen)


def solve_min_cost_flow(net: FlowNetwork) -> FlowSolution:
    """Cost-optimal integral flow; raises InfeasibleError with a deficient
    node set (supply exceeding residual out-capacity) as certificate."""
    _check_overflow(net)
    n, m = net.n_nodes, net.n_arcs
    cap0 = net.upper - net.lower
    neg = net.cost < 0
    pre = net.lower + np.where(neg, cap0, 0)  # flow fixed before the search
    excess = net.supply.copy()
    np.subtract.at(excess, net.tail, pre)
    np.add.at(excess, net.head, pre)

    # residual arc 2k is arc k forward, 2k+1 its reverse
    r_tail = np.empty(2 * m, np.int64)
    r_head = np.empty(2 * m, np.int64)
    r_cap = np.empty(2 * m, np.int64)
    r_cost = np.empty(2 * m, np.int64)
    r_tail[0::2], r_tail[1::2] = net.tail, net.head
    r_head[0::2], r_head[1::2] = net.head, net.tail
    r_cap[0::2] = np.where(neg, 0, cap0)
    r_cap[1::2] = np.where(neg, cap0, 0)
    r_cost[0::2], r_cost[1::2] = net.cost, -net.cost

    order = np.argsort(r_tail, kind="stable")
    pos = np.empty_like(order)
    pos[order] = np.arange(2 * m)
    rev = pos[order ^ 1]
    r_tail, r_head, r_cap, r_cost = r_tail[order], r_head[order], r_cap[order], r_cost[order]
    start = np.searchsorted(r_tail, np.arange(n + 1)).astype(np.int64)
    pot = np.zeros(n, np.int64)

    status = _ssp(n, start, r_head, r_tail, rev, r_cap, r_cost, excess, pot)
    if status < 0:
        cut = _reachable(n, start, r_head, r_cap, np.flatnonzero(excess > 0))
        raise InfeasibleError(
            f"no feasible flow: node set of size {len(cut)} has more supply than outgoing capacity",
            certificate=cut,
        )
    flow = net.lower + r_cap[pos[1::2]]
    objective = int(np.dot(flow, net.cost))
    return FlowSolution(flow=flow, objective=objective, potentials=pot)


def check_optimality(net: FlowNetwork, sol: FlowSolution) -> None:
    """Assert bounds, conservation, and complementary slackness."""
    f = sol.flow
    assert np.all(net.lower <= f) and np.all(f <= net.upper), "flow outside arc bounds"
    bal = np.zeros(net.n_nodes, np.int64)
    np.add.at(bal, net.tail, f)
    np.subtract.at(bal, net.head, f)
    assert np.array_equal(bal, net.supply), "flow conservation violated"
    rc = sol.reduced_costs(net)
    assert np.all(f[rc > 0] == net.lower[rc > 0]), "positive reduced cost on a used arc"
    assert np.all(f[rc < 0] == net.upper[rc < 0]), "negative reduced cost on an unsaturated arc"
    assert sol.objective == int(np.dot(f, net.cost))


def network_to_lp(net: FlowNetwork) -> tuple[LinearProgram, int]:
    """Node-arc LP of a network in shifted variables ``x - lower``.

    Returns the LP and the constant to add to its objective.
    """
    a = np.zeros((net.n_nodes, net.n_arcs))
    cols = np.arange(net.n_arcs)
    a[net.tail, cols] += 1.0
    a[net.head, cols] -= 1.0
    b = net.supply.astype(float) - a @ net.lower.astype(float)
    lp = LinearProgram(
        c=net.cost.astype(float),
        a=a,
        b=b,
        senses=["="] * net.n_nodes,
        upper=(net.upper - net.lower).astype(float),
    )
    return lp, int(np.dot(net.cost, net.lower))


def read_dimacs(path) -> FlowNetwork:
    """Parse a DIMACS ``min`` problem (1-based node ids)."""
    n = None
    supply = None
    arcs = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        try:
            if parts[0] == "p":
                n = int(parts[2])
                supply = np.zeros(n, np.int64)
            elif parts[0] == "n":
                supply[int(parts[1]) - 1] = int(parts[2])
            elif parts[0] == "a":
                u, v, lo, hi, c = (int(x) for x in parts[1:6])
                arcs.append((u - 1, v - 1, lo, hi, c))
            else:
                raise ValueError(f"unknown record {parts[0]!r}")
        except (ValueError, IndexError, TypeError) as exc:
            raise ValidationError(f"DIMACS line {lineno}: {exc}") from exc
    if n is None:
        raise ValidationError("DIMACS file has no problem line")
    cols = list(zip(*arcs)) if arcs else [[]] * 5
    return FlowNetwork(n, *cols[:2], cols[2], cols[3], cols[4], supply)
