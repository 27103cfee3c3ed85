"""Task graph over autonomous tasks with time-preprocessed arcs.

An arc (t, t') means one truck can do t and then t'. Its time and cost
cover performing t and relocating to the origin of t'. Arcs out of the
source are free; arcs into the sink carry only the service of their tail,
so the cost of a route is the plain sum of its arc costs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .model import Instance, Task, service_cost, task_duration

SRC = "src"
SNK = "snk"


class Arc(NamedTuple):
    tail: object
    head: object
    time: int
    cost: int


def arc_time(t: Task, t_next: Task, inst: Instance) -> int:
    return task_duration(t, inst) + inst.time(t.dest, t_next.origin)


def arc_cost(t: Task, t_next: Task, inst: Instance) -> int:
    return service_cost(t, inst) + inst.dist(t.dest, t_next.origin)


def time_window(t: Task, delta: int) -> tuple[int, int]:
    """Start-time window of a task, clamped at the horizon start."""
    return max(0, t.pickup_time - delta), t.pickup_time + delta


def keep_arc(p_from: int, p_to: int, time: int, delta: int) -> bool:
    return p_from - delta + time <= p_to + delta


@dataclass(frozen=True, eq=False)
class TaskGraph:
    """Arrays are indexed by task position in ``tasks``.

    ``tail``/``head`` list the task-to-task arcs; source and sink arcs exist
    implicitly for every task and are materialised by ``arcs``.
    """

    tasks: tuple[Task, ...]
    delta: int
    tail: np.ndarray
    head: np.ndarray
    time: np.ndarray
    cost: np.ndarray
    reloc: np.ndarray
    duration: np.ndarray
    service: np.ndarray
    pickup: np.ndarray

    @property
    def n(self) -> int:
        return len(self.tasks)

    @property
    def n_arcs(self) -> int:
        return len(self.tail) + 2 * self.n

    @cached_property
    def index(self) -> dict[int, int]:
        return {t.id: i for i, t in enumerate(self.tasks)}

    @cached_property
    def vertices(self) -> tuple:
        return (SRC, *(t.id for t in self.tasks), SNK)

    @cached_property
    def arcs(self) -> list[Arc]:
        ids = [t.id for t in self.tasks]
        out = [Arc(SRC, tid, 0, 0) for tid in ids]
        out += [
            Arc(ids[i], ids[j], int(tm), int(c))
            for i, j, tm, c in zip(
                self.tail.tolist(), self.head.tolist(), self.time.tolist(), self.cost.tolist()
            )
        ]
        out += [
            Arc(tid, SNK, int(d), int(s))
            for tid, d, s in zip(ids, self.duration.tolist(), self.service.tolist())
        ]
        return out

    @cached_property
    def successors(self) -> list[list[int]]:
        """Per task index, positions into the arc arrays of its outgoing arcs."""
        out = [[] for _ in range(self.n)]
        for k, i in enumerate(self.tail.tolist()):
            out[i].append(k)
        return out

    @cached_property
    def successor_lists(self) -> list[list[tuple[int, int, int]]]:
        """Per task index, ``(head, time, cost)`` of each outgoing task arc."""
        out = [[] for _ in range(self.n)]
        for i, j, tm, c in zip(self.tail.tolist(), self.head.tolist(), self.time.tolist(), self.cost.tolist()):
            out[i].append((j, tm, c))
        return out

    @cached_property
    def arc_lookup(self) -> dict[tuple[int, int], int]:
        return {(i, j): k for k, (i, j) in enumerate(zip(self.tail.tolist(), self.head.tolist()))}

    def window(self, i: int, delta: int | None = None) -> tuple[int, int]:
        return time_window(self.tasks[i], self.delta if delta is None else delta)

    def to_dot(self) -> str:
        lines = ["digraph tasks {", f'  {SRC} [shape=box];', f'  {SNK} [shape=box];']
        for i, t in enumerate(self.tasks):
            lo, hi = self.window(i)
            lines.append(f'  t{t.id} [label="{t.id}\\n[{lo},{hi}]"];')
        name = {SRC: SRC, SNK: SNK, **{t.id: f"t{t.id}" for t in self.tasks}}
        for a in self.arcs:
            lines.append(f'  {name[a.tail]} -> {name[a.head]} [label="{a.time}/{a.cost}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_graph(inst: Instance, delta: int) -> TaskGraph:
    """Keep (t, t') iff p(t) - delta + time(t, t') <= p(t') + delta."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    tasks = tuple(sorted(inst.auto_tasks, key=lambda t: (t.pickup_time, t.id)))
    o = np.array([inst.index(t.origin) for t in tasks], dtype=np.int64)
    d = np.array([inst.index(t.dest) for t in tasks], dtype=np.int64)
    p = np.array([t.pickup_time for t in tasks], dtype=np.int64)
    tm, ds = inst.matrix.time, inst.matrix.dist
    duration = tm[o, d] + 2 * inst.service_time
    service = ds[o, d]
    reloc_time = tm[d[:, None], o[None, :]]
    reloc_cost = ds[d[:, None], o[None, :]]
    time = duration[:, None] + reloc_time
    keep = (p[:, None] - delta + time) <= (p[None, :] + delta)
    np.fill_diagonal(keep, False)
    tail, head = np.nonzero(keep)
    arrays = dict(
        tail=tail.astype(np.int64),
        head=head.astype(np.int64),
        time=time[tail, head],
        cost=service[tail] + reloc_cost[tail, head],
        reloc=reloc_cost[tail, head],
        duration=duration,
        service=service,
        pickup=p,
    )
    for a in arrays.values():
        a.setflags(write=False)
    return TaskGraph(tasks=tasks, delta=delta, **arrays)


@dataclass(frozen=True)
class Acyclicity:
    acyclic: bool
    cycle: tuple[int, ...] | None = None

    def __bool__(self):
        return self.acyclic


def is_acyclic(g: TaskGraph) -> Acyclicity:
    """Topological check over task-to-task arcs; on failure returns one
    directed cycle as task ids with the first id repeated at the end."""
    heads = [[] for _ in range(g.n)]
    for i, j in zip(g.tail.tolist(), g.head.tolist()):
        heads[i].append(j)
    WHITE, GREY, BLACK = 0, 1, 2
    color = [WHITE] * g.n
    parent = [-1] * g.n
    for root in range(g.n):
        if color[root] != WHITE:
            continue
        stack = [(root, iter(heads[root]))]
        color[root] = GREY
        while stack:
            v, it = stack[-1]
            for w in it:
                if color[w] == WHITE:
                    color[w] = GREY
                    parent[w] = v
                    stack.append((w, iter(heads[w])))
                    break
                if color[w] == GREY:
                    cyc = [w]
                    u = v
                    while u != w:
                        cyc.append(u)
                        u = parent[u]
                    cyc.reverse()  # now w's successors in order, ending at v
                    ids = [g.tasks[w].id] + [g.tasks[x].id for x in cyc[:-1]]
                    return Acyclicity(False, tuple(ids + [g.tasks[w].id]))
            else:
                color[v] = BLACK
                stack.pop()
    return Acyclicity(True)
