"""Problem data for autonomous transfer hub network scheduling.

Units throughout: times are integer minutes from the start of the horizon,
distances are integer tenths of a mile ("scaled miles", see ``MILE``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from .errors import StructuralError, ValidationError

MILE = 10  # distance fixed-point scale: 1 mile == 10 units
WEEK = 7 * 24 * 60


class Leg(str, Enum):
    FIRST_MILE = "FirstMile"
    AUTONOMOUS = "Autonomous"
    LAST_MILE = "LastMile"


@dataclass(frozen=True)
class Location:
    id: int
    is_hub: bool
    label: str | None = None
    coord: tuple[float, float] | None = None


def _as_matrix(values, name: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
            raise ValidationError(f"{name} entries must be finite integers")
    arr = arr.astype(np.int64)
    arr.setflags(write=False)
    return arr


def triangle_violation(m: np.ndarray) -> tuple[int, int, int] | None:
    """Return some (i, k, j) with m[i,k] + m[k,j] < m[i,j], or None."""
    for k in range(m.shape[0]):
        via = m[:, k, None] + m[None, k, :]
        bad = np.argwhere(via < m)
        if len(bad):
            i, j = bad[0]
            return int(i), k, int(j)
    return None


@dataclass(frozen=True, eq=False)
class TravelMatrix:
    """Driving time (minutes) and distance (scaled miles) between locations."""

    time: np.ndarray
    dist: np.ndarray

    def __post_init__(self):
        t = _as_matrix(self.time, "time matrix")
        d = _as_matrix(self.dist, "dist matrix")
        if t.shape != d.shape:
            raise ValidationError("time and dist matrices differ in shape")
        object.__setattr__(self, "time", t)
        object.__setattr__(self, "dist", d)
        off = ~np.eye(len(t), dtype=bool)
        for name, m in (("time", t), ("dist", d)):
            if np.any(m < 0):
                i, j = np.argwhere(m < 0)[0]
                raise ValidationError(f"negative {name} entry at ({i}, {j})")
            if np.any(np.diag(m) != 0):
                raise ValidationError(f"{name} matrix has a nonzero diagonal")
            if np.any(m[off] <= 0):
                raise ValidationError(f"{name} matrix has a non-positive off-diagonal entry")
            bad = triangle_violation(m)
            if bad is not None:
                raise ValidationError(f"{name} matrix violates the triangle inequality at {bad}")

    def __len__(self):
        return len(self.time)

    def __eq__(self, other):
        if not isinstance(other, TravelMatrix):
            return NotImplemented
        return np.array_equal(self.time, other.time) and np.array_equal(self.dist, other.dist)

    __hash__ = None


@dataclass(frozen=True)
class Order:
    id: int
    pickup_loc: int
    dropoff_loc: int
    pickup_time: int


@dataclass(frozen=True)
class Task:
    id: int
    origin: int
    dest: int
    pickup_time: int
    leg: Leg
    order_id: int

    def __post_init__(self):
        if self.origin == self.dest:
            raise ValidationError(f"task {self.id} has origin == dest")
        object.__setattr__(self, "leg", Leg(self.leg))


@dataclass(frozen=True, eq=False)
class Instance:
    locations: tuple[Location, ...]
    matrix: TravelMatrix
    tasks: tuple[Task, ...]
    fleet_size: int
    flexibility: int
    service_time: int
    horizon: int = WEEK
    auto_cost_factor: float = 0.75
    _loc_index: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "locations", tuple(self.locations))
        object.__setattr__(self, "tasks", tuple(self.tasks))
        ids = [loc.id for loc in self.locations]
        if len(set(ids)) != len(ids):
            raise ValidationError("location ids are not unique")
        if len(ids) != len(self.matrix):
            raise ValidationError(
                f"{len(ids)} locations but travel matrices are {len(self.matrix)}x{len(self.matrix)}"
            )
        object.__setattr__(self, "_loc_index", {lid: i for i, lid in enumerate(ids)})
        if self.fleet_size < 1:
            raise ValidationError("fleet_size must be >= 1")
        if self.flexibility < 0:
            raise ValidationError("flexibility must be >= 0")
        if self.service_time < 0:
            raise ValidationError("service_time must be >= 0")
        if not 0 < self.auto_cost_factor <= 1:
            raise ValidationError("auto_cost_factor must lie in (0, 1]")
        task_ids = set()
        for t in self.tasks:
            if t.id in task_ids:
                raise ValidationError(f"duplicate task id {t.id}")
            task_ids.add(t.id)
            for loc in (t.origin, t.dest):
                if loc not in self._loc_index:
                    raise StructuralError(f"task {t.id} references unknown location {loc}")
            if not 0 <= t.pickup_time <= self.horizon:
                raise ValidationError(f"task {t.id} pickup time {t.pickup_time} outside horizon")
            if t.leg is Leg.AUTONOMOUS and not (self.is_hub(t.origin) and self.is_hub(t.dest)):
                raise ValidationError(f"autonomous task {t.id} does not run hub to hub")
        if self.auto_tasks and len(self.hubs) < 2:
            raise ValidationError("autonomous tasks need at least two hubs")

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.locations == other.locations
            and self.matrix == other.matrix
            and self.tasks == other.tasks
            and (self.fleet_size, self.flexibility, self.service_time, self.horizon)
            == (other.fleet_size, other.flexibility, other.service_time, other.horizon)
            and self.auto_cost_factor == other.auto_cost_factor
        )

    __hash__ = None

    def index(self, loc_id: int) -> int:
        try:
            return self._loc_index[loc_id]
        except KeyError:
            raise StructuralError(f"unknown location id {loc_id!r}") from None

    def is_hub(self, loc_id: int) -> bool:
        return self.locations[self.index(loc_id)].is_hub

    @cached_property
    def hubs(self) -> tuple[int, ...]:
        return tuple(loc.id for loc in self.locations if loc.is_hub)

    def time(self, a: int, b: int) -> int:
        return int(self.matrix.time[self.index(a), self.index(b)])

    def dist(self, a: int, b: int) -> int:
        return int(self.matrix.dist[self.index(a), self.index(b)])

    @cached_property
    def auto_tasks(self) -> tuple[Task, ...]:
        """Autonomous tasks, the scope of every optimizer."""
        return tuple(t for t in self.tasks if t.leg is Leg.AUTONOMOUS)

    @cached_property
    def task_by_id(self) -> dict[int, Task]:
        return {t.id: t for t in self.tasks}


def task_duration(task: Task, inst: Instance) -> int:
    """Driving time plus loading and unloading."""
    return inst.time(task.origin, task.dest) + 2 * inst.service_time


def service_cost(task: Task, inst: Instance) -> int:
    """Loaded distance of a task in scaled miles."""
    return inst.dist(task.origin, task.dest)
