"""Turning customer orders into first-mile, autonomous and last-mile tasks."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import StructuralError
from .model import Instance, Leg, Order, Task, task_duration

DETOUR_FACTOR = 2.0


class DropReason(str, Enum):
    NO_AUTONOMOUS_LEG = "no-autonomous-leg"
    DETOUR = "detour"


@dataclass(frozen=True)
class Split:
    """The legs of one order. A leg is None when it would have zero length."""

    first: Task | None
    auto: Task | None
    last: Task | None

    @property
    def automatable(self) -> bool:
        return self.auto is not None

    def tasks(self) -> list[Task]:
        return [t for t in (self.first, self.auto, self.last) if t is not None]


def nearest_hub(loc: int, inst: Instance, reverse: bool = False) -> int:
    """Hub closest to ``loc`` by distance; ties go to the lowest id.

    With ``reverse`` the distance is measured from the hub to ``loc``.
    """
    if not inst.hubs:
        raise StructuralError("instance has no hubs")
    if reverse:
        return min(inst.hubs, key=lambda h: (inst.dist(h, loc), h))
    return min(inst.hubs, key=lambda h: (inst.dist(loc, h), h))


def order_hubs(order: Order, inst: Instance) -> tuple[int, int]:
    return nearest_hub(order.pickup_loc, inst), nearest_hub(order.dropoff_loc, inst, reverse=True)


def split_order(order: Order, inst: Instance) -> Split:
    """Split an order into its three legs with chained pickup times.

    Task ids are ``3 * order.id + leg_index`` so they are unique per order.
    When both endpoints map to the same hub there is no autonomous leg and
    the order is carried as a first mile into the hub and a last mile out.
    """
    if order.pickup_loc == order.dropoff_loc:
        raise StructuralError(f"order {order.id} has pickup == dropoff")
    h1, h2 = order_hubs(order, inst)
    p = order.pickup_time
    first = auto = last = None
    if order.pickup_loc != h1:
        first = Task(3 * order.id, order.pickup_loc, h1, p, Leg.FIRST_MILE, order.id)
        p += task_duration(first, inst)
    if h1 != h2:
        auto = Task(3 * order.id + 1, h1, h2, p, Leg.AUTONOMOUS, order.id)
        p += task_duration(auto, inst)
    if h2 != order.dropoff_loc:
        last = Task(3 * order.id + 2, h2, order.dropoff_loc, p, Leg.LAST_MILE, order.id)
    return Split(first, auto, last)


def hub_routed_distance(order: Order, inst: Instance) -> int:
    h1, h2 = order_hubs(order, inst)
    return (
        inst.dist(order.pickup_loc, h1) + inst.dist(h1, h2) + inst.dist(h2, order.dropoff_loc)
    )


def filter_orders(orders, inst: Instance, detour_factor: float = DETOUR_FACTOR):
    """Keep orders that have an autonomous leg and no excessive hub detour.

    Returns ``(kept, dropped)`` where ``dropped`` holds ``(order, DropReason)``.
    """
    kept, dropped = [], []
    for order in orders:
        h1, h2 = order_hubs(order, inst)
        if h1 == h2:
            dropped.append((order, DropReason.NO_AUTONOMOUS_LEG))
        elif hub_routed_distance(order, inst) > detour_factor * inst.dist(
            order.pickup_loc, order.dropoff_loc
        ):
            dropped.append((order, DropReason.DETOUR))
        else:
            kept.append(order)
    return kept, dropped


def orders_from_tasks(inst: Instance) -> list[Order]:
    """Recover each order's endpoints and requested pickup time from its legs."""
    legs: dict[int, list[Task]] = {}
    for t in inst.tasks:
        legs.setdefault(t.order_id, []).append(t)
    order_of_leg = {Leg.FIRST_MILE: 0, Leg.AUTONOMOUS: 1, Leg.LAST_MILE: 2}
    orders = []
    for oid in sorted(legs):
        chain = sorted(legs[oid], key=lambda t: order_of_leg[t.leg])
        orders.append(Order(oid, chain[0].origin, chain[-1].dest, chain[0].pickup_time))
    return orders
