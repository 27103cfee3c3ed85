"""Seeded synthetic instances at the scale of a regional long-haul network.

Locations are points in a plane; distances are Euclidean miles scaled to
fixed point, times follow from a constant speed. Both matrices are closed
under shortest paths afterwards, so rounding can never break the triangle
inequality.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import StructuralError
from .model import MILE, WEEK, Instance, Location, Order, TravelMatrix
from .orders import DETOUR_FACTOR, filter_orders, split_order


@dataclass(frozen=True)
class GeneratorParams:
    n_hubs: int = 17
    n_orders: int = 437  # orders kept after filtering
    n_sites: int = 120
    width: float = 750.0  # miles
    height: float = 450.0
    speed_mph: float = 55.0
    min_haul: float = 250.0  # direct-distance floor for a long-haul order
    hub_spacing: float = 30.0
    fleet_size: int = 50
    flexibility: int = 60
    service_time: int = 30
    horizon: int = WEEK
    auto_cost_factor: float = 0.75
    detour_factor: float = DETOUR_FACTOR
    max_attempts: int = 200_000


PRESETS = {
    "n17": GeneratorParams(),
    "n30": GeneratorParams(n_hubs=30, n_orders=468),
    "tiny": GeneratorParams(
        n_hubs=4,
        n_orders=5,
        n_sites=12,
        width=300.0,
        height=200.0,
        min_haul=60.0,
        hub_spacing=40.0,
        fleet_size=3,
        horizon=24 * 60,
    ),
}


def metric_closure(m: np.ndarray) -> np.ndarray:
    m = m.copy()
    for k in range(len(m)):
        np.minimum(m, m[:, k, None] + m[None, k, :], out=m)
    return m


def _scatter(rng, n, width, height, spacing, taken):
    pts = list(taken)
    out = []
    while len(out) < n:
        p = np.round(rng.uniform((0.0, 0.0), (width, height)), 1)
        if all(np.hypot(*(p - q)) >= spacing for q in pts):
            pts.append(p)
            out.append(p)
    return out


def travel_matrix(coords, speed_mph: float) -> TravelMatrix:
    xy = np.asarray(coords, dtype=float)
    miles = np.hypot(xy[:, None, 0] - xy[None, :, 0], xy[:, None, 1] - xy[None, :, 1])
    off = ~np.eye(len(xy), dtype=bool)
    dist = np.where(off, np.maximum(np.rint(miles * MILE), 1), 0).astype(np.int64)
    time = np.where(off, np.maximum(np.rint(miles / speed_mph * 60), 1), 0).astype(np.int64)
    return TravelMatrix(metric_closure(time), metric_closure(dist))


def generate_instance(params: GeneratorParams = GeneratorParams(), seed: int = 1) -> Instance:
    if params.n_hubs < 2:
        raise StructuralError("need at least two hubs")
    if params.n_orders < 1:
        raise StructuralError("need at least one order")
    if params.n_sites < 2:
        raise StructuralError("need at least two customer sites")
    rng = np.random.default_rng(seed)
    hub_xy = _scatter(rng, params.n_hubs, params.width, params.height, params.hub_spacing, [])
    site_xy = _scatter(rng, params.n_sites, params.width, params.height, 2.0, hub_xy)
    coords = hub_xy + site_xy
    locations = [
        Location(i, True, f"H{i:02d}", (float(x), float(y))) for i, (x, y) in enumerate(hub_xy)
    ] + [
        Location(params.n_hubs + i, False, f"C{i:03d}", (float(x), float(y)))
        for i, (x, y) in enumerate(site_xy)
    ]
    base = Instance(
        locations=tuple(locations),
        matrix=travel_matrix(coords, params.speed_mph),
        tasks=(),
        fleet_size=params.fleet_size,
        flexibility=params.flexibility,
        service_time=params.service_time,
        horizon=params.horizon,
        auto_cost_factor=params.auto_cost_factor,
    )

    sites = [loc.id for loc in locations if not loc.is_hub]
    tasks = []
    n_kept = 0
    for _ in range(params.max_attempts):
        if n_kept == params.n_orders:
            break
        a, b = (int(x) for x in rng.choice(sites, size=2, replace=False))
        pickup = int(rng.integers(0, params.horizon))
        if base.dist(a, b) < params.min_haul * MILE:
            continue
        order = Order(n_kept, a, b, pickup)
        kept, _ = filter_orders([order], base, params.detour_factor)
        if not kept:
            continue
        split = split_order(order, base)
        legs = split.tasks()
        end = legs[-1].pickup_time + base.time(legs[-1].origin, legs[-1].dest)
        if end + 2 * params.service_time > params.horizon:
            continue
        tasks.extend(legs)
        n_kept += 1
    else:
        if n_kept < params.n_orders:
            raise StructuralError(
                f"only {n_kept} of {params.n_orders} orders survived filtering; loosen the parameters"
            )
    return replace(base, tasks=tuple(tasks))
