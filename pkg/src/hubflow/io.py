"""JSON persistence for instances and plans."""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ParseError, ValidationError
from .model import Instance, Location, Task, TravelMatrix
from .plan import Plan, Route, route_cost

INSTANCE_KEYS = (
    "locations",
    "time_matrix",
    "dist_matrix",
    "tasks",
    "fleet_size",
    "flexibility",
    "service_time",
    "horizon",
    "auto_cost_factor",
)


def instance_to_dict(inst: Instance) -> dict:
    locs = []
    for loc in inst.locations:
        d = {"id": loc.id, "is_hub": loc.is_hub}
        if loc.label is not None:
            d["label"] = loc.label
        if loc.coord is not None:
            d["coord"] = list(loc.coord)
        locs.append(d)
    return {
        "locations": locs,
        "time_matrix": inst.matrix.time.tolist(),
        "dist_matrix": inst.matrix.dist.tolist(),
        "tasks": [
            {
                "id": t.id,
                "origin": t.origin,
                "dest": t.dest,
                "pickup_time": t.pickup_time,
                "leg": t.leg.value,
                "order_id": t.order_id,
            }
            for t in inst.tasks
        ],
        "fleet_size": inst.fleet_size,
        "flexibility": inst.flexibility,
        "service_time": inst.service_time,
        "horizon": inst.horizon,
        "auto_cost_factor": inst.auto_cost_factor,
    }


def _get(d, key, path, kind=None):
    if not isinstance(d, dict):
        raise ParseError("expected an object", field=path or "<root>")
    if key not in d:
        raise ParseError("missing required field", field=f"{path}{key}")
    v = d[key]
    if kind is int and (not isinstance(v, int) or isinstance(v, bool)):
        raise ParseError(f"expected an integer, got {v!r}", field=f"{path}{key}")
    if kind is float and (not isinstance(v, (int, float)) or isinstance(v, bool)):
        raise ParseError(f"expected a number, got {v!r}", field=f"{path}{key}")
    if kind is list and not isinstance(v, list):
        raise ParseError("expected an array", field=f"{path}{key}")
    return v


def instance_from_dict(d: dict) -> Instance:
    for key in INSTANCE_KEYS:
        _get(d, key, "")
    locations = []
    for i, ld in enumerate(_get(d, "locations", "", list)):
        coord = ld.get("coord") if isinstance(ld, dict) else None
        locations.append(
            Location(
                id=_get(ld, "id", f"locations[{i}].", int),
                is_hub=bool(_get(ld, "is_hub", f"locations[{i}].")),
                label=ld.get("label"),
                coord=tuple(coord) if coord is not None else None,
            )
        )
    tasks = []
    for i, td in enumerate(_get(d, "tasks", "", list)):
        p = f"tasks[{i}]."
        try:
            tasks.append(
                Task(
                    id=_get(td, "id", p, int),
                    origin=_get(td, "origin", p, int),
                    dest=_get(td, "dest", p, int),
                    pickup_time=_get(td, "pickup_time", p, int),
                    leg=_get(td, "leg", p),
                    order_id=_get(td, "order_id", p, int),
                )
            )
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), field=f"tasks[{i}]") from exc
    for key in ("time_matrix", "dist_matrix"):
        rows = _get(d, key, "", list)
        for r, row in enumerate(rows):
            if not isinstance(row, list) or not all(
                isinstance(x, int) and not isinstance(x, bool) for x in row
            ):
                raise ParseError("matrix rows must be arrays of integers", field=f"{key}[{r}]")
    matrix = TravelMatrix(d["time_matrix"], d["dist_matrix"])
    return Instance(
        locations=tuple(locations),
        matrix=matrix,
        tasks=tuple(tasks),
        fleet_size=_get(d, "fleet_size", "", int),
        flexibility=_get(d, "flexibility", "", int),
        service_time=_get(d, "service_time", "", int),
        horizon=_get(d, "horizon", "", int),
        auto_cost_factor=float(_get(d, "auto_cost_factor", "", float)),
    )


def plan_to_dict(plan: Plan) -> dict:
    routes = []
    for r in plan.routes:
        starts = r.start_times or (None,) * len(r.tasks)
        routes.append([{"task_id": t, "start_time": s} for t, s in zip(r.tasks, starts)])
    return {"routes": routes, "total_cost": plan.total_cost, "empty_cost": plan.empty_cost}


def plan_from_dict(d: dict, inst: Instance | None = None) -> Plan:
    """Decode a plan. Route costs are not stored; pass ``inst`` to recompute them."""
    routes = []
    for k, rd in enumerate(_get(d, "routes", "", list)):
        if not isinstance(rd, list):
            raise ParseError("expected an array of stops", field=f"routes[{k}]")
        tasks = tuple(_get(s, "task_id", f"routes[{k}][{i}].", int) for i, s in enumerate(rd))
        starts = tuple(_get(s, "start_time", f"routes[{k}][{i}].", int) for i, s in enumerate(rd))
        cost = 0
        if inst is not None:
            unknown = [t for t in tasks if t not in inst.task_by_id]
            if unknown:
                raise ValidationError(f"plan references tasks missing from the instance: {unknown}")
            cost = route_cost(tasks, inst)
        routes.append(Route(tasks, starts, cost))
    return Plan(
        tuple(routes),
        _get(d, "total_cost", "", int),
        _get(d, "empty_cost", "", int),
    )


def _read_json(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc


def _write_json(obj, path):
    Path(path).write_text(json.dumps(obj, separators=(",", ":")) + "\n", encoding="utf-8")


def load_instance(path) -> Instance:
    return instance_from_dict(_read_json(path))


def save_instance(inst: Instance, path) -> None:
    _write_json(instance_to_dict(inst), path)


def load_plan(path, inst: Instance | None = None) -> Plan:
    return plan_from_dict(_read_json(path), inst)


def save_plan(plan: Plan, path) -> None:
    _write_json(plan_to_dict(plan), path)
