import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hubflow.generator import PRESETS, generate_instance  # noqa: E402
from hubflow.model import MILE, WEEK, Instance, Leg, Location, Task, TravelMatrix  # noqa: E402


def line_matrix(xs, minutes_per_mile: float = 1.0) -> TravelMatrix:
    """Locations on a line; positions in miles. Metric by construction."""
    xs = np.asarray(xs, dtype=float)
    miles = np.abs(xs[:, None] - xs[None, :])
    return TravelMatrix(np.rint(miles * minutes_per_mile).astype(int), np.rint(miles * MILE).astype(int))


def build(matrix: TravelMatrix, tasks, *, fleet=5, delta=0, service=30, hubs=None,
          horizon=WEEK, factor=0.75) -> Instance:
    """``tasks`` are (origin, dest, pickup) triples of location indices; they
    become autonomous tasks with ids 0, 1, ... Every location is a hub
    unless ``hubs`` says otherwise."""
    n = len(matrix)
    hubs = set(range(n)) if hubs is None else set(hubs)
    locs = tuple(Location(i, i in hubs) for i in range(n))
    ts = tuple(Task(k, o, d, p, Leg.AUTONOMOUS, k) for k, (o, d, p) in enumerate(tasks))
    return Instance(locs, matrix, ts, fleet, delta, service, horizon, factor)


def tiny_instance(seed: int, n_orders: int | None = None, fleet: int | None = None) -> Instance:
    p = PRESETS["tiny"]
    if n_orders is not None:
        p = replace(p, n_orders=n_orders)
    if fleet is not None:
        p = replace(p, fleet_size=fleet)
    return generate_instance(p, seed)


def scaled_instance(seed: int, n_orders: int, **kw) -> Instance:
    return generate_instance(replace(PRESETS["n17"], n_orders=n_orders, **kw), seed)


@pytest.fixture
def chain3():
    """Three hub legs 0->1, 1->2, 2->3 on a line, each 100 mi and 100 min,
    timed so one truck can run them back to back at zero flexibility."""
    m = line_matrix([0, 100, 200, 300])
    return build(m, [(0, 1, 0), (1, 2, 160), (2, 3, 320)], fleet=3, delta=0, service=30)


_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
