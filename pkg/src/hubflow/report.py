"""Bound reports and the comparison table layout (method, LB, LB time, UB, gap, UB time)."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass

from .model import MILE

CSV_FIELDS = ("instance", "method", "lb", "lb_time_s", "ub", "gap", "ub_time_s")


def gap(ub: float, lb: float) -> float:
    """Relative optimality gap (ub - lb) / lb."""
    if lb == 0:
        return 0.0 if ub == 0 else float("inf")
    return (ub - lb) / lb


def gap_percent(ub: float, lb: float, digits: int = 1) -> float:
    return round(100 * gap(ub, lb), digits)


@dataclass
class BoundReport:
    method: str
    lb: float | None = None
    ub: int | None = None
    lb_time: float | None = None
    ub_time: float | None = None
    delta_used_for_ub: int | None = None
    converged: bool | None = None
    note: str = ""

    def __post_init__(self):
        if self.lb is not None and self.ub is not None and self.ub < self.lb - 1e-6:
            raise ValueError(f"upper bound {self.ub} below lower bound {self.lb}")

    @property
    def gap(self) -> float | None:
        if self.lb is None or self.ub is None:
            return None
        return gap(self.ub, self.lb)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["gap"] = self.gap
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def csv_row(self, instance: str = "") -> dict:
        def cell(v, fmt):
            return "-" if v is None else fmt.format(v)

        return {
            "instance": instance,
            "method": self.method,
            "lb": cell(self.lb, "{:.1f}"),
            "lb_time_s": cell(self.lb_time, "{:.3f}"),
            "ub": cell(self.ub, "{}"),
            "gap": cell(self.gap, "{:.6f}"),
            "ub_time_s": cell(self.ub_time, "{:.3f}"),
        }


def write_csv(rows, stream=None) -> str:
    """Write CSV rows (dicts keyed by ``CSV_FIELDS``); returns the text."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def format_table(reports, instance: str = "") -> str:
    """Plain-text table with miles, in the column order of the CSV."""
    lines = [f"{'instance':<12}{'method':<8}{'LB (mi)':>14}{'time':>10}{'UB (mi)':>22}{'time':>10}"]
    for r in reports:
        lb = "-" if r.lb is None else f"{r.lb / MILE:,.1f}"
        ub = "-" if r.ub is None else f"{r.ub / MILE:,.1f}"
        if r.gap is not None:
            ub += f" ({100 * r.gap:.1f}%)"
        lt = "-" if r.lb_time is None else f"{r.lb_time:.2f} s"
        ut = "-" if r.ub_time is None else f"{r.ub_time:.2f} s"
        lines.append(f"{instance:<12}{r.method:<8}{lb:>14}{lt:>10}{ub:>22}{ut:>10}")
    return "\n".join(lines)
