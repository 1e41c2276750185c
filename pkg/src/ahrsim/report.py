"""Metrics export (CSV / JSON) and sweep tables."""

from __future__ import annotations

import csv
import io
import json
from decimal import Decimal
from typing import Sequence

from .engine import Metrics, RunReport

FIELDS = (
    "processors",
    "makespan",
    "makespan_us",
    "busy_cycles",
    "utilization",
    "nodes_executed",
    "expansions",
    "fifo_max_depth",
    "bus_busy_cycles",
    "total_work",
    "critical_path",
)

SWEEP_FIELDS = (
    "processors",
    "makespan",
    "makespan_us",
    "speedup",
    "utilization",
    "nodes_executed",
    "expansions",
    "fifo_max_depth",
    "bus_busy_cycles",
    "total_work",
    "critical_path",
)

_INT_FIELDS = ("processors", "makespan", "nodes_executed", "expansions", "fifo_max_depth",
               "bus_busy_cycles", "total_work", "critical_path")


def _ratio(x: float) -> str:
    return f"{x:.4f}"


def metrics_row(m: Metrics) -> dict[str, str]:
    """Flat string record; ``busy_cycles`` is ``;``-separated."""
    return {
        "processors": str(m.processors),
        "makespan": str(m.makespan),
        "makespan_us": str(m.makespan_us),
        "busy_cycles": ";".join(str(b) for b in m.busy_cycles),
        "utilization": _ratio(m.utilization),
        "nodes_executed": str(m.nodes_executed),
        "expansions": str(m.expansions),
        "fifo_max_depth": str(m.fifo_max_depth),
        "bus_busy_cycles": str(m.bus_busy_cycles),
        "total_work": str(m.total_work),
        "critical_path": str(m.critical_path),
    }


def format_metrics(m: Metrics, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerow(metrics_row(m))
        return buf.getvalue()
    if fmt == "json":
        record = {
            "processors": m.processors,
            "makespan": m.makespan,
            "makespan_us": float(m.makespan_us),
            "busy_cycles": list(m.busy_cycles),
            "utilization": float(_ratio(m.utilization)),
            "nodes_executed": m.nodes_executed,
            "expansions": m.expansions,
            "fifo_max_depth": m.fifo_max_depth,
            "bus_busy_cycles": m.bus_busy_cycles,
            "total_work": m.total_work,
            "critical_path": m.critical_path,
        }
        return json.dumps(record) + "\n"
    raise ValueError(f"unknown metrics format {fmt!r}")


def format_report(report: RunReport, fmt: str) -> str:
    return format_metrics(report.metrics, fmt)


def parse_metrics(text: str, fmt: str) -> Metrics:
    """Inverse of :func:`format_metrics` for the integer fields.

    Derived ratios are checked against the recomputed values at printed
    precision; a mismatch raises ValueError.
    """
    if fmt == "csv":
        rows = list(csv.DictReader(io.StringIO(text)))
        if len(rows) != 1:
            raise ValueError("expected exactly one metrics row")
        row = rows[0]
        if tuple(row) != FIELDS:
            raise ValueError("unexpected CSV header")
        busy = [int(b) for b in row["busy_cycles"].split(";") if b]
        utilization, makespan_us = row["utilization"], row["makespan_us"]
    elif fmt == "json":
        row = json.loads(text)
        if tuple(row) != FIELDS:
            raise ValueError("unexpected JSON keys")
        busy = [int(b) for b in row["busy_cycles"]]
        utilization = _ratio(row["utilization"])
        makespan_us = f"{row['makespan_us']:.2f}"
    else:
        raise ValueError(f"unknown metrics format {fmt!r}")
    m = Metrics(busy_cycles=busy, **{k: int(row[k]) for k in _INT_FIELDS})
    if _ratio(m.utilization) != utilization:
        raise ValueError("utilization does not match the cycle counts")
    if m.makespan_us != Decimal(makespan_us):
        raise ValueError("makespan_us does not match makespan")
    return m


def sweep_table(reports: Sequence[RunReport], baseline: int) -> str:
    """CSV with one row per report; speedup is relative to *baseline* cycles."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        row = metrics_row(r.metrics)
        del row["busy_cycles"]
        m = r.metrics.makespan
        row["speedup"] = _ratio(baseline / m) if m else ""
        writer.writerow({k: row[k] for k in SWEEP_FIELDS})
    return buf.getvalue()
