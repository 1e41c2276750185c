import json

import pytest
from hypothesis import given, strategies as st

from ahrsim.corpus import get
from ahrsim.engine import Metrics, run
from ahrsim.report import FIELDS, format_metrics, format_report, parse_metrics, sweep_table


def _metrics(makespan=80, busy=(40, 30)):
    return Metrics(processors=len(busy), makespan=makespan, busy_cycles=list(busy),
                   nodes_executed=3, expansions=1, fifo_max_depth=2, bus_busy_cycles=9,
                   total_work=sum(busy), critical_path=40)


def test_microseconds_two_decimals():
    text = format_metrics(_metrics(80), "csv")
    assert text.splitlines()[1].split(",")[2] == "13.33"


def test_utilization_four_decimals():
    row = format_metrics(_metrics(80, (40, 30)), "csv").splitlines()[1].split(",")
    assert row[FIELDS.index("utilization")] == "0.4375"


def test_csv_header_and_json_keys_match_fields():
    m = _metrics()
    assert tuple(format_metrics(m, "csv").splitlines()[0].split(",")) == FIELDS
    assert tuple(json.loads(format_metrics(m, "json"))) == FIELDS


@given(st.integers(1, 10**7), st.lists(st.integers(0, 10**6), min_size=1, max_size=64))
def test_round_trip(makespan, busy):
    busy = [min(b, makespan) for b in busy]
    m = _metrics(makespan, busy)
    for fmt in ("csv", "json"):
        assert parse_metrics(format_metrics(m, fmt), fmt) == m


def test_round_trip_real_report():
    r = run(get("hanoi").source, 17)
    for fmt in ("csv", "json"):
        assert parse_metrics(format_report(r, fmt), fmt) == r.metrics


def test_tampered_ratio_rejected():
    text = format_metrics(_metrics(), "csv").replace("0.4375", "0.5000")
    with pytest.raises(ValueError):
        parse_metrics(text, "csv")


def test_sweep_speedup_column():
    src = get("fanout16").source
    reports = [run(src, p) for p in (1, 2, 4)]
    table = sweep_table(reports, reports[0].metrics.makespan).splitlines()
    rows = [dict(zip(table[0].split(","), line.split(","))) for line in table[1:]]
    assert rows[0]["speedup"] == "1.0000"
    for row in rows:
        want = int(rows[0]["makespan"]) / int(row["makespan"])
        assert row["speedup"] == f"{want:.4f}"
