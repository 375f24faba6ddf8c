import re

import pytest

from stepnet.errors import SimulationError
from stepnet.reports import SUMMARY_COLUMNS, emit_csv, emit_svg, line_chart_svg, sweep
from stepnet.scenario import parse_scenario, run_scenario

SCN = """
[sim]
duration_s = 2
seed = 9
detail = per_hop

[topology]
steps = 2
nodes_per_step = 1
link_rate_bps = 10000000

[qdisc]
kind = fifo
fifo_capacity = 500

[hosts]
src = router=0
dst = router=1

[flow]
name = call
app = voip
src = src
dst = dst

[flow]
name = tv
app = video
src = src
dst = dst
"""


@pytest.fixture(scope="module")
def result():
    return run_scenario(parse_scenario(SCN))


def read_series(path):
    lines = path.read_text().splitlines()
    assert lines[0] == "time_s,value"
    return [tuple(float(x) for x in line.split(",")) for line in lines[1:]]


def test_emit_csv_writes_summary_and_series(result, tmp_path):
    written = emit_csv(result, tmp_path / "out")
    names = {p.name for p in written}
    assert "summary.csv" in names
    for cls in ("voice", "video", "best_effort"):
        for family in (
            "delay",
            "delay_variation",
            "jitter",
            "traffic_received_bps",
            "traffic_received_pps",
            "drops",
        ):
            assert f"{family}.{cls}.csv" in names
    assert "queuing_delay.node0.csv" in names  # detail mode adds router series


def test_summary_csv_columns_and_conservation(result, tmp_path):
    emit_csv(result, tmp_path)
    lines = (tmp_path / "summary.csv").read_text().splitlines()
    assert lines[0] == ",".join(SUMMARY_COLUMNS)
    assert len(lines) == 5  # three classes plus a totals row
    for line in lines[1:]:
        cells = line.split(",")
        sent, delivered, dropped, in_flight = (int(cells[i]) for i in (1, 2, 3, 4))
        assert sent == delivered + dropped + in_flight


def test_series_rows_time_ascending_and_round_trip_exactly(result, tmp_path):
    emit_csv(result, tmp_path)
    from stepnet.qdisc import TrafficClass

    rows = read_series(tmp_path / "traffic_received_bps.voice.csv")
    times = [t for t, _ in rows]
    assert times == sorted(times)
    in_memory = [(t, bps) for t, bps, _ in result.store.traffic_received(TrafficClass.VOICE)]
    assert rows == in_memory  # repr round-trips floats exactly


def test_reemit_overwrites_deterministically(result, tmp_path):
    emit_csv(result, tmp_path)
    first = {p.name: p.read_bytes() for p in tmp_path.glob("*.csv")}
    emit_csv(result, tmp_path)
    second = {p.name: p.read_bytes() for p in tmp_path.glob("*.csv")}
    assert first == second


def test_unwritable_directory_error_names_path(result, tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("a file, not a directory")
    target = blocker / "sub"
    with pytest.raises(SimulationError, match="blocker"):
        emit_csv(result, target)


def test_svg_polyline_matches_csv_rows(result, tmp_path):
    emit_csv(result, tmp_path)
    emit_svg(result, tmp_path)
    for csv_path in tmp_path.glob("*.csv"):
        if csv_path.name == "summary.csv":
            continue
        svg = csv_path.with_suffix(".svg").read_text()
        rows = read_series(csv_path)
        match = re.search(r'<polyline points="([^"]*)"', svg)
        if rows:
            assert match, f"{csv_path.name}: chart should have a polyline"
            assert len(match.group(1).split()) == len(rows)
        else:
            assert match is None
            assert "no data" in svg


def test_svg_axes_are_labeled_with_units(result, tmp_path):
    paths = emit_svg(result, tmp_path)
    delay_chart = next(p for p in paths if p.name == "delay.voice.svg")
    svg = delay_chart.read_text()
    assert "time [s]" in svg
    assert "[s]" in svg.split("time [s]")[1]  # y-axis carries a unit too


def test_empty_chart_has_no_data_annotation():
    svg = line_chart_svg("drops / voice", "time [s]", "packets dropped [packet/s]", [])
    assert "no data" in svg
    assert "<polyline" not in svg


def test_sweep_emits_per_kind_dirs_and_comparison(tmp_path):
    config = parse_scenario(SCN)
    results = sweep(config, ("fifo", "pq", "wfq"), tmp_path)
    assert set(results) == {"fifo", "pq", "wfq"}
    for kind in ("fifo", "pq", "wfq"):
        assert (tmp_path / kind / "summary.csv").exists()
    lines = (tmp_path / "comparison.csv").read_text().splitlines()
    assert lines[0].startswith("qdisc,class,sent")
    assert len(lines) == 1 + 3 * 4  # three kinds, three classes plus totals each
    # generation is independent of scheduling: per-class sent counts match
    sent = {}
    for line in lines[1:]:
        kind, label, sent_count = line.split(",")[:3]
        sent.setdefault(label, set()).add(sent_count)
    for label, values in sent.items():
        assert len(values) == 1, f"sent counts differ across disciplines for {label}"
