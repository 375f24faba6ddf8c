"""Report emission: CSV time series, a per-class summary table, and static
SVG line charts. Floats are written with repr(), so re-reading a series
reproduces the in-memory values exactly.
"""

from pathlib import Path

from .errors import SimulationError
from .netmodel import ROUTER
from .qdisc import CLASS_ORDER
from .scenario import RunResult, run_scenario

SUMMARY_COLUMNS = (
    "class",
    "sent",
    "delivered",
    "dropped",
    "in_flight",
    "mean_delay_s",
    "delay_var_s2",
    "throughput_bps",
)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _prepare_dir(out_dir) -> Path:
    path = Path(out_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise SimulationError(f"cannot write to output directory {path}: {exc}") from exc
    return path


def _write_series(path: Path, rows) -> None:
    lines = ["time_s,value"]
    lines.extend(f"{_fmt(t)},{_fmt(v)}" for t, v in rows)
    path.write_text("\n".join(lines) + "\n")


def _series_files(result: RunResult):
    """(filename stem, axis label, rows) for every emitted series."""
    store = result.store
    out = []
    for cls in CLASS_ORDER:
        label = cls.label
        out.append((f"delay.{label}", "mean end-to-end delay [s]", store.delay_series(cls)))
        out.append(
            (
                f"delay_variation.{label}",
                "delay variance [s^2]",
                store.delay_variation_series(cls),
            )
        )
        out.append((f"jitter.{label}", "smoothed delay jitter [s]", store.jitter_series(cls)))
        received = store.traffic_received(cls)
        out.append(
            (
                f"traffic_received_bps.{label}",
                "traffic received [byte/s]",
                [(t, bps) for t, bps, _ in received],
            )
        )
        out.append(
            (
                f"traffic_received_pps.{label}",
                "traffic received [packet/s]",
                [(t, pps) for t, _, pps in received],
            )
        )
        _, _, drop_series = store.drops(cls)
        out.append((f"drops.{label}", "packets dropped [packet/s]", drop_series))
    if store.detail:
        for node in result.topology.routers():
            out.append(
                (
                    f"queuing_delay.node{node.id}",
                    "mean queuing delay [s]",
                    store.queuing_delay(node.id),
                )
            )
    return out


def emit_csv(result: RunResult, out_dir) -> list[Path]:
    """Write summary.csv plus one `<metric>.<class>.csv` per series. Rows
    are time-ascending; repeated emission into the same directory
    overwrites deterministically."""
    path = _prepare_dir(out_dir)
    written = []

    summary_path = path / "summary.csv"
    lines = [",".join(SUMMARY_COLUMNS)]
    for row in result.store.summarize():
        lines.append(
            ",".join(
                (
                    row.label,
                    str(row.sent),
                    str(row.delivered),
                    str(row.dropped),
                    str(row.in_flight),
                    _fmt(row.mean_delay_s),
                    _fmt(row.delay_var_s2),
                    _fmt(row.throughput_bps),
                )
            )
        )
    summary_path.write_text("\n".join(lines) + "\n")
    written.append(summary_path)

    for stem, _, rows in _series_files(result):
        series_path = path / f"{stem}.csv"
        _write_series(series_path, rows)
        written.append(series_path)
    return written


# -- SVG charts -----------------------------------------------------------------

_W, _H = 640, 400
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 20, 40, 50


def _ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def line_chart_svg(title: str, xlabel: str, ylabel: str, rows) -> str:
    """A minimal self-contained line chart. One polyline point per row."""
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="22" text-anchor="middle" font-size="15" '
        f'font-family="sans-serif">{title}</text>',
    ]
    x0, x1 = _MARGIN_L, _W - _MARGIN_R
    y0, y1 = _H - _MARGIN_B, _MARGIN_T
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>'
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>'
    )
    parts.append(
        f'<text x="{(x0 + x1) / 2}" y="{_H - 12}" text-anchor="middle" font-size="12" '
        f'font-family="sans-serif">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{(y0 + y1) / 2}" text-anchor="middle" font-size="12" '
        f'font-family="sans-serif" transform="rotate(-90 16 {(y0 + y1) / 2})">{ylabel}</text>'
    )
    if not rows:
        parts.append(
            f'<text x="{(x0 + x1) / 2}" y="{(y0 + y1) / 2}" text-anchor="middle" '
            f'font-size="14" font-family="sans-serif" fill="gray">no data</text>'
        )
        parts.append("</svg>")
        return "\n".join(parts)

    xs = [t for t, _ in rows]
    ys = [v for _, v in rows]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if y_lo > 0:
        y_lo = 0.0
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0

    def sx(x):
        return x0 + (x - x_lo) / x_span * (x1 - x0)

    def sy(y):
        return y0 - (y - y_lo) / y_span * (y0 - y1)

    for tick in _ticks(x_lo, x_hi):
        parts.append(
            f'<line x1="{sx(tick):.2f}" y1="{y0}" x2="{sx(tick):.2f}" y2="{y0 + 5}" stroke="black"/>'
            f'<text x="{sx(tick):.2f}" y="{y0 + 18}" text-anchor="middle" font-size="10" '
            f'font-family="sans-serif">{tick:.4g}</text>'
        )
    for tick in _ticks(y_lo, y_hi):
        parts.append(
            f'<line x1="{x0 - 5}" y1="{sy(tick):.2f}" x2="{x0}" y2="{sy(tick):.2f}" stroke="black"/>'
            f'<text x="{x0 - 8}" y="{sy(tick):.2f}" text-anchor="end" font-size="10" '
            f'font-family="sans-serif" dominant-baseline="middle">{tick:.4g}</text>'
        )
    points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in rows)
    parts.append(
        f'<polyline points="{points}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts)


def emit_svg(result: RunResult, out_dir) -> list[Path]:
    """One chart per metric family per class (plus per-router queuing delay
    when detail is on), mirroring the CSV series files."""
    path = _prepare_dir(out_dir)
    written = []
    for stem, ylabel, rows in _series_files(result):
        title = stem.replace(".", " / ")
        svg = line_chart_svg(title, "time [s]", ylabel, rows)
        svg_path = path / f"{stem}.svg"
        svg_path.write_text(svg + "\n")
        written.append(svg_path)
    return written


# -- sweep ----------------------------------------------------------------------


def sweep(config, kinds, out_dir, seed=None, duration_s=None, charts=False):
    """Run the scenario once per discipline into per-kind subdirectories and
    write a cross-discipline comparison table."""
    path = _prepare_dir(out_dir)
    results = {}
    for kind in kinds:
        result = run_scenario(config, seed=seed, qdisc_kind=kind, duration_s=duration_s)
        sub = path / kind
        emit_csv(result, sub)
        if charts:
            emit_svg(result, sub)
        results[kind] = result

    lines = [",".join(("qdisc",) + SUMMARY_COLUMNS)]
    for kind, result in results.items():
        for row in result.store.summarize():
            lines.append(
                ",".join(
                    (
                        kind,
                        row.label,
                        str(row.sent),
                        str(row.delivered),
                        str(row.dropped),
                        str(row.in_flight),
                        _fmt(row.mean_delay_s),
                        _fmt(row.delay_var_s2),
                        _fmt(row.throughput_bps),
                    )
                )
            )
    (path / "comparison.csv").write_text("\n".join(lines) + "\n")
    return results
