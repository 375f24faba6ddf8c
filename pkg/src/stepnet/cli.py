"""Command-line runner: `stepnet run|validate|sweep`."""

import argparse
import sys
from pathlib import Path

from .errors import ScenarioError, SimulationError
from .reports import emit_csv, emit_svg, sweep
from .scenario import parse_scenario, run_scenario


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="stepnet",
        description="Deterministic packet-level simulator for queuing-discipline "
        "studies on step topologies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and emit reports")
    run.add_argument("scenario", help="scenario file path")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument(
        "--qdisc", choices=("fifo", "pq", "wfq"), default=None, help="override the discipline"
    )
    run.add_argument(
        "--duration", type=float, default=None, metavar="S", help="override the duration"
    )
    run.add_argument("--out", default="out", metavar="DIR", help="output directory")
    run.add_argument(
        "--detail",
        choices=("summary", "per-hop"),
        default=None,
        help="per-hop records enable queuing-delay series",
    )
    run.add_argument("--charts", action="store_true", help="also emit SVG charts")

    validate = sub.add_parser("validate", help="check a scenario file")
    validate.add_argument("scenario", help="scenario file path")

    sw = sub.add_parser("sweep", help="run a scenario under several disciplines")
    sw.add_argument("scenario", help="scenario file path")
    sw.add_argument(
        "--qdisc",
        default="fifo,pq,wfq",
        metavar="KINDS",
        help="comma-separated disciplines (default fifo,pq,wfq)",
    )
    sw.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    sw.add_argument(
        "--duration", type=float, default=None, metavar="S", help="override the duration"
    )
    sw.add_argument("--out", default="out", metavar="DIR", help="output directory")
    sw.add_argument("--charts", action="store_true", help="also emit SVG charts")
    return parser


def _load(path_text: str):
    path = Path(path_text)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SimulationError(f"cannot read scenario {path}: {exc}") from exc
    return parse_scenario(text)


def _print_summary(result):
    print(
        f"qdisc={result.qdisc_kind} seed={result.seed} duration={result.duration_s}s "
        f"events={result.run.events_processed} clock={result.run.final_clock:.6f}s"
    )
    print(
        f"{'class':<12} {'sent':>8} {'delivered':>10} {'dropped':>8} "
        f"{'in_flight':>9} {'mean_delay_s':>13} {'throughput_bps':>15}"
    )
    for row in result.store.summarize():
        print(
            f"{row.label:<12} {row.sent:>8} {row.delivered:>10} {row.dropped:>8} "
            f"{row.in_flight:>9} {row.mean_delay_s:>13.6f} {row.throughput_bps:>15.1f}"
        )


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            _load(args.scenario)
            print(f"{args.scenario}: OK")
            return 0
        if args.command == "run":
            config = _load(args.scenario)
            detail = None if args.detail is None else args.detail == "per-hop"
            result = run_scenario(
                config,
                seed=args.seed,
                qdisc_kind=args.qdisc,
                duration_s=args.duration,
                detail=detail,
            )
            written = emit_csv(result, args.out)
            if args.charts:
                written += emit_svg(result, args.out)
            _print_summary(result)
            print(f"wrote {len(written)} files to {args.out}")
            return 0
        if args.command == "sweep":
            config = _load(args.scenario)
            kinds = [k.strip() for k in args.qdisc.split(",") if k.strip()]
            for kind in kinds:
                if kind not in ("fifo", "pq", "wfq"):
                    raise SimulationError(f"unknown qdisc kind {kind!r} in --qdisc")
            results = sweep(
                config,
                kinds,
                args.out,
                seed=args.seed,
                duration_s=args.duration,
                charts=args.charts,
            )
            for kind, result in results.items():
                print(f"--- {kind} ---")
                _print_summary(result)
            print(f"comparison written to {Path(args.out) / 'comparison.csv'}")
            return 0
    except ScenarioError as exc:
        print(f"{args.scenario}: invalid scenario", file=sys.stderr)
        for error in exc.errors:
            print(f"  {error}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
