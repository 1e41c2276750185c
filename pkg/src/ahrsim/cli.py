"""Command-line front end.

Exit status: 0 success, 1 program aborted, 2 usage/parse/build error,
3 simulator and oracle disagree (``--check``).
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .engine import DEFAULT_PROCESSORS, Capacities, RunReport, run
from .errors import DEFAULT_EXPANSION_LIMIT
from .graph import DEFAULT_NODES
from .interp import evaluate_source
from .lisp import DEFAULT_CELLS, LispError
from .processor import CostModel
from .program import BuildError
from .report import format_report, sweep_table
from .scheduler import MAX_PROCESSORS

EXIT_OK, EXIT_ABORT, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _procs(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if not 1 <= n <= MAX_PROCESSORS:
        raise argparse.ArgumentTypeError(f"processor count must be in 1..{MAX_PROCESSORS}")
    return n


def _proc_list(text: str) -> list[int]:
    values = [_procs(t) for t in text.split(",") if t.strip()]
    if not values:
        raise argparse.ArgumentTypeError("empty processor list")
    if len(set(values)) != len(values):
        raise argparse.ArgumentTypeError("processor counts must be distinct")
    return values


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ahrsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("file", type=Path)
        p.add_argument("--cost-model", type=Path, help="file of 'name value' cost lines")
        p.add_argument("--cells", type=_positive, default=DEFAULT_CELLS,
                       help="passive memory capacity in cells")
        p.add_argument("--nodes", type=_positive, default=DEFAULT_NODES,
                       help="active memory capacity in nodes")
        p.add_argument("--fifo-cap", type=_positive, default=None,
                       help="ready FIFO capacity (default unbounded)")
        p.add_argument("--expansion-limit", type=_positive, default=DEFAULT_EXPANSION_LIMIT)

    r = sub.add_parser("run", help="simulate one program")
    common(r)
    r.add_argument("-p", "--procs", type=_procs, default=DEFAULT_PROCESSORS, dest="p")
    r.add_argument("--trace", type=Path, help="write the event trace here")
    r.add_argument("--metrics", choices=("csv", "json"), help="print metrics after the value")
    r.add_argument("--check", action="store_true", help="compare with the sequential oracle")

    s = sub.add_parser("sweep", help="simulate over several processor counts")
    common(s)
    s.add_argument("--procs", type=_proc_list, default=[1, 2, 4, 8, 16, 32, 64])
    s.add_argument("--out", type=Path, help="CSV output path (default stdout)")
    s.add_argument("--jobs", type=_positive, default=1, help="parallel worker processes")
    return parser


def _setup(args) -> tuple[str, CostModel, Capacities]:
    try:
        source = args.file.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    cm = CostModel()
    if args.cost_model is not None:
        try:
            cm = CostModel.load(args.cost_model)
        except OSError as exc:
            raise UsageError(f"cannot read {args.cost_model}: {exc.strerror}") from None
        except ValueError as exc:
            raise UsageError(f"{args.cost_model}: {exc}") from None
    caps = Capacities(args.cells, args.nodes, args.fifo_cap, args.expansion_limit)
    return source, cm, caps


def _simulate(source: str, p: int, cm: CostModel, caps: Capacities) -> RunReport:
    return run(source, p, cm, caps)


def _abort_message(r: RunReport) -> str:
    where = f" (node {r.abort_node})" if r.abort_node >= 0 else ""
    return f"aborted: {r.error} at cycle {r.abort_cycle}{where}"


def cmd_run(args) -> int:
    source, cm, caps = _setup(args)
    report = _simulate(source, args.p, cm, caps)
    if args.trace is not None:
        args.trace.write_text(report.trace_text())
    status = EXIT_OK
    if report.aborted:
        print(_abort_message(report), file=sys.stderr)
        status = EXIT_ABORT
    else:
        print(report.text)
    if args.metrics:
        sys.stdout.write(format_report(report, args.metrics))
    if args.check:
        oracle = evaluate_source(source, caps.cells, caps.expansion_limit)
        if oracle.text != report.text:
            print(f"check failed: simulator {report.text}, oracle {oracle.text}",
                  file=sys.stderr)
            return EXIT_MISMATCH
    return status


def cmd_sweep(args) -> int:
    source, cm, caps = _setup(args)
    procs = list(args.procs)
    todo = procs if 1 in procs else [1] + procs
    n = len(todo)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=min(args.jobs, n)) as pool:
            reports = list(pool.map(_simulate, [source] * n, todo, [cm] * n, [caps] * n))
    else:
        reports = [_simulate(source, p, cm, caps) for p in todo]
    by_p = dict(zip(todo, reports))
    for p in todo:
        if by_p[p].aborted:
            print(f"P={p}: {_abort_message(by_p[p])}", file=sys.stderr)
            return EXIT_ABORT
    table = sweep_table([by_p[p] for p in sorted(procs)], by_p[1].metrics.makespan)
    if args.out is not None:
        args.out.write_text(table)
    else:
        sys.stdout.write(table)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "run":
            return cmd_run(args)
        return cmd_sweep(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (LispError, BuildError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
