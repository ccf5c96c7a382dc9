"""Command-line pipeline: ingest traces, synthesize, compare, stats, gen."""

from __future__ import annotations

import argparse
import fnmatch
import json
import sys
import warnings
from pathlib import Path

from . import render, stats, tracegen
from .dfg import build_dfg
from .errors import DfgError, EmptySelection, NotAPartition
from .event_model import EventLog, filter_events, read_bundle, select_cases, write_bundle
from .mapping import MappingSpec, build_activity_log
from .trace_parser import parse_filename, parse_trace_file


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DfgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iodfg",
        description="Synthesize strace I/O traces into annotated directly-follows graphs.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("ingest", help="parse trace files into a bundle directory")
    p.add_argument("traces", nargs="*", help="strace files named <cid>_<host>_<rid>.st")
    p.add_argument("--bundle", required=True, help="bundle directory to write")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synthesize", help="build a statistics-colored graph from a bundle")
    _add_query_args(p)
    p.add_argument("--color-by", choices=render.COLOR_METRICS, default="rd")
    p.add_argument("--stats-out", help="also write the statistics table as CSV")
    _add_output_args(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("compare", help="partition-color a graph from two disjoint case subsets")
    _add_query_args(p)
    p.add_argument("--green", required=True, help="glob over cid:host:rid for the green subset")
    p.add_argument("--red", required=True, help="glob over cid:host:rid for the red subset")
    _add_output_args(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("stats", help="emit the per-activity statistics table")
    _add_query_args(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--timeline", metavar="ACTIVITY",
                   help="emit the (start_us,end_us,case,pid) timeline of one activity instead")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gen", help="generate a synthetic workload's trace files")
    p.add_argument("--spec", help="JSON file with the workload spec")
    p.add_argument("--outdir", required=True)
    p.add_argument("--processes", type=int, default=4)
    p.add_argument("--mode", choices=tracegen.MODES, default="fpp")
    p.add_argument("--interface", choices=tracegen.INTERFACES, default="plain")
    p.add_argument("--segments", type=int, default=3)
    p.add_argument("--blocks", type=int, default=4)
    p.add_argument("--op-bytes", type=int, default=65536)
    p.add_argument("--base-path", default="/scratch/u1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cid", default="w")
    p.set_defaults(func=cmd_gen)

    return parser


def _add_query_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bundle", required=True, help="bundle directory to read")
    p.add_argument("--mapping", required=True, help="mapping spec JSON file")
    p.add_argument("--filter", default=None, help="keep only events whose path contains this substring")


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("dot", "json"), default="dot")
    p.add_argument("--ascii-sentinels", action="store_true", help="render START/END as words, not glyphs")


def cmd_ingest(args: argparse.Namespace) -> int:
    if not args.traces:
        print("error: no trace files", file=sys.stderr)
        return 1
    cases = []
    warning_count = 0
    for path_text in args.traces:
        path = Path(path_text)
        meta = parse_filename(path.name)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            with open(path, encoding="ascii", errors="replace") as fh:
                case = parse_trace_file(meta, fh.readlines(), source=str(path))
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        warning_count += len(caught)
        cases.append(case)
    log = EventLog(tuple(cases))
    write_bundle(log, args.bundle)
    for case in log.cases:
        print(f"case {case.id.label()}: {len(case.events)} events ({case.source})")
    print(f"{len(log.cases)} cases, {log.event_count()} events, {warning_count} warnings")
    print(f"bundle: {args.bundle}")
    return 0


def _load_query(args: argparse.Namespace) -> tuple[MappingSpec, EventLog]:
    spec = MappingSpec.load(args.mapping)
    log = read_bundle(args.bundle)
    if args.filter is not None:
        log = filter_events(log, args.filter)
    return spec, log


def _emit(args: argparse.Namespace, styled: render.StyledDfg) -> None:
    if args.format == "json":
        text = render.styled_json(styled)
    else:
        text = render.emit_dot(styled, ascii_sentinels=args.ascii_sentinels)
    _write_out(args.out, text)


def _write_out(out: str | None, text: str) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_synthesize(args: argparse.Namespace) -> int:
    spec, log = _load_query(args)
    activity_log = build_activity_log(spec, log)
    graph = build_dfg(activity_log)
    table = stats.compute_node_stats(spec, log)
    graph = stats.annotate(graph, table)
    styled = render.color_by_stat(graph, args.color_by)
    _emit(args, styled)
    if args.stats_out:
        Path(args.stats_out).write_text(stats.table_csv(table), encoding="utf-8")
    return 0


def _match_selector(pattern: str):
    return lambda case_id: fnmatch.fnmatchcase(case_id.label(), pattern)


def cmd_compare(args: argparse.Namespace) -> int:
    spec, log = _load_query(args)
    green_log = select_cases(log, _match_selector(args.green))
    red_log = select_cases(log, _match_selector(args.red))
    if not green_log.cases:
        raise EmptySelection(f"green selector {args.green!r} matched no cases")
    if not red_log.cases:
        raise EmptySelection(f"red selector {args.red!r} matched no cases")
    overlap = set(green_log.case_labels()) & set(red_log.case_labels())
    if overlap:
        raise NotAPartition(f"selectors overlap on: {sorted(overlap)}")
    full = build_dfg(build_activity_log(spec, log))
    full = stats.annotate(full, stats.compute_node_stats(spec, log))
    green = build_dfg(build_activity_log(spec, green_log))
    red = build_dfg(build_activity_log(spec, red_log))
    styled = render.color_by_partition(full, green, red)
    _emit(args, styled)
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    spec, log = _load_query(args)
    if args.timeline:
        rows = stats.export_timeline(spec, log, args.timeline)
        _write_out(args.out, stats.timeline_csv(rows))
        return 0
    table = stats.compute_node_stats(spec, log)
    text = stats.table_json(table) if args.format == "json" else stats.table_csv(table)
    _write_out(args.out, text)
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    if args.spec:
        spec = tracegen.WorkloadSpec.from_json_dict(
            json.loads(Path(args.spec).read_text(encoding="utf-8"))
        )
    else:
        spec = tracegen.WorkloadSpec(
            processes=args.processes,
            mode=args.mode,
            interface=args.interface,
            segments=args.segments,
            blocks_per_segment=args.blocks,
            op_bytes=args.op_bytes,
            base_path=args.base_path,
            seed=args.seed,
            cid=args.cid,
        )
    names = tracegen.generate(spec, args.outdir)
    for name in names:
        print(name)
    print(f"wrote {len(names)} trace files and ground_truth.json to {args.outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
