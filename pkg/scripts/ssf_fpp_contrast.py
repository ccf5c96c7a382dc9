#!/usr/bin/env python3
"""Desk-scale single-shared-file vs file-per-process contrast.

Generates two synthetic workload runs writing under one scratch tree
(shared-file latencies inflated over per-process ones), builds the
scratch-restricted DFG colored by relative duration, and prints which
side carries the larger share of system-call time.

Usage: python3 scripts/ssf_fpp_contrast.py [--outdir out/ssf_fpp]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from iodfg.dfg import build_dfg
from iodfg.event_model import EventLog, filter_events, union_logs
from iodfg.mapping import MappingSpec, build_activity_log
from iodfg.render import color_by_stat, emit_dot
from iodfg.stats import annotate, compute_node_stats, table_csv
from iodfg.tracegen import WorkloadSpec, generate
from iodfg.trace_parser import parse_filename, parse_trace_file

SCRATCH = "/scratch/u123"


def parse_dir(trace_dir: Path) -> EventLog:
    cases = []
    for path in sorted(trace_dir.glob("*.st")):
        meta = parse_filename(path.name)
        cases.append(parse_trace_file(meta, path.read_text().splitlines(), source=path.name))
    return EventLog(tuple(cases))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", default="out/ssf_fpp", type=Path)
    parser.add_argument("--processes", type=int, default=8)
    parser.add_argument("--latency-ratio", type=int, default=3,
                        help="how much slower each shared-file op is")
    args = parser.parse_args()

    base_latency = 400
    ssf = WorkloadSpec(processes=args.processes, mode="ssf", interface="plain",
                       base_path=SCRATCH, cid="s", seed=1,
                       op_latency_us=base_latency * args.latency_ratio,
                       meta_latency_us=50 * args.latency_ratio)
    fpp = WorkloadSpec(processes=args.processes, mode="fpp", interface="plain",
                       base_path=SCRATCH, cid="f", seed=2,
                       op_latency_us=base_latency, meta_latency_us=50)
    generate(ssf, args.outdir / "traces_ssf")
    generate(fpp, args.outdir / "traces_fpp")

    log = union_logs(parse_dir(args.outdir / "traces_ssf"), parse_dir(args.outdir / "traces_fpp"))
    log = filter_events(log, "/scratch")
    mapping = MappingSpec(depth=2, substitutions=((SCRATCH, "$SCRATCH"),))

    table = compute_node_stats(mapping, log)
    graph = annotate(build_dfg(build_activity_log(mapping, log)), table)
    dot = emit_dot(color_by_stat(graph, "rd"))

    (args.outdir / "ssf_fpp.dot").write_text(dot, encoding="utf-8")
    (args.outdir / "stats.csv").write_text(table_csv(table), encoding="utf-8")

    print(f"wrote {args.outdir / 'ssf_fpp.dot'} and {args.outdir / 'stats.csv'}")
    for call in ("openat", "write", "read"):
        ssf_rd = table.rows[f"{call}:$SCRATCH/ssf"].rd
        fpp_rd = table.rows[f"{call}:$SCRATCH/fpp"].rd
        marker = "ssf slower" if ssf_rd > fpp_rd else "fpp slower"
        print(f"{call:7s} rd ssf={ssf_rd:.4f}  rd fpp={fpp_rd:.4f}  -> {marker}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
