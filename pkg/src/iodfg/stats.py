"""Per-activity I/O statistics and timeline export.

Four statistics are computed for every activity an event maps to:

* relative duration: the activity's share of the total system-call time
  spent across all mapped events (a fraction summing to 1),
* total bytes moved,
* process data rate: the arithmetic mean of per-event bytes/second,
* max-concurrency: a windowed count of simultaneously active events.

Events without a byte count contribute nothing to bytes or data rate;
zero-duration events are excluded from data-rate samples but still count
toward durations and appear as zero-length intervals in concurrency.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from bisect import bisect_left
from dataclasses import dataclass, replace
from statistics import fmean

from .dfg import Dfg, Provenance
from .errors import SpecMismatch, StatsWarning
from .event_model import EventLog
from .mapping import END, START, MappingSpec, apply_mapping

US_PER_SECOND = 1_000_000
MIB = 1024 * 1024


@dataclass(frozen=True)
class Interval:
    start_us: int
    end_us: int

    def __post_init__(self):
        if self.end_us < self.start_us:
            raise ValueError("interval ends before it starts")


@dataclass(frozen=True)
class NodeStats:
    rd: float
    total_dur_us: int
    bytes: int
    data_rate_mean: float | None  # bytes per second
    max_concurrency: int
    sample_count: int

    def load_label(self) -> str:
        return f"Load: {self.rd * 100:.2f}% ({self.bytes})"

    def dr_label(self) -> str:
        if self.data_rate_mean is None:
            rate = "-"
        else:
            rate = f"{self.data_rate_mean / MIB:.2f} MiB/s"
        return f"DR: {self.max_concurrency} x {rate}"


@dataclass(frozen=True)
class TimelineRow:
    start_us: int
    end_us: int
    case: str
    pid: int


@dataclass(frozen=True)
class StatsTable:
    provenance: Provenance
    rows: dict[str, NodeStats]


def _mapped_events(spec: MappingSpec, log: EventLog):
    for case in log.cases:
        for event in case.events:
            activity = apply_mapping(spec, event)
            if activity is not None:
                yield activity, event, case


def relative_duration(spec: MappingSpec, log: EventLog) -> dict[str, tuple[float, int]]:
    """Per-activity (fraction of total mapped time, total duration in us)."""
    totals: dict[str, int] = {}
    for activity, event, _ in _mapped_events(spec, log):
        totals[activity] = totals.get(activity, 0) + event.dur
    grand = sum(totals.values())
    if totals and grand == 0:
        warnings.warn(StatsWarning("all mapped durations are zero; relative durations set to 0"))
        return {a: (0.0, 0) for a in totals}
    return {a: (d / grand, d) for a, d in totals.items()}


def total_bytes(spec: MappingSpec, log: EventLog) -> dict[str, int]:
    """Per-activity sum of transferred bytes; events without a size add 0."""
    totals: dict[str, int] = {}
    for activity, event, _ in _mapped_events(spec, log):
        totals[activity] = totals.get(activity, 0) + (event.size or 0)
    return totals


def process_data_rate(spec: MappingSpec, log: EventLog) -> dict[str, float]:
    """Arithmetic mean of per-event bytes/second, in bytes per second.

    Events lacking a size or with zero duration yield no sample; activities
    with no samples are absent from the result.
    """
    samples: dict[str, list[float]] = {}
    for activity, event, _ in _mapped_events(spec, log):
        if event.size is None or event.dur == 0:
            continue
        samples.setdefault(activity, []).append(event.size * US_PER_SECOND / event.dur)
    return {a: fmean(values) for a, values in samples.items()}


def activity_intervals(spec: MappingSpec, log: EventLog) -> dict[str, list[Interval]]:
    """Per-activity (start, end) intervals, sorted by start."""
    out: dict[str, list[Interval]] = {}
    for activity, event, _ in _mapped_events(spec, log):
        out.setdefault(activity, []).append(Interval(event.start, event.start + event.dur))
    for intervals in out.values():
        intervals.sort(key=lambda t: (t.start_us, t.end_us))
    return out


def export_timeline(spec: MappingSpec, log: EventLog, activity: str) -> list[TimelineRow]:
    """One row per event mapping to the activity, sorted by start."""
    rows = [
        TimelineRow(event.start, event.start + event.dur, case.id.label(), event.pid)
        for mapped, event, case in _mapped_events(spec, log)
        if mapped == activity
    ]
    rows.sort(key=lambda r: (r.start_us, r.end_us, r.case, r.pid))
    return rows


def timeline_csv(rows: list[TimelineRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["start_us", "end_us", "case", "pid"])
    for row in rows:
        writer.writerow([row.start_us, row.end_us, row.case, row.pid])
    return buf.getvalue()


def max_concurrency(intervals: list[Interval]) -> int:
    """Windowed concurrency count over start-sorted intervals.

    After sorting by (start, end), the result is the largest window of
    consecutive positions i..j whose first end time exceeds its last start
    time.  Events inside the window need not all overlap each other, so
    this can exceed the true pairwise-overlap maximum (see
    sweepline_max_overlap).  A lone event counts as 1 even at zero length;
    an empty list gives 0.
    """
    if not intervals:
        return 0
    ordered = sorted(intervals, key=lambda t: (t.start_us, t.end_us))
    starts = [t.start_us for t in ordered]
    best = 1
    for i, interval in enumerate(ordered):
        j = bisect_left(starts, interval.end_us) - 1
        if j - i + 1 > best:
            best = j - i + 1
    return best


def sweepline_max_overlap(intervals: list[Interval]) -> int:
    """True maximum number of intervals simultaneously open.

    Endpoint sweep with ends processed before starts at equal times, so
    touching intervals do not overlap.
    """
    points = []
    for interval in intervals:
        points.append((interval.start_us, 1))
        points.append((interval.end_us, 0))
    points.sort()
    best = count = 0
    for _, is_start in points:
        count += 1 if is_start else -1
        if count > best:
            best = count
    return best


def compute_node_stats(spec: MappingSpec, log: EventLog) -> StatsTable:
    """All four statistics plus sample counts, keyed by activity."""
    hosts = {case.id.host for case in log.cases}
    if len(hosts) > 1:
        warnings.warn(
            StatsWarning("log spans multiple hosts; max-concurrency may be inexact without synchronized clocks")
        )
    durations = relative_duration(spec, log)
    byte_totals = total_bytes(spec, log)
    rates = process_data_rate(spec, log)
    intervals = activity_intervals(spec, log)
    counts: dict[str, int] = {}
    for activity, _, _ in _mapped_events(spec, log):
        counts[activity] = counts.get(activity, 0) + 1
    rows = {
        activity: NodeStats(
            rd=durations[activity][0],
            total_dur_us=durations[activity][1],
            bytes=byte_totals[activity],
            data_rate_mean=rates.get(activity),
            max_concurrency=max_concurrency(intervals[activity]),
            sample_count=counts[activity],
        )
        for activity in sorted(counts)
    }
    return StatsTable(
        provenance=Provenance(spec.fingerprint(), log.case_labels()),
        rows=rows,
    )


def annotate(dfg: Dfg, table: StatsTable) -> Dfg:
    """Attach node statistics to every non-sentinel node of the graph."""
    if dfg.provenance != table.provenance:
        raise SpecMismatch(
            f"graph provenance {dfg.provenance} does not match statistics provenance {table.provenance}"
        )
    try:
        node_stats = {
            node: table.rows[node] for node in dfg.nodes if node not in (START, END)
        }
    except KeyError as exc:
        raise SpecMismatch(f"no statistics for activity {exc}") from None
    return replace(dfg, node_stats=node_stats)


STATS_CSV_HEADER = [
    "activity", "rd", "total_dur_us", "bytes",
    "data_rate_mean", "max_concurrency", "sample_count",
]


def table_csv(table: StatsTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(STATS_CSV_HEADER)
    for activity in sorted(table.rows):
        stats = table.rows[activity]
        writer.writerow(
            [
                activity,
                repr(stats.rd),
                stats.total_dur_us,
                stats.bytes,
                "" if stats.data_rate_mean is None else repr(stats.data_rate_mean),
                stats.max_concurrency,
                stats.sample_count,
            ]
        )
    return buf.getvalue()


def table_json(table: StatsTable) -> str:
    rows = [
        {
            "activity": activity,
            "rd": stats.rd,
            "total_dur_us": stats.total_dur_us,
            "bytes": stats.bytes,
            "data_rate_mean": stats.data_rate_mean,
            "max_concurrency": stats.max_concurrency,
            "sample_count": stats.sample_count,
        }
        for activity, stats in sorted(table.rows.items())
    ]
    return json.dumps({"rows": rows}, indent=2) + "\n"
