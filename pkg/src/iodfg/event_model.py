"""Event-log model and its portable on-disk bundle.

A bundle directory holds one CSV table per case plus a manifest written
last::

    bundle/
      manifest.json                  array of {cid, host, rid, file,
                                               event_count, source}
      cases/<cid>_<host>_<rid>.csv   header: seq,pid,call,start_us,dur_us,fp,size

Rows are sorted by (start_us, seq); ``size`` is empty for events that moved
no accountable bytes; ``fp`` is quoted per RFC 4180 when needed.  All
timestamps are integer microseconds, so a bundle round-trips bit-exactly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

from .errors import CorruptBundle, DuplicateCase
from .trace_parser import Event

CASE_CSV_HEADER = ["seq", "pid", "call", "start_us", "dur_us", "fp", "size"]


@dataclass(frozen=True, order=True)
class CaseId:
    cid: str
    host: str
    rid: int

    def label(self) -> str:
        return f"{self.cid}:{self.host}:{self.rid}"

    def filename(self, suffix: str) -> str:
        return f"{self.cid}_{self.host}_{self.rid}{suffix}"


@dataclass(frozen=True)
class Case:
    """The time-ordered events of one trace file."""

    id: CaseId
    events: tuple[Event, ...]
    source: str = ""

    def __post_init__(self):
        prev = None
        for e in self.events:
            if (e.cid, e.host, e.rid) != (self.id.cid, self.id.host, self.id.rid):
                raise ValueError(f"event identity {e.cid}:{e.host}:{e.rid} does not match case {self.id.label()}")
            key = (e.start, e.seq)
            if prev is not None and key < prev:
                raise ValueError(f"case {self.id.label()} events not sorted by (start, seq)")
            prev = key


@dataclass(frozen=True)
class EventLog:
    """A set of cases with unique identities, kept in CaseId order."""

    cases: tuple[Case, ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.cases, key=lambda c: c.id))
        seen = set()
        for case in ordered:
            if case.id in seen:
                raise DuplicateCase(f"duplicate case {case.id.label()}")
            seen.add(case.id)
        object.__setattr__(self, "cases", ordered)

    def case_labels(self) -> tuple[str, ...]:
        return tuple(case.id.label() for case in self.cases)

    def event_count(self) -> int:
        return sum(len(case.events) for case in self.cases)


def union_logs(*logs: EventLog) -> EventLog:
    """Union of logs with disjoint case identities."""
    cases: list[Case] = []
    for log in logs:
        cases.extend(log.cases)
    return EventLog(tuple(cases))


def filter_events(log: EventLog, substring: str) -> EventLog:
    """Keep only events whose file path contains the substring.

    Cases left with no events are retained as empty cases, so their traces
    degenerate to the two sentinels downstream.
    """
    return EventLog(
        tuple(
            replace(case, events=tuple(e for e in case.events if substring in e.fp))
            for case in log.cases
        )
    )


def select_cases(log: EventLog, predicate: Callable[[CaseId], bool]) -> EventLog:
    """Sub-log of the cases whose identity satisfies the predicate."""
    return EventLog(tuple(case for case in log.cases if predicate(case.id)))


def write_bundle(log: EventLog, bundle_dir: Path | str) -> None:
    """Write the log as a bundle directory; the manifest is written last."""
    bundle = Path(bundle_dir)
    (bundle / "cases").mkdir(parents=True, exist_ok=True)
    manifest = []
    for case in log.cases:
        rel = f"cases/{case.id.filename('.csv')}"
        with open(bundle / rel, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CASE_CSV_HEADER)
            for e in case.events:
                writer.writerow(
                    [e.seq, e.pid, e.call, e.start, e.dur, e.fp,
                     "" if e.size is None else e.size]
                )
        manifest.append(
            {
                "cid": case.id.cid,
                "host": case.id.host,
                "rid": case.id.rid,
                "file": rel,
                "event_count": len(case.events),
                "source": case.source,
            }
        )
    with open(bundle / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def read_bundle(bundle_dir: Path | str) -> EventLog:
    """Read a bundle back into an EventLog, verifying its structure."""
    bundle = Path(bundle_dir)
    manifest_path = bundle / "manifest.json"
    if not manifest_path.is_file():
        raise CorruptBundle(f"{bundle}: missing manifest.json")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorruptBundle(f"{manifest_path}: invalid JSON: {exc}") from None
    if not isinstance(manifest, list):
        raise CorruptBundle(f"{manifest_path}: manifest must be a JSON array")

    cases: list[Case] = []
    seen: set[CaseId] = set()
    for entry in manifest:
        try:
            case_id = CaseId(entry["cid"], entry["host"], int(entry["rid"]))
            rel = entry["file"]
            expected_count = int(entry["event_count"])
            source = entry.get("source", "")
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptBundle(f"{manifest_path}: bad manifest entry: {exc}") from None
        if case_id in seen:
            raise CorruptBundle(f"{manifest_path}: duplicate case {case_id.label()}")
        seen.add(case_id)
        case_path = bundle / rel
        if not case_path.is_file():
            raise CorruptBundle(f"{bundle}: manifest lists missing case file {rel}")
        events = _read_case_csv(case_path, case_id)
        if len(events) != expected_count:
            raise CorruptBundle(
                f"{case_path}: manifest promises {expected_count} events, file has {len(events)}"
            )
        cases.append(Case(id=case_id, events=events, source=source))
    return EventLog(tuple(cases))


def _read_case_csv(path: Path, case_id: CaseId) -> tuple[Event, ...]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CASE_CSV_HEADER:
            raise CorruptBundle(f"{path}: bad header {header!r}")
        events = []
        prev_key = None
        for row_no, row in enumerate(reader, 2):
            if len(row) != len(CASE_CSV_HEADER):
                raise CorruptBundle(f"{path}:{row_no}: expected {len(CASE_CSV_HEADER)} fields")
            try:
                event = Event(
                    cid=case_id.cid,
                    host=case_id.host,
                    rid=case_id.rid,
                    pid=int(row[1]),
                    call=row[2],
                    start=int(row[3]),
                    dur=int(row[4]),
                    fp=row[5],
                    size=None if row[6] == "" else int(row[6]),
                    seq=int(row[0]),
                )
            except ValueError as exc:
                raise CorruptBundle(f"{path}:{row_no}: {exc}") from None
            if event.dur < 0:
                raise CorruptBundle(f"{path}:{row_no}: negative duration")
            key = (event.start, event.seq)
            if prev_key is not None and key < prev_key:
                raise CorruptBundle(f"{path}:{row_no}: rows not sorted by (start_us, seq)")
            prev_key = key
            events.append(event)
    return tuple(events)
