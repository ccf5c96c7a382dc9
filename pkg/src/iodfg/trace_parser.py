"""Parse raw strace output files into normalized events.

Input files are ASCII strace logs produced with ``-f -tt -T -y`` and named
``<cid>_<host>_<rid>.st``.  A complete record looks like::

    9042 10:15:01.000012 read(3</usr/lib/x.so>, ""..., 832) = 832 <0.000020>

i.e. pid, wall-clock time of day with microseconds, the call with its
arguments (file descriptors annotated with their paths by ``-y``), the
return value, and the elapsed seconds from ``-T``.  When another process
interleaves, strace splits a call into an ``<unfinished ...>`` line and a
later ``<... call resumed>`` line; the start time lives on the first and
the return value and duration on the second, and the two are merged back
into one record by pid and call name.

Timestamps carry no date, so they are stored as microseconds since
midnight of the file's first day; a backwards jump of more than twelve
hours within one file is treated as a midnight rollover and 24 h is added.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING

from .errors import MalformedLine, MalformedName, TraceWarning

if TYPE_CHECKING:
    from .event_model import Case

US_PER_SECOND = 1_000_000
US_PER_DAY = 24 * 3600 * US_PER_SECOND
_ROLLOVER_SLACK_US = US_PER_DAY // 2

#: Calls turned into events; lines naming any other call are skipped.
DEFAULT_TRACED_CALLS = frozenset(
    {"read", "write", "pread64", "pwrite64", "readv", "writev", "openat", "lseek"}
)

#: Calls whose return value is a transferred byte count.
READ_WRITE_CALLS = frozenset(
    {"read", "write", "pread64", "pwrite64", "readv", "writev"}
)

UNKNOWN_PATH = "(unknown)"


class RecordKind(Enum):
    COMPLETE = "complete"
    UNFINISHED = "unfinished"
    RESUMED = "resumed"
    SKIP = "skip"


@dataclass(frozen=True)
class FileNameMeta:
    """Identity parsed from a trace file name: command, host, launcher pid."""

    cid: str
    host: str
    rid: int


@dataclass(frozen=True)
class RawRecord:
    """One strace output line, before unfinished/resumed merging."""

    pid: int
    wallclock: int | None  # microseconds since midnight
    callname: str
    fd_path: str | None
    args_tail: str
    retval: int | None
    dur: int | None  # microseconds
    kind: RecordKind
    line_no: int = 0


@dataclass(frozen=True)
class Event:
    """One normalized system-call record.

    ``start`` is in microseconds since midnight of the file's first day
    (rollover-corrected); ``seq`` is the originating line number, which
    makes events unique even when all other attributes coincide.
    """

    cid: str
    host: str
    rid: int
    pid: int
    call: str
    start: int
    dur: int
    fp: str
    size: int | None
    seq: int


_FILENAME_RE = re.compile(r"^([^_]+)_([^_]+)_(\d+)\.st$")
_LINE_RE = re.compile(r"^(\d+) +(\d{2}):(\d{2}):(\d{2})\.(\d{6}) +(.*)$")
_RESUMED_RE = re.compile(r"^<\.\.\. (\w+) resumed>(.*)$")
_CALL_RE = re.compile(r"^(\w+)\((.*)$")
# args, return text, duration seconds, duration microseconds
_RETURN_RE = re.compile(r"^(.*)\) += +(.+?) +<(\d+)\.(\d{6})>$")
_RETVAL_RE = re.compile(r"^(-?\d+)")
_FD_PATH_RE = re.compile(r"^(\d+)<([^>]+)>")
_QUOTED_RE = re.compile(r'"((?:[^"\\]|\\.)*)"')


def parse_filename(name: str) -> FileNameMeta:
    """Split ``<cid>_<host>_<rid>.st`` into its three identity fields."""
    m = _FILENAME_RE.match(name)
    if not m:
        raise MalformedName(f"trace file name {name!r} does not match <cid>_<host>_<rid>.st")
    cid, host, rid_text = m.groups()
    rid = int(rid_text)
    if rid <= 0:
        raise MalformedName(f"trace file name {name!r} has non-positive rid")
    return FileNameMeta(cid=cid, host=host, rid=rid)


def _wallclock_us(hh: str, mm: str, ss: str, frac: str) -> int:
    return (int(hh) * 3600 + int(mm) * 60 + int(ss)) * US_PER_SECOND + int(frac)


def _dur_us(sec: str, frac: str) -> int:
    return int(sec) * US_PER_SECOND + int(frac)


def _skip(pid: int, wallclock: int | None, callname: str = "", line_no: int = 0) -> RawRecord:
    return RawRecord(pid, wallclock, callname, None, "", None, None, RecordKind.SKIP, line_no)


def parse_line(line: str, traced: frozenset[str] = DEFAULT_TRACED_CALLS, *, line_no: int = 0) -> RawRecord:
    """Classify and parse one strace output line.

    Lines with ERESTARTSYS, signal/exit notices, untraced calls and calls
    that never returned (``= ?``) come back as SKIP records.  Lines that
    should be complete but lack the timestamp or return section raise
    MalformedLine; in particular a missing pid prefix (strace run without
    ``-f``) is a hard error.
    """
    m = _LINE_RE.match(line)
    if not m:
        raise MalformedLine(f"missing pid or timestamp prefix: {line!r}")
    pid = int(m.group(1))
    wallclock = _wallclock_us(m.group(2), m.group(3), m.group(4), m.group(5))
    body = m.group(6)

    if "ERESTARTSYS" in body:
        return _skip(pid, wallclock, line_no=line_no)
    if body.startswith("---") or body.startswith("+++"):
        return _skip(pid, wallclock, line_no=line_no)

    rm = _RESUMED_RE.match(body)
    if rm:
        callname, tail = rm.groups()
        if callname not in traced:
            return _skip(pid, wallclock, callname, line_no)
        ret = _RETURN_RE.match(tail)
        if not ret:
            # resumed call that never returned, e.g. killed mid-call
            return _skip(pid, wallclock, callname, line_no)
        args, ret_text, dsec, dfrac = ret.groups()
        rv = _RETVAL_RE.match(ret_text)
        return RawRecord(
            pid, wallclock, callname, _first_fd_path(args.lstrip()), args.strip(" ,"),
            int(rv.group(1)) if rv else None, _dur_us(dsec, dfrac),
            RecordKind.RESUMED, line_no,
        )

    cm = _CALL_RE.match(body)
    if not cm:
        raise MalformedLine(f"unrecognized record shape: {line!r}")
    callname, rest = cm.groups()
    if callname not in traced:
        return _skip(pid, wallclock, callname, line_no)

    if "<unfinished" in rest:
        args = rest[: rest.index("<unfinished")].rstrip().rstrip(",")
        return RawRecord(
            pid, wallclock, callname, _first_fd_path(args), args,
            None, None, RecordKind.UNFINISHED, line_no,
        )

    ret = _RETURN_RE.match(rest)
    if not ret:
        if re.search(r"\) += +\?", rest):
            return _skip(pid, wallclock, callname, line_no)
        raise MalformedLine(f"complete record lacks return section: {line!r}")
    args, ret_text, dsec, dfrac = ret.groups()
    rv = _RETVAL_RE.match(ret_text)
    if not rv:
        return _skip(pid, wallclock, callname, line_no)
    return RawRecord(
        pid, wallclock, callname, _first_fd_path(args), args,
        int(rv.group(1)), _dur_us(dsec, dfrac), RecordKind.COMPLETE, line_no,
    )


def _first_fd_path(args: str) -> str | None:
    m = _FD_PATH_RE.match(args)
    return m.group(2) if m else None


def merge_unfinished_resumed(records: list[RawRecord], source: str = "") -> list[RawRecord]:
    """Merge each UNFINISHED record with the next RESUMED of its pid and call.

    The merged record keeps the unfinished side's wallclock, arguments and
    line number, and takes duration and return value from the resumed side.
    Orphans on either side are dropped with a warning.
    """
    out: list[RawRecord] = []
    pending: dict[int, RawRecord] = {}
    for rec in records:
        if rec.kind is RecordKind.UNFINISHED:
            old = pending.get(rec.pid)
            if old is not None:
                _warn_orphan(source, old, "unfinished record never resumed")
            pending[rec.pid] = rec
        elif rec.kind is RecordKind.RESUMED:
            head = pending.get(rec.pid)
            if head is None or head.callname != rec.callname:
                _warn_orphan(source, rec, "resumed record has no matching unfinished")
                continue
            del pending[rec.pid]
            out.append(
                RawRecord(
                    pid=head.pid,
                    wallclock=head.wallclock,
                    callname=head.callname,
                    fd_path=head.fd_path or rec.fd_path,
                    args_tail=(head.args_tail + " " + rec.args_tail).strip(),
                    retval=rec.retval,
                    dur=rec.dur,
                    kind=RecordKind.COMPLETE,
                    line_no=head.line_no,
                )
            )
        else:
            out.append(rec)
    for rec in pending.values():
        _warn_orphan(source, rec, "unfinished record never resumed")
    return out


def _warn_orphan(source: str, rec: RawRecord, reason: str) -> None:
    warnings.warn(
        TraceWarning(f"{source}:{rec.line_no}: dropped {rec.callname or 'record'} (pid {rec.pid}): {reason}"),
        stacklevel=3,
    )


def _event_path(rec: RawRecord) -> str:
    if rec.fd_path:
        return rec.fd_path
    q = _QUOTED_RE.search(rec.args_tail)
    if q:
        return q.group(1)
    return UNKNOWN_PATH


def parse_trace_file(
    meta: FileNameMeta,
    lines: list[str],
    traced: frozenset[str] = DEFAULT_TRACED_CALLS,
    source: str = "",
) -> "Case":
    """Parse one trace file's lines into a Case of events.

    Skips untraced and interrupted lines, merges unfinished/resumed pairs,
    corrects midnight rollovers, and sorts events by (start, seq).
    """
    from .event_model import Case, CaseId

    # rollover correction happens per line in file order, before merging,
    # so a call that starts just before midnight keeps its own day
    records: list[RawRecord] = []
    prev_raw: int | None = None
    day_offset = 0
    for line_no, line in enumerate(lines, 1):
        text = line.strip()
        if not text:
            continue
        try:
            rec = parse_line(text, traced, line_no=line_no)
        except MalformedLine as exc:
            raise MalformedLine(f"{source}:{line_no}: {exc}") from None
        if rec.wallclock is not None:
            if prev_raw is not None and rec.wallclock < prev_raw - _ROLLOVER_SLACK_US:
                day_offset += US_PER_DAY
            prev_raw = rec.wallclock
            rec = replace(rec, wallclock=rec.wallclock + day_offset)
        if rec.kind is not RecordKind.SKIP:
            records.append(rec)

    events: list[Event] = []
    for rec in merge_unfinished_resumed(records, source):
        if rec.kind is not RecordKind.COMPLETE:
            continue
        assert rec.wallclock is not None and rec.dur is not None
        size = None
        if rec.callname in READ_WRITE_CALLS and rec.retval is not None and rec.retval >= 0:
            size = rec.retval
        events.append(
            Event(
                cid=meta.cid,
                host=meta.host,
                rid=meta.rid,
                pid=rec.pid,
                call=rec.callname,
                start=rec.wallclock,
                dur=rec.dur,
                fp=_event_path(rec),
                size=size,
                seq=rec.line_no,
            )
        )
    events.sort(key=lambda e: (e.start, e.seq))
    return Case(id=CaseId(meta.cid, meta.host, meta.rid), events=tuple(events), source=source)


def format_event(event: Event) -> str:
    """Render an event back into a canonical strace-style line.

    Only defined for day-0 events (start below 24 h); re-parsing the result
    yields an identical event apart from its seq field.
    """
    start = event.start
    hh, rem = divmod(start, 3600 * US_PER_SECOND)
    mm, rem = divmod(rem, 60 * US_PER_SECOND)
    ss, us = divmod(rem, US_PER_SECOND)
    ts = f"{hh:02d}:{mm:02d}:{ss:02d}.{us:06d}"
    dur = f"<{event.dur // US_PER_SECOND}.{event.dur % US_PER_SECOND:06d}>"
    if event.call in READ_WRITE_CALLS:
        if event.size is not None:
            args = f'3<{event.fp}>, ""..., {event.size}'
            ret = str(event.size)
        else:
            args = f"3<{event.fp}>, 0x0, 4096"
            ret = "-1 EACCES (Permission denied)"
    elif event.call == "openat":
        args = f'AT_FDCWD, "{event.fp}", O_RDONLY'
        ret = "3"
    else:
        args = f"3<{event.fp}>, 0, SEEK_SET"
        ret = "0"
    return f"{event.pid} {ts} {event.call}({args}) = {ret} {dur}"
