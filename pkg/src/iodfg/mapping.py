"""Declarative event-to-activity mapping and activity-log construction.

A mapping is a partial function from events to activity strings of the
form ``<call>:<abstracted-path>``.  The abstraction first rewrites a
site-specific path prefix to a token (``/scratch/u123`` -> ``$SCRATCH``),
then truncates the result to a fixed number of leading directory levels.
Events can additionally be excluded by a path substring filter or a call
allowlist; excluded events simply have no activity.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .errors import MissingMappingSpec
from .event_model import Case, EventLog
from .trace_parser import Event

#: Sentinel activities bracketing every trace.
START = "START"
END = "END"


@dataclass(frozen=True)
class MappingSpec:
    depth: int = 2
    path_filter: str | None = None
    substitutions: tuple[tuple[str, str], ...] = ()
    include_calls: frozenset[str] | None = None

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        object.__setattr__(self, "substitutions", tuple((p, t) for p, t in self.substitutions))
        if self.include_calls is not None:
            object.__setattr__(self, "include_calls", frozenset(self.include_calls))
        for prefix, _ in self.substitutions:
            if not prefix.startswith("/"):
                raise ValueError(f"substitution prefix {prefix!r} must be an absolute path")

    def fingerprint(self) -> str:
        digest = hashlib.sha256(json.dumps(self.to_json_dict(), sort_keys=True).encode())
        return digest.hexdigest()[:12]

    def to_json_dict(self) -> dict:
        return {
            "depth": self.depth,
            "path_filter": self.path_filter,
            "substitutions": [list(pair) for pair in self.substitutions],
            "include_calls": sorted(self.include_calls) if self.include_calls is not None else None,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "MappingSpec":
        include = data.get("include_calls")
        return cls(
            depth=data.get("depth", 2),
            path_filter=data.get("path_filter"),
            substitutions=tuple((p, t) for p, t in data.get("substitutions", [])),
            include_calls=frozenset(include) if include is not None else None,
        )

    @classmethod
    def load(cls, path: Path | str) -> "MappingSpec":
        path = Path(path)
        if not path.is_file():
            raise MissingMappingSpec(f"mapping spec file not found: {path}")
        try:
            return cls.from_json_dict(json.loads(path.read_text(encoding="utf-8")))
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise MissingMappingSpec(f"{path}: invalid mapping spec: {exc}") from None

    def dump(self, path: Path | str) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n", encoding="utf-8")


def abstract_path(spec: MappingSpec, fp: str) -> str:
    """Substitute a site prefix, then keep at most ``depth`` path levels.

    Paths that are neither absolute nor produced by a substitution (such as
    ``(unknown)`` or ``pipe:[123]``) are returned verbatim.
    """
    path = fp
    anchored = path.startswith("/")
    for prefix, token in spec.substitutions:
        if path.startswith(prefix):
            path = token + path[len(prefix):]
            anchored = True
            break
    if not anchored:
        return path
    if path.startswith("/"):
        parts = [p for p in path.split("/") if p]
        return "/" + "/".join(parts[: spec.depth]) if parts else "/"
    parts = path.split("/")
    return "/".join(parts[: spec.depth])


def apply_mapping(spec: MappingSpec, event: Event) -> str | None:
    """Map an event to its activity, or None when the event is out of scope."""
    if spec.path_filter is not None and spec.path_filter not in event.fp:
        return None
    if spec.include_calls is not None and event.call not in spec.include_calls:
        return None
    return f"{event.call}:{abstract_path(spec, event.fp)}"


def trace_of(spec: MappingSpec, case: Case) -> tuple[str, ...]:
    """Activity sequence of a case, bracketed by the START/END sentinels."""
    interior = [a for a in (apply_mapping(spec, e) for e in case.events) if a is not None]
    return (START, *interior, END)


@dataclass(frozen=True)
class ActivityLog:
    """Multiset of activity traces, with mapping and case provenance."""

    traces: tuple[tuple[tuple[str, ...], int], ...]  # (trace, multiplicity), sorted
    mapping_id: str
    case_ids: tuple[str, ...]

    def total_cases(self) -> int:
        return sum(mult for _, mult in self.traces)

    def multiplicities(self) -> dict[tuple[str, ...], int]:
        return dict(self.traces)


def build_activity_log(spec: MappingSpec, log: EventLog) -> ActivityLog:
    """Apply the mapping to every case and collect the trace multiset."""
    counts = Counter(trace_of(spec, case) for case in log.cases)
    return ActivityLog(
        traces=tuple(sorted(counts.items())),
        mapping_id=spec.fingerprint(),
        case_ids=log.case_labels(),
    )
