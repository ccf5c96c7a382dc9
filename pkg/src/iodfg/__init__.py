"""Synthesize strace system-call traces into annotated directly-follows graphs."""

from .dfg import Dfg, Provenance, build_dfg, exclusive_elements, merge_dfg
from .errors import (
    CorruptBundle,
    DfgError,
    DuplicateCase,
    EmptySelection,
    MalformedLine,
    MalformedName,
    MissingMappingSpec,
    MissingStats,
    NotAPartition,
    SpecMismatch,
    StatsWarning,
    TraceWarning,
)
from .event_model import (
    Case,
    CaseId,
    EventLog,
    filter_events,
    read_bundle,
    select_cases,
    union_logs,
    write_bundle,
)
from .mapping import END, START, ActivityLog, MappingSpec, apply_mapping, build_activity_log, trace_of
from .render import StyledDfg, color_by_partition, color_by_stat, emit_dot
from .stats import (
    Interval,
    NodeStats,
    StatsTable,
    annotate,
    compute_node_stats,
    export_timeline,
    max_concurrency,
    process_data_rate,
    relative_duration,
    sweepline_max_overlap,
    total_bytes,
)
from .trace_parser import (
    Event,
    FileNameMeta,
    RawRecord,
    RecordKind,
    format_event,
    merge_unfinished_resumed,
    parse_filename,
    parse_line,
    parse_trace_file,
)
from .tracegen import WorkloadSpec, generate

__version__ = "0.1.0"
