"""Exception and warning types shared across the package."""


class DfgError(Exception):
    """Base class for all domain errors raised by this package."""


class MalformedName(DfgError):
    """Trace file name does not follow the <cid>_<host>_<rid>.st convention."""


class MalformedLine(DfgError):
    """A trace line that should be complete could not be parsed."""


class CorruptBundle(DfgError):
    """On-disk bundle violates the manifest/case-file contract."""


class DuplicateCase(DfgError):
    """Two ingested trace files claim the same (cid, host, rid)."""


class SpecMismatch(DfgError):
    """Statistics or sub-graphs were produced under a different mapping or log."""


class NotAPartition(DfgError):
    """Green and red case selections overlap, or escape the full log."""


class EmptySelection(DfgError):
    """A case selector matched nothing."""


class MissingStats(DfgError):
    """Statistic-based coloring requested on an unannotated graph."""


class MissingMappingSpec(DfgError):
    """The mapping spec file is absent or unreadable."""


class TraceWarning(UserWarning):
    """Non-fatal parser diagnostic: orphan or dropped records."""


class StatsWarning(UserWarning):
    """Non-fatal statistics diagnostic: degenerate denominator, clock skew."""
