"""Exception types shared across the package."""


class DotTraceError(Exception):
    """Base class for all package errors."""


class ParameterError(DotTraceError, ValueError):
    """Invalid construction or simulation parameters."""


class DomainError(DotTraceError, ValueError):
    """Numeric argument outside its mathematical domain."""


class ReachError(DotTraceError):
    """Target point not reachable by the arm model."""

    def __init__(self, message, distance=None, sample_index=None):
        super().__init__(message)
        self.distance = distance
        self.sample_index = sample_index


class SequencingError(DotTraceError):
    """Sample stream violated ordering rules (non-monotonic time, closed session)."""


class IncompleteSessionError(DotTraceError):
    """Metrics requested for a session that never completed."""


class EmptyDataError(DotTraceError):
    """An operation received no usable data (empty trace, empty window)."""


class DegenerateDataError(DotTraceError):
    """Data carries no variance where variance is required."""


class TraceAlignmentError(DotTraceError):
    """Sensor trace does not overlap the session's active window."""


class DataFormatError(DotTraceError):
    """A persisted file failed to parse or failed schema validation."""

    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = path


class UnsupportedOrderError(DotTraceError, ValueError):
    """Balanced Latin square requested for an unsupported (odd) order."""


class InfeasibleDesignError(DotTraceError):
    """Sample-size search exceeded its cap without reaching target power."""
