"""Exception types shared across the package."""


class GridSchedError(Exception):
    """Base class for all package-specific errors."""


class WorkloadFormatError(GridSchedError, ValueError):
    """A workload file failed to parse or violates workload invariants."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InvalidScheduleError(GridSchedError, ValueError):
    """An assignment vector does not fit the workload it is applied to."""


class CapacityExhaustedError(GridSchedError, RuntimeError):
    """Every resource is at its queue capacity; no task can be placed."""


class PoolClosedError(GridSchedError, RuntimeError):
    """A request was sent to an agent pool after shutdown."""
