"""Exception types shared by both simulation cores."""


class SimError(Exception):
    """Base class for simulator errors."""


class AllocationError(SimError):
    """Node pool exhausted or the requested node does not fit a pool slot."""


class AlignmentError(SimError):
    """Word access to an address that is not 8-byte aligned."""


class LayoutError(SimError):
    """Node layout violates a hardware register constraint."""


class CapacityError(SimError):
    """A fixed-size hardware resource was asked to hold too many items."""


class RangeError(SimError):
    """Index outside a hardware register file (e.g. root slot > 3)."""


class ComparisonError(SimError):
    """Metrics from runs with different identities cannot be normalized."""
