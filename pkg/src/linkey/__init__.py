"""Deterministic memory-hierarchy simulator with a layout-hinted
linked-data-structure prefetcher, a stride baseline, and a pointer-chasing
benchmark suite."""

from .config import (DEFAULT_PRESET, DRAM_LATENCY, L1D, L2, L3, PRESETS,
                     CacheParams, RunConfig, SimConfig, hardware_size_bytes)
from .engine import available_backends, make_engine
from .errors import (AlignmentError, AllocationError, CapacityError,
                     ComparisonError, LayoutError, RangeError, SimError)

__version__ = "0.1.0"

__all__ = [
    "SimConfig", "RunConfig", "CacheParams", "L1D", "L2", "L3", "DRAM_LATENCY",
    "PRESETS", "DEFAULT_PRESET", "hardware_size_bytes",
    "make_engine", "available_backends",
    "SimError", "AllocationError", "AlignmentError", "LayoutError",
    "CapacityError", "RangeError", "ComparisonError",
    "__version__",
]
