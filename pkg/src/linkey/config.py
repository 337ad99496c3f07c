"""Run configuration, hardware presets, and the table cost model."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

from .errors import RangeError

KIB = 1024
MIB = 1024 * KIB


@dataclass(frozen=True)
class CacheParams:
    size_bytes: int
    ways: int
    latency: int

    @property
    def sets(self) -> int:
        return self.size_bytes // 64 // self.ways


# Three-level data hierarchy; latencies are total cycles to first hit.
L1D = CacheParams(48 * KIB, 12, 5)
L2 = CacheParams(1 * MIB, 16, 16)
L3 = CacheParams(64 * MIB, 16, 34)
DRAM_LATENCY = 160

PREFETCHERS = ("none", "stride", "linkey")

# Named (address table, child table) sizings.
PRESETS = {
    "a64_c256": (64, 256),
    "a256_c1024": (256, 1024),
    "a1024_c4096": (1024, 4096),
}
DEFAULT_PRESET = "a256_c1024"


@dataclass(frozen=True)
class SimConfig:
    """Everything an engine needs to be constructed.

    ``pool_slots``/``pool_pitch``/``pool_seed`` shape the node allocator;
    the remaining fields size the caches and the prefetcher.
    """

    pool_pitch: int = 64
    pool_slots: int = 1024
    pool_seed: int = 0
    heap_base: int = 1 << 32
    l1: CacheParams = L1D
    l2: CacheParams = L2
    l3: CacheParams = L3
    dram_latency: int = DRAM_LATENCY
    prefetcher: str = "linkey"
    at_entries: int = 256
    cat_entries: int = 1024
    bfq_entries: int = 8
    buffer_cap: int = 8
    drain_per_event: int = 2

    def __post_init__(self) -> None:
        if self.prefetcher not in PREFETCHERS:
            raise RangeError("unknown prefetcher %r" % (self.prefetcher,))
        for n, lo in (("at_entries", 8), ("cat_entries", 8)):
            v = getattr(self, n)
            if v < lo or v & (v - 1):
                raise RangeError("%s must be a power of two >= %d, got %d" % (n, lo, v))


@dataclass(frozen=True)
class RunConfig:
    """One (benchmark, size, seed, prefetcher) simulation."""

    benchmark: str = "ll"
    size: str = "small"
    seed: int = 0
    prefetcher: str = "linkey"
    at_entries: int = 256
    cat_entries: int = 1024
    bfq_entries: int = 8
    buffer_cap: int = 8
    drain_per_event: int = 2
    backend: str = "auto"

    def with_prefetcher(self, prefetcher: str) -> "RunConfig":
        return replace(self, prefetcher=prefetcher)

    def identity(self) -> tuple:
        return (self.benchmark, self.size, self.seed,
                self.at_entries, self.cat_entries, self.bfq_entries,
                self.buffer_cap, self.drain_per_event)


def apply_preset(cfg: RunConfig, preset: str) -> RunConfig:
    try:
        at, cat = PRESETS[preset]
    except KeyError:
        raise RangeError("unknown preset %r" % (preset,)) from None
    return replace(cfg, at_entries=at, cat_entries=cat)


def hardware_size_bytes(at_entries: int, cat_entries: int) -> float:
    """Storage cost of the prefetcher state in bytes.

    Per address-table entry: valid + two replacement bits, a 45-bit node base
    (the low 3 bits of a 48-bit address are implied by 8-byte alignment), and
    eight child slots of a child-table index plus a valid bit.  Per child-table
    entry: valid + two replacement bits, parent and child table indices, and a
    3-bit offset index.  Plus the backup fetch queue (eight 45-bit bases), the
    node-size and key-offset registers (12 bits each), eight 12-bit child
    offset registers, and four root slots of a table index plus a valid bit.
    Everything is summed in bits and divided once at the end.
    """

    for name, v in (("at_entries", at_entries), ("cat_entries", cat_entries)):
        if v < 1 or v & (v - 1):
            raise RangeError("%s must be a power of two, got %d" % (name, v))
    at_index_bits = int(math.log2(at_entries))
    cat_index_bits = int(math.log2(cat_entries))
    bits = at_entries * (3 + 45 + 8 * (cat_index_bits + 1))
    bits += cat_entries * (3 + 2 * at_index_bits + 3)
    bits += 8 * 45          # backup fetch queue
    bits += 12 + 12         # node size, key offset
    bits += 8 * 12          # child offset registers
    bits += 4 * (at_index_bits + 1)  # root slots
    return bits / 8


def pool_order(slots: int, seed: int) -> list[int]:
    """Seeded shuffle of pool slot indices; the allocation order."""

    order = list(range(slots))
    random.Random(seed).shuffle(order)
    return order
