"""Behavior of the stride baseline, observed through the engine."""

import random

from linkey import SimConfig
from linkey.engine import make_engine


def stride_engine(backend):
    return make_engine(SimConfig(pool_slots=8, prefetcher="stride"),
                       backend=backend)


def test_third_access_confirms_stride(backend):
    e = stride_engine(backend)
    e.read64(0x1000)
    e.read64(0x1040)
    assert e.metrics()["prefetch_issued"] == 0
    e.read64(0x1080)
    assert e.metrics()["prefetch_issued"] == 2
    assert e.cache_contains(1, 0x10C0)
    assert e.cache_contains(1, 0x1100)


def test_page_boundary_suppresses_requests(backend):
    e = stride_engine(backend)
    e.read64(0x1F40)
    e.read64(0x1F80)
    e.read64(0x1FC0)
    assert e.metrics()["prefetch_issued"] == 0
    assert not e.cache_contains(1, 0x2000)


def test_negative_stride_within_page(backend):
    e = stride_engine(backend)
    e.read64(0x2300)
    e.read64(0x2280)
    e.read64(0x2200)
    assert e.metrics()["prefetch_issued"] == 2
    assert e.cache_contains(1, 0x2180)
    assert e.cache_contains(1, 0x2100)


def test_own_block_target_skipped(backend):
    # a sub-line stride puts the first candidate inside the demand block
    e = stride_engine(backend)
    e.read64(0x3000)
    e.read64(0x3010)
    e.read64(0x3020)
    assert e.metrics()["prefetch_issued"] == 1
    assert e.cache_contains(1, 0x3040)


def test_same_block_targets_coalesce(backend):
    # both candidates land in one neighboring block: one request
    e = stride_engine(backend)
    e.read64(0x8018)
    e.read64(0x8028)
    e.read64(0x8038)
    assert e.metrics()["prefetch_issued"] == 1
    assert e.cache_contains(1, 0x8040)


def test_stride_relearned_after_break(backend):
    e = stride_engine(backend)
    e.read64(0x1000)
    e.read64(0x1040)
    e.read64(0x1080)
    assert e.metrics()["prefetch_issued"] == 2
    e.read64(0x1100)                   # delta changed: confidence dips
    assert e.metrics()["prefetch_issued"] == 2
    e.read64(0x1180)                   # new stride confirmed
    assert e.metrics()["prefetch_issued"] == 4
    assert e.cache_contains(1, 0x1200)
    assert e.cache_contains(1, 0x1280)


def test_random_walk_rarely_issues(backend):
    e = stride_engine(backend)
    rng = random.Random(42)
    blocks = list(range(256))
    rng.shuffle(blocks)
    for b in blocks:
        e.read64(0x40000 + 64 * b + 8 * rng.randrange(8))
    m = e.metrics()
    assert m["kernel_accesses"] == 256
    assert m["prefetch_issued"] / m["kernel_accesses"] < 0.2


def test_stride_reports_zero_table_counters(backend):
    e = stride_engine(backend)
    for i in range(5):
        e.read64(0x5000 + 64 * i)
    m = e.metrics()
    assert m["at_insert"] == 0
    assert m["cat_insert"] == 0
    assert m["invalidations"] == 0
    assert m["evictions"] == 0
    assert m["bfq_push"] == 0
    assert m["bfq_drop"] == 0
