"""Result records, CSV shaping, normalization and geometric means."""

import pytest

from linkey.config import RunConfig
from linkey.errors import ComparisonError
from linkey.metrics import (CSV_HEADER, RunResult, geomean, make_result,
                            normalize)

HEADER = ("benchmark,size,seed,prefetcher,at_entries,cat_entries,"
          "l1d_miss,l2_miss,l3_miss,prefetch_issued,prefetch_hits,"
          "accuracy,stall_cycles_proxy,at_insert,cat_insert,"
          "invalidations,evictions,bfq_push,bfq_drop")


def result(**over):
    base = dict(benchmark="ll", size="small", seed=1, prefetcher="linkey",
                at_entries=256, cat_entries=1024, l1d_miss=100, l2_miss=90,
                l3_miss=80, prefetch_issued=50, prefetch_hits=40,
                stall_cycles_proxy=12345, at_insert=7, cat_insert=6,
                invalidations=5, evictions=4, bfq_push=3, bfq_drop=2,
                kernel_accesses=2000, checksum=99, backend="pure")
    base.update(over)
    return RunResult(**base)


def test_header_is_locked_down():
    assert CSV_HEADER == HEADER


def test_csv_row_format():
    row = result().csv_row()
    assert row == ("ll,small,1,linkey,256,1024,100,90,80,50,40,"
                   "0.800000,12345,7,6,5,4,3,2")
    assert len(row.split(",")) == len(HEADER.split(","))


def test_accuracy_zero_when_nothing_issued():
    r = result(prefetch_issued=0, prefetch_hits=0)
    assert r.accuracy == 0.0
    assert ",0.000000," in r.csv_row()


def test_accuracy_six_decimals():
    r = result(prefetch_issued=3, prefetch_hits=1)
    assert ",0.333333," in r.csv_row()


def test_make_result_maps_engine_metrics():
    cfg = RunConfig(benchmark="dll", size="medium", seed=2, prefetcher="stride")
    metrics = dict(l1d_miss=1, l2_miss=2, l3_miss=3, prefetch_issued=4,
                   prefetch_hits=5, stall_cycles=6, at_insert=7, cat_insert=8,
                   invalidations=9, evictions=10, bfq_push=11, bfq_drop=12,
                   kernel_accesses=13)
    r = make_result(cfg, metrics, checksum=77, backend="pure")
    assert r.benchmark == "dll" and r.prefetcher == "stride"
    assert r.stall_cycles_proxy == 6
    assert r.kernel_accesses == 13
    assert r.checksum == 77
    assert r.identity == ("dll", "medium", 2)


def test_to_dict_round_trip():
    d = result().to_dict()
    assert d["accuracy"] == 0.8
    assert d["l1d_miss"] == 100
    assert d["backend"] == "pure"


def test_normalize_ratios():
    a = result(l1d_miss=50, stall_cycles_proxy=100)
    b = result(prefetcher="none", l1d_miss=100, stall_cycles_proxy=400)
    ratios = normalize(a, b)
    assert ratios["l1d_miss"] == 0.5
    assert ratios["stall_cycles_proxy"] == 0.25


def test_normalize_skips_zero_baseline_columns():
    a = result(bfq_push=5)
    b = result(prefetcher="none", bfq_push=0, bfq_drop=0)
    ratios = normalize(a, b)
    assert "bfq_push" not in ratios
    assert "bfq_drop" not in ratios
    assert "l1d_miss" in ratios


def test_normalize_rejects_different_workloads():
    with pytest.raises(ComparisonError):
        normalize(result(seed=1), result(seed=2))
    with pytest.raises(ComparisonError):
        normalize(result(benchmark="ll"), result(benchmark="dll"))


def test_geomean_values():
    assert geomean([1.0, 1.0, 1.0]) == pytest.approx(1.0)
    assert geomean([2.0, 0.5]) == pytest.approx(1.0)
    assert geomean([4.0, 1.0]) == pytest.approx(2.0)
    assert geomean([8.0]) == pytest.approx(8.0)


def test_geomean_domain():
    with pytest.raises(ComparisonError):
        geomean([])
    with pytest.raises(ComparisonError):
        geomean([1.0, 0.0])
    with pytest.raises(ComparisonError):
        geomean([2.0, -1.0])
