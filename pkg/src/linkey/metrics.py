"""Run results: the per-run record, CSV/JSON shaping, and comparison math."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .errors import ComparisonError

CSV_HEADER = ("benchmark,size,seed,prefetcher,at_entries,cat_entries,"
              "l1d_miss,l2_miss,l3_miss,prefetch_issued,prefetch_hits,"
              "accuracy,stall_cycles_proxy,at_insert,cat_insert,"
              "invalidations,evictions,bfq_push,bfq_drop")

_COUNTER_COLS = ("l1d_miss", "l2_miss", "l3_miss", "prefetch_issued",
                 "prefetch_hits", "stall_cycles_proxy", "at_insert",
                 "cat_insert", "invalidations", "evictions", "bfq_push",
                 "bfq_drop")


@dataclass(frozen=True)
class RunResult:
    """Everything one benchmark run produces, plus its identity."""

    benchmark: str
    size: str
    seed: int
    prefetcher: str
    at_entries: int
    cat_entries: int
    l1d_miss: int
    l2_miss: int
    l3_miss: int
    prefetch_issued: int
    prefetch_hits: int
    stall_cycles_proxy: int
    at_insert: int
    cat_insert: int
    invalidations: int
    evictions: int
    bfq_push: int
    bfq_drop: int
    kernel_accesses: int
    checksum: int
    backend: str

    @property
    def accuracy(self) -> float:
        if self.prefetch_issued == 0:
            return 0.0
        return self.prefetch_hits / self.prefetch_issued

    @property
    def identity(self) -> tuple:
        return (self.benchmark, self.size, self.seed)

    def csv_row(self) -> str:
        cells = [self.benchmark, self.size, str(self.seed), self.prefetcher,
                 str(self.at_entries), str(self.cat_entries),
                 str(self.l1d_miss), str(self.l2_miss), str(self.l3_miss),
                 str(self.prefetch_issued), str(self.prefetch_hits),
                 "%.6f" % self.accuracy,
                 str(self.stall_cycles_proxy), str(self.at_insert),
                 str(self.cat_insert), str(self.invalidations),
                 str(self.evictions), str(self.bfq_push), str(self.bfq_drop)]
        return ",".join(cells)

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["accuracy"] = round(self.accuracy, 6)
        return out


def make_result(run_cfg, metrics: dict, checksum: int, backend: str) -> RunResult:
    return RunResult(
        benchmark=run_cfg.benchmark, size=run_cfg.size, seed=run_cfg.seed,
        prefetcher=run_cfg.prefetcher, at_entries=run_cfg.at_entries,
        cat_entries=run_cfg.cat_entries,
        l1d_miss=metrics["l1d_miss"], l2_miss=metrics["l2_miss"],
        l3_miss=metrics["l3_miss"],
        prefetch_issued=metrics["prefetch_issued"],
        prefetch_hits=metrics["prefetch_hits"],
        stall_cycles_proxy=metrics["stall_cycles"],
        at_insert=metrics["at_insert"], cat_insert=metrics["cat_insert"],
        invalidations=metrics["invalidations"], evictions=metrics["evictions"],
        bfq_push=metrics["bfq_push"], bfq_drop=metrics["bfq_drop"],
        kernel_accesses=metrics["kernel_accesses"], checksum=checksum,
        backend=backend)


def normalize(result: RunResult, baseline: RunResult) -> dict[str, float]:
    """Per-column result/baseline ratios for two runs of the same workload.

    Columns whose baseline value is zero are left out rather than divided.
    """
    if result.identity != baseline.identity:
        raise ComparisonError(
            "cannot normalize %r against %r: different workloads"
            % (result.identity, baseline.identity))
    out: dict[str, float] = {}
    for col in _COUNTER_COLS:
        denom = getattr(baseline, col)
        if denom != 0:
            out[col] = getattr(result, col) / denom
    return out


def geomean(values) -> float:
    vals = list(values)
    if not vals:
        raise ComparisonError("geometric mean of an empty sequence")
    total = 0.0
    for v in vals:
        if v <= 0:
            raise ComparisonError("geometric mean requires positive values, got %r" % v)
        total += math.log(v)
    return math.exp(total / len(vals))
