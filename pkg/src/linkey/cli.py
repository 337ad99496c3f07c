"""Command-line harness: runs the benchmark matrix and writes reports.

One CSV row per (benchmark, size, prefetcher) cell, sorted by that key so
reruns are byte-identical.  With ``--compare`` the matrix runs a second
prefetcher on the same prepared structures and a summary of normalized
miss counts and accuracies is emitted per benchmark category.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .config import (PRESETS, RunConfig, apply_preset, hardware_size_bytes)
from .errors import RangeError, SimError
from .metrics import CSV_HEADER, geomean
from .workloads import BENCHMARKS, BENCH_NAMES, prepare, run_benchmark

SIZE_ORDER = ("small", "large", "huge")
PREF_CHOICES = ("none", "stride", "linkey")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="linkey",
        description="Deterministic cache simulation of pointer-chasing "
                    "benchmarks under a linked-structure prefetcher.")
    p.add_argument("--benchmark", default="all",
                   help="benchmark name or 'all' (default: all)")
    p.add_argument("--size", default="small",
                   choices=SIZE_ORDER + ("all",),
                   help="working-set size (default: small)")
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: $LINKEY_SEED or 0)")
    p.add_argument("--prefetcher", default="linkey", choices=PREF_CHOICES,
                   help="prefetcher to simulate (default: linkey)")
    p.add_argument("--compare", default=None, choices=PREF_CHOICES,
                   metavar="BASELINE",
                   help="also run BASELINE on the same structures and "
                        "summarize normalized metrics")
    p.add_argument("--preset", default=None, choices=sorted(PRESETS),
                   help="named (address table, child table) sizing")
    p.add_argument("--at", type=int, default=None, metavar="N",
                   help="address table entries (overrides preset)")
    p.add_argument("--cat", type=int, default=None, metavar="N",
                   help="child table entries (overrides preset)")
    p.add_argument("--bfq", type=int, default=None, metavar="N",
                   help="backup fetch queue entries (default 8)")
    p.add_argument("--buffer-cap", type=int, default=None, metavar="N",
                   help="per-event request buffer capacity (default 8)")
    p.add_argument("--drain", type=int, default=None, metavar="N",
                   help="requests drained per event window (default 2)")
    p.add_argument("--cap", type=int, default=None, metavar="NODES",
                   help="cap the node count of any single structure")
    p.add_argument("--backend", default="auto",
                   choices=("auto", "pure", "native"),
                   help="simulation core (default: auto)")
    p.add_argument("--csv", default=None, metavar="PATH",
                   help="write rows to PATH instead of stdout")
    p.add_argument("--json", default=None, metavar="PATH",
                   help="also write runs and summary as JSON to PATH")
    p.add_argument("--print-hw-size", action="store_true",
                   help="print the table storage cost in bytes and exit")
    return p


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    raw = os.environ.get("LINKEY_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise RangeError("LINKEY_SEED must be an integer, got %r" % raw)


def _base_config(args, seed: int) -> RunConfig:
    cfg = RunConfig(seed=seed, prefetcher=args.prefetcher,
                    backend=args.backend)
    if args.preset:
        cfg = apply_preset(cfg, args.preset)
    overrides = {}
    if args.at is not None:
        overrides["at_entries"] = args.at
    if args.cat is not None:
        overrides["cat_entries"] = args.cat
    if args.bfq is not None:
        overrides["bfq_entries"] = args.bfq
    if args.buffer_cap is not None:
        overrides["buffer_cap"] = args.buffer_cap
    if args.drain is not None:
        overrides["drain_per_event"] = args.drain
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg


def _accuracy_block(rows) -> dict:
    """Mean and (when defined) geometric mean of per-run accuracies."""
    accs = [r.accuracy for r in rows]
    block = {"mean": sum(accs) / len(accs)}
    block["geomean"] = geomean(accs) if all(a > 0 for a in accs) else None
    return block


def build_summary(results, selected: str, baseline: str | None) -> dict:
    cells: dict[tuple, dict] = {}
    for r in results:
        cells.setdefault((r.benchmark, r.size), {})[r.prefetcher] = r

    scopes = {"overall": lambda n: True,
              "traversal": lambda n: BENCHMARKS[n].kind == "traversal",
              "lookup": lambda n: BENCHMARKS[n].kind == "lookup"}
    out: dict = {"prefetcher": selected, "baseline": baseline, "scopes": {}}
    for scope, keep in scopes.items():
        sel = [c[selected] for (n, _), c in sorted(cells.items()) if keep(n)]
        if not sel:
            continue
        entry: dict = {"runs": len(sel),
                       "accuracy": {selected: _accuracy_block(sel)}}
        if baseline is not None:
            base = [c[baseline] for (n, _), c in sorted(cells.items())
                    if keep(n)]
            entry["accuracy"][baseline] = _accuracy_block(base)
            ratios = [s.l1d_miss / b.l1d_miss
                      for s, b in zip(sel, base) if b.l1d_miss]
            entry["miss_ratio_geomean"] = geomean(ratios) if ratios else None
        out["scopes"][scope] = entry
    return out


def _print_summary(summary: dict, stream) -> None:
    sel = summary["prefetcher"]
    base = summary["baseline"]
    head = "summary: %s" % sel
    if base:
        head += " vs %s (normalized to %s)" % (base, base)
    print(head, file=stream)
    for scope in ("traversal", "lookup", "overall"):
        entry = summary["scopes"].get(scope)
        if entry is None:
            continue
        parts = ["%s (%d runs):" % (scope, entry["runs"])]
        if base is not None and entry.get("miss_ratio_geomean") is not None:
            parts.append("l1d miss geomean %.4f" % entry["miss_ratio_geomean"])
        for pref, block in entry["accuracy"].items():
            parts.append("%s accuracy mean %.4f" % (pref, block["mean"]))
        print("  " + "  ".join(parts), file=stream)


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        seed = _resolve_seed(args)
        cfg0 = _base_config(args, seed)

        if args.print_hw_size:
            print(hardware_size_bytes(cfg0.at_entries, cfg0.cat_entries))
            return 0

        if args.benchmark == "all":
            names = BENCH_NAMES
        elif args.benchmark in BENCHMARKS:
            names = (args.benchmark,)
        else:
            print("unknown benchmark %r; choose from: %s"
                  % (args.benchmark, ", ".join(BENCH_NAMES)), file=sys.stderr)
            return 2
        sizes = SIZE_ORDER if args.size == "all" else (args.size,)
        prefs = [args.prefetcher]
        if args.compare and args.compare not in prefs:
            prefs.append(args.compare)
    except RangeError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2

    try:
        results = []
        for name in names:
            for size in sizes:
                prep = (prepare(name, size, seed, args.cap)
                        if len(prefs) > 1 else None)
                for pref in prefs:
                    cfg = replace(cfg0, benchmark=name, size=size,
                                  prefetcher=pref)
                    out = run_benchmark(cfg, cap=args.cap, prepared=prep)
                    results.append(out.result)
    except RangeError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except SimError as exc:
        print("run failed: %s" % exc, file=sys.stderr)
        return 1

    results.sort(key=lambda r: (r.benchmark, r.size, r.prefetcher))
    text = "\n".join([CSV_HEADER] + [r.csv_row() for r in results]) + "\n"
    summary = build_summary(results, args.prefetcher, args.compare)

    try:
        if args.csv:
            with open(args.csv, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if args.json:
            doc = {"runs": [r.to_dict() for r in results], "summary": summary}
            with open(args.json, "w") as fh:
                json.dump(doc, fh, indent=2)
                fh.write("\n")
    except OSError as exc:
        print("write failed: %s" % exc, file=sys.stderr)
        return 1

    _print_summary(summary, sys.stderr)
    return 0


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
