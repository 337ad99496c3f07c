"""Cross-backend agreement check with timings.

Runs one workload on every available simulation core and verifies the
result rows match byte for byte; the compiled core must be a behavioral
twin of the pure-Python one, differing only in speed.
"""

from __future__ import annotations

import argparse
import sys
import time

from .config import RunConfig
from .engine import available_backends
from .workloads import run_benchmark


def main(argv=None) -> int:
    p = argparse.ArgumentParser(
        prog="linkey-bench",
        description="Time one benchmark on every available backend and "
                    "check the results agree.")
    p.add_argument("--benchmark", default="ll")
    p.add_argument("--size", default="small")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prefetcher", default="linkey",
                   choices=("none", "stride", "linkey"))
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--repeat", type=int, default=1,
                   help="timing repetitions (best is reported)")
    args = p.parse_args(argv)

    rows = []
    for backend in available_backends():
        cfg = RunConfig(benchmark=args.benchmark, size=args.size,
                        seed=args.seed, prefetcher=args.prefetcher,
                        backend=backend)
        best = None
        for _ in range(max(1, args.repeat)):
            t0 = time.perf_counter()
            out = run_benchmark(cfg, cap=args.cap)
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        rows.append((backend, best, out.result))

    print("benchmark=%s size=%s seed=%d prefetcher=%s"
          % (args.benchmark, args.size, args.seed, args.prefetcher))
    base_row = rows[0][2].csv_row()
    ok = True
    for backend, dt, result in rows:
        same = result.csv_row() == base_row
        ok = ok and same
        speed = result.kernel_accesses / dt if dt else float("inf")
        print("  %-7s %8.3fs  %12.0f accesses/s  %s"
              % (backend, dt, speed, "ok" if same else "MISMATCH"))
    if not ok:
        print("backends disagree", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
