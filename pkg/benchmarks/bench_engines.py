#!/usr/bin/env python3
"""Throughput comparison of the two stepping engines.

Times the compiled kernel against the NumPy fallback on the full-field
solve and on the streaming last-row solve, checks that both produce
bit-identical output while at it, and prints node-updates per second.
Optionally appends the rows to a CSV for tracking.
"""

import argparse
import csv
import time

import numpy as np

from wavebound import COMPILED_ENGINE_AVAILABLE
from wavebound import _step_py as fallback

try:
    from wavebound import _step as compiled
except ImportError:
    compiled = None


def bump_row(n):
    x = np.linspace(0.0, 1.0, n)
    row = np.exp(-0.25 / np.maximum((x - 0.2) * (0.8 - x), 1e-300))
    row[(x <= 0.2) | (x >= 0.8)] = 0.0
    row[0] = row[-1] = 0.0
    return row


def time_field(mod, p0, k_max, a, dt, repeats):
    w = np.zeros((k_max + 1, p0.size))
    best = float("inf")
    for _ in range(repeats):
        w[:] = 0.0
        w[0] = p0
        t0 = time.perf_counter()
        mod.solve_field(w, None, None, a, dt)
        best = min(best, time.perf_counter() - t0)
    return best, w.copy()


def time_last(mod, p0, k_max, a, dt, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = mod.solve_last(p0, None, a, dt, k_max)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--imax", type=int, default=2000)
    ap.add_argument("--kmax", type=int, default=4000)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--csv", help="append results here")
    args = ap.parse_args()

    if not COMPILED_ENGINE_AVAILABLE or compiled is None:
        raise SystemExit("compiled engine not importable; nothing to compare")

    p0 = bump_row(args.imax + 1)
    a, dt = 0.81, 0.9 / args.imax
    updates = (args.imax - 1) * args.kmax

    rows = []
    for case, timer in (("solve_field", time_field),
                        ("solve_last", time_last)):
        t_c, out_c = timer(compiled, p0, args.kmax, a, dt, args.repeats)
        t_p, out_p = timer(fallback, p0, args.kmax, a, dt, args.repeats)
        if not np.array_equal(out_c, out_p):
            raise SystemExit(f"{case}: engines disagree bitwise")
        rows.append((case, t_c, t_p))
        print(f"{case:12s}  compiled {updates / t_c / 1e6:8.1f} Mupd/s "
              f"({t_c * 1e3:7.2f} ms)   python {updates / t_p / 1e6:8.1f} "
              f"Mupd/s ({t_p * 1e3:7.2f} ms)   speedup {t_p / t_c:5.2f}x")

    if args.csv:
        with open(args.csv, "a", newline="") as fh:
            w = csv.writer(fh)
            if fh.tell() == 0:
                w.writerow(["case", "imax", "kmax", "compiled_s",
                            "python_s", "speedup"])
            for case, t_c, t_p in rows:
                w.writerow([case, args.imax, args.kmax,
                            f"{t_c:.6e}", f"{t_p:.6e}", f"{t_p / t_c:.3f}"])


if __name__ == "__main__":
    main()
