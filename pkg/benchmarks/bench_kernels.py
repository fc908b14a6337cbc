"""Compiled vs interpreted kernels on generated course-allocation instances.

    python3 benchmarks/bench_kernels.py [--reps 5] [--presets small-sparse,small-dense]

The interpreted column calls ``kernel.py_func``, the same code the package runs
when FAIRMATCH_DISABLE_NUMBA=1. The first compiled call is timed separately.
"""

import argparse
import statistics
import time

import numpy as np

from fairmatch import _kernels, bench, exact, laminar


def timed(fn, *args, reps=5):
    out = []
    for _ in range(reps):
        t = time.perf_counter()
        fn(*args)
        out.append(time.perf_counter() - t)
    return statistics.median(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--presets", default="tiny-sparse,small-sparse,small-dense")
    args = ap.parse_args()
    if not _kernels.HAS_NUMBA:
        print("numba disabled or missing: both columns run the interpreted kernel")

    rows = []
    first = True
    for name in args.presets.split(","):
        inst = bench.generate(bench.preset(name, seed=0))
        comp = inst.compiled
        order = np.arange(len(inst.edges), dtype=np.int64)
        scan = (comp.ptr, comp.idx, comp.caps, order)
        net = exact.build_flow_network(laminar.laminar_relaxation(inst, 0))
        flow = (net.n_nodes, net.tails, net.heads, net.caps, net.source, net.sink)
        if first:
            t = time.perf_counter()
            _kernels.greedy_scan(*scan)
            _kernels.max_flow(*flow)
            rows.append(("first call (compile/cache load)", "-", time.perf_counter() - t, float("nan")))
            first = False
        for kname, kern, kargs in (("greedy_scan", _kernels.greedy_scan, scan),
                                   ("max_flow", _kernels.max_flow, flow)):
            fast = timed(kern, *kargs, reps=args.reps)
            slow = timed(kern.py_func, *kargs, reps=max(1, args.reps // 2))
            assert np.array_equal(np.asarray(kern(*kargs)[1]), np.asarray(kern.py_func(*kargs)[1]))
            rows.append((kname, f"{name} ({len(inst.edges)} edges)", fast, slow))

    print(f"{'kernel':<32} {'instance':<26} {'numba ms':>10} {'python ms':>11} {'speedup':>8}")
    for kname, where, fast, slow in rows:
        speed = slow / fast if slow == slow else float("nan")
        slow_s = f"{slow * 1e3:11.1f}" if slow == slow else f"{'-':>11}"
        print(f"{kname:<32} {where:<26} {fast * 1e3:10.2f} {slow_s} {speed:8.1f}")


if __name__ == "__main__":
    main()
