"""Benchmark: compiled kernels vs the pure-Python fallback.

Run after `python setup.py build_ext --inplace` (or pip install):

    python benchmarks/bench_kernels.py
"""

import math
import time

import numpy as np

from satocensus import _kernels_py, backend
from satocensus.census import _tables

if backend.BACKEND != "c":
    raise SystemExit("compiled kernels not built; nothing to compare")


def timer(fn, *args, repeat=3):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_census(p):
    chi, cube, inv = _tables(p)
    h = math.isqrt(4 * p)

    def run(impl):
        hist = np.zeros(2 * h + 1, dtype=np.int64)
        impl.generic_j_hist(p, 0, p, chi, cube, inv, hist)
        return hist

    tc, hc = timer(lambda: run(backend), repeat=3)
    tp, hp = timer(lambda: run(_kernels_py), repeat=1)
    assert np.array_equal(hc, hp)
    return tc, tp


def bench_hurwitz(delta):
    tc, vc = timer(backend.hurwitz6, delta)
    tp, vp = timer(_kernels_py.hurwitz6, delta, repeat=1)
    assert vc == vp
    return tc, tp


def bench_vlk(l, k, p):
    def run(impl):
        nums = np.zeros(64, dtype=np.int64)
        dens = np.zeros(64, dtype=np.int64)
        counts = np.zeros(64, dtype=np.int64)
        impl.vlk_histogram(l, k, p, nums, dens, counts)
        return counts

    tc, cc = timer(lambda: run(backend))
    tp, cp = timer(lambda: run(_kernels_py), repeat=1)
    assert np.array_equal(cc, cp)
    return tc, tp


def bench_transport(n):
    rng = np.random.default_rng(0)
    dist = rng.random((n, n))
    supply = np.full(n, 7, dtype=np.int64)
    demand = np.full(n, 7, dtype=np.int64)
    tc, vc = timer(backend.transport_cost, dist, supply, demand)
    tp, vp = timer(_kernels_py.transport_cost, dist, supply, demand, repeat=1)
    assert abs(vc - vp) < 1e-9
    return tc, tp


def bench_dinic(n):
    rng = np.random.default_rng(1)
    dist = rng.random((n, n))
    supply = rng.integers(1, 100, n).astype(np.int64)
    demand = rng.integers(1, 100, n).astype(np.int64)
    tc, vc = timer(backend.dinic_maxflow, dist, 0.5, supply, demand)
    tp, vp = timer(_kernels_py.dinic_maxflow, dist, 0.5, supply, demand, repeat=1)
    assert vc == vp
    return tc, tp


def main():
    rows = [
        ("census scan, p=2003", *bench_census(2003)),
        ("census scan, p=10007", *bench_census(10007)),
        ("class number, |delta|~4e6", *bench_hurwitz(-4_000_003)),
        ("factor-law enumeration, 3^10", *bench_vlk(3, 5, 7)),
        ("min-cost transport, 96x96", *bench_transport(96)),
        ("threshold max-flow, 128x128", *bench_dinic(128)),
    ]
    print(f"{'kernel':<32} {'compiled':>10} {'pure':>10} {'speedup':>8}")
    for name, tc, tp in rows:
        print(f"{name:<32} {tc*1e3:>9.1f}ms {tp*1e3:>9.1f}ms {tp/tc:>7.0f}x")


if __name__ == "__main__":
    main()
