"""Time the compiled and pure-Python LRU replay kernels on one b-tree trace.

    python benchmarks/bench_lru.py [--keys N] [--txns N] [--repeat N]
"""
import argparse
import statistics
import time

from tracar.btree import build_btree_layout
from tracar.lru import available_kernels, lru_run
from tracar.model import WorkloadMix
from tracar.simulator import cache_pages, generate_trace, warmup_transactions
from tracar.zipf import ZipfSpec, calibrate_zipf


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--keys", type=int, default=1_000_000)
    ap.add_argument("--txns", type=int, default=200_000)
    ap.add_argument("--fraction", type=float, default=0.05)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    wl = WorkloadMix(n_transactions=args.txns)
    tree = build_btree_layout(args.keys, wl.key_size_bytes, wl.value_size_bytes, wl.page_size_bytes)
    zipf = ZipfSpec(args.keys, calibrate_zipf(args.keys, wl.hot_key_fraction, wl.hot_mass_fraction))
    trace = generate_trace(tree, wl, zipf, seed=0)
    cap = cache_pages(args.fraction, tree.n_pages)
    start = warmup_transactions(trace.n_transactions, tree.n_pages) * trace.path_len
    print(f"{trace.pages.size:,} page accesses, {tree.n_pages:,} pages, cache {cap:,} pages")

    timings = {}
    results = {}
    for kernel in available_kernels():
        runs = []
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            results[kernel] = lru_run(trace.pages, trace.dirty, tree.n_pages, cap, start, kernel=kernel)
            runs.append(time.perf_counter() - t0)
        timings[kernel] = statistics.median(runs)
        rate = trace.pages.size / timings[kernel] / 1e6
        print(f"{kernel:>7}: {timings[kernel] * 1e3:9.1f} ms  ({rate:6.1f} M accesses/s)  {results[kernel]}")
    if len(set(map(tuple, results.values()))) != 1:
        raise SystemExit("kernels disagree")
    if "cython" in timings:
        print(f"speedup: {timings['python'] / timings['cython']:.1f}x")


if __name__ == "__main__":
    main()
