"""Compare the compiled and pure-Python exact-OPT kernels.

Two workloads: the mixed-shape corpus used by the acceptance suite, where
most instances are easy, and dense instances with fully overlapping windows,
where the branch-and-bound does real work.

Usage: python benchmarks/bench_opt.py [--count N] [--dense-requests M]
"""
import argparse
import time

from mlagg.generators import gen_corpus, gen_instance
from mlagg.opt import OptLimits, available_backends, exact_opt


def bench(instances, backend, limits):
    start = time.perf_counter()
    costs = [exact_opt(inst, limits, backend=backend).cost for inst in instances]
    return time.perf_counter() - start, costs


def report(title, instances, limits):
    print(title)
    results = {}
    for backend in available_backends():
        secs, costs = bench(instances, backend, limits)
        results[backend] = (secs, costs)
        print(f"  {backend:>9}: {secs:8.3f}s  ({1000 * secs / len(instances):.2f} ms/instance)")
    if len(results) == 2:
        (py_s, py_c), (c_s, c_c) = results["python"], results["compiled"]
        assert py_c == c_c, "backends disagree"
        print(f"  speedup {py_s / c_s:.1f}x, identical optima")
    else:
        print("  compiled kernel not built; only the fallback was timed")


def main():
    ap = argparse.ArgumentParser(description="exact-OPT backend benchmark")
    ap.add_argument("--count", type=int, default=300)
    ap.add_argument("--dense-count", type=int, default=20)
    ap.add_argument("--dense-requests", type=int, default=14)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    corpus = [inst for _, inst in gen_corpus(args.count, args.seed, 12, 8)]
    report(f"mixed corpus: {args.count} instances, |V| <= 12, m <= 8", corpus, OptLimits())

    m = args.dense_requests
    dense = [gen_instance("random", 30, m, args.seed * 1000 + k, horizon=4, overlap=1.0)
             for k in range(args.dense_count)]
    report(f"dense: {args.dense_count} instances, |V| = 30, m = {m}, overlapping windows",
           dense, OptLimits(max_requests=m))


if __name__ == "__main__":
    main()
