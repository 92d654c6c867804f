"""Benchmark the average-linkage merge kernel: numba @njit vs numpy fallback.

Run: python benchmarks/bench_linkage.py [--sizes 200,400,800] [--clusters 7]
Matrices mimic pipeline shapes: n representatives over a few hundred lemma
features, cosine distances.
"""

import argparse
import time

import numpy as np
import scipy.sparse as sp

from subsense.clustering import cosine_distances
from subsense.kernels import HAVE_NUMBA, _merge_numba, _merge_numpy


def make_distances(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    # sparse-ish nonnegative counts like bag-of-lemma representatives
    X = rng.poisson(0.08, size=(n, 300)).astype(float)
    X[X.sum(axis=1) == 0, 0] = 1
    return cosine_distances(sp.csr_matrix(X))


def bench(fn, D: np.ndarray, target: int, repeats: int = 3) -> tuple:
    best = float("inf")
    result = None
    for _ in range(repeats):
        work = D.copy()
        start = time.perf_counter()
        result = fn(work, target)
        best = min(best, time.perf_counter() - start)
    return best, np.asarray(result)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="200,400,800", help="comma-separated row counts")
    parser.add_argument("--clusters", type=int, default=7)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if HAVE_NUMBA:
        _merge_numba(make_distances(20, 0), 3)  # trigger JIT before timing

    print(f"{'rows':>6s}  {'numba (s)':>10s}  {'numpy (s)':>10s}  {'speedup':>8s}  identical")
    for n in sizes:
        D = make_distances(n, seed=n)
        t_np, r_np = bench(_merge_numpy, D, args.clusters)
        if HAVE_NUMBA:
            t_nb, r_nb = bench(_merge_numba, D, args.clusters)
            same = np.array_equal(r_nb, r_np)
            print(f"{n:6d}  {t_nb:10.4f}  {t_np:10.4f}  {t_np / t_nb:7.1f}x  {same}")
        else:
            print(f"{n:6d}  {'-':>10s}  {t_np:10.4f}  {'-':>8s}  -")


if __name__ == "__main__":
    main()
