#!/usr/bin/env python3
"""Benchmark the compiled Cython kernels against the scipy/numpy fallback.

Times the three hot kernels (CSR matvec, transposed matvec, simplex
projection) and an end-to-end graph_softmax solve at several sizes, then
prints one table per kernel with the speedup of compiled over pure.

Usage: python benchmarks/bench_backends.py [--sizes 1000,10000,50527] [--repeats 50]
"""

import argparse
import time

import numpy as np
import scipy.sparse as sp

from gtvsoftmax import NormalizedAdjacency, SolverConfig, backend, graph_softmax


def make_adjacency(rng, n, per_row=10, epsilon=1e-6):
    rows = np.repeat(np.arange(n), per_row)
    cols = rng.integers(0, n, size=n * per_row)
    counts = rng.integers(1, 10, size=n * per_row).astype(np.float64)
    m = sp.csr_matrix((counts, (rows, cols)), shape=(n, n))
    m.sum_duplicates()
    degrees = np.asarray(m.sum(axis=1)).ravel()
    data = m.data / (degrees[np.repeat(np.arange(n), np.diff(m.indptr))] + epsilon)
    matrix = sp.csr_matrix(
        (data, m.indices.astype(np.int32), m.indptr.astype(np.int32)), shape=(n, n)
    )
    return NormalizedAdjacency(matrix=matrix, epsilon=epsilon)


def timeit(fn, repeats):
    fn()  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def lm_like_logits(rng, n):
    z = rng.normal(-25.0, 1.0, size=n)
    active = rng.choice(n, size=max(2, n // 25), replace=False)
    z[active] = rng.normal(8.0, 0.25, size=active.size)
    return z


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="1000,10000,50527",
                        help="comma-separated problem sizes")
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    kernels = backend.compiled_kernels()
    if kernels is None:
        raise SystemExit("compiled kernels are not built; nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<16} {'n':>8} {'pure':>12} {'compiled':>12} {'speedup':>9}")
    for n in sizes:
        adj = make_adjacency(rng, n)
        m = adj.matrix
        x = rng.dirichlet(np.ones(n))
        a = rng.normal(size=n)

        pairs = {
            "matvec": (
                lambda: backend.pure_matvec(m, x),
                lambda: kernels.csr_matvec(m.indptr, m.indices, m.data, x),
            ),
            "rmatvec": (
                lambda: backend.pure_rmatvec(m, x),
                lambda: kernels.csr_rmatvec(m.indptr, m.indices, m.data, x, n),
            ),
            "project_simplex": (
                lambda: backend.pure_project_simplex(a),
                lambda: kernels.project_simplex(a),
            ),
        }
        for name, (pure_fn, compiled_fn) in pairs.items():
            t_pure = timeit(pure_fn, args.repeats)
            t_comp = timeit(compiled_fn, args.repeats)
            print(f"{name:<16} {n:>8} {t_pure * 1e6:>10.1f}us {t_comp * 1e6:>10.1f}us "
                  f"{t_pure / t_comp:>8.2f}x")

    print()
    print(f"{'end-to-end':<16} {'n':>8} {'pure':>12} {'compiled':>12} {'speedup':>9}")
    cfg = SolverConfig(lam=1.0, init="uniform")
    pure_trio = (backend.pure_matvec, backend.pure_rmatvec, backend.pure_project_simplex)
    compiled_trio = (
        lambda m_, x_: kernels.csr_matvec(m_.indptr, m_.indices, m_.data, x_),
        lambda m_, x_: kernels.csr_rmatvec(m_.indptr, m_.indices, m_.data, x_, m_.shape[1]),
        kernels.project_simplex,
    )
    saved = (backend.matvec, backend.rmatvec, backend.project_simplex)
    for n in sizes:
        adj = make_adjacency(rng, n)
        z = lm_like_logits(rng, n)

        def solve():
            return graph_softmax(z, adj, cfg)

        times = {}
        try:
            for label, trio in (("pure", pure_trio), ("compiled", compiled_trio)):
                backend.matvec, backend.rmatvec, backend.project_simplex = trio
                times[label] = timeit(solve, max(3, args.repeats // 10))
        finally:
            backend.matvec, backend.rmatvec, backend.project_simplex = saved
        print(f"{'graph_softmax':<16} {n:>8} {times['pure'] * 1e3:>10.2f}ms "
              f"{times['compiled'] * 1e3:>10.2f}ms "
              f"{times['pure'] / times['compiled']:>8.2f}x")


if __name__ == "__main__":
    main()
