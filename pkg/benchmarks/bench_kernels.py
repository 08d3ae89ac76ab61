#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy twins.

Both backend implementations stay importable regardless of the
``TRAITSPACE_KERNELS`` setting, so this script times them side by side on
identical inputs and checks they agree on the answer while it is at it.

Usage::

    python benchmarks/bench_kernels.py [--n 2000] [--dim 768] [--k 6]
                                       [--sil-n 1200] [--sil-dim 64]
                                       [--repeats 5] [--seed 0]

Silhouette is O(n^2 * d), so it gets its own smaller default size.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from traitspace import kernels


def median_time(fn, args, repeats: int) -> float:
    fn(*args)  # warm: triggers JIT compilation / cache load
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=2000, help="points for assignment kernels")
    parser.add_argument("--dim", type=int, default=768, help="vector dimensionality")
    parser.add_argument("--k", type=int, default=6, help="number of centroids")
    parser.add_argument("--sil-n", type=int, default=1200, help="points for silhouette")
    parser.add_argument("--sil-dim", type=int, default=64, help="dimensionality for silhouette")
    parser.add_argument("--repeats", type=int, default=5, help="timed repetitions (median)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.Generator(np.random.PCG64(args.seed))
    x = rng.normal(size=(args.n, args.dim))
    centroids = x[rng.choice(args.n, size=args.k, replace=False)].copy()
    labels, _ = kernels._assign_labels_np(x, centroids)
    d2 = rng.random(args.n) * 10.0

    sx = rng.normal(size=(args.sil_n, args.sil_dim))
    slabels = rng.integers(0, args.k, size=args.sil_n).astype(np.int64)

    cases = [
        (
            "assign_labels",
            f"{args.n}x{args.dim}, k={args.k}",
            kernels._assign_labels_np,
            (x, centroids),
        ),
        (
            "centroid_sums",
            f"{args.n}x{args.dim}, k={args.k}",
            kernels._centroid_sums_np,
            (x, labels, args.k),
        ),
        (
            "min_sqdist_update",
            f"{args.n}x{args.dim}",
            kernels._min_sqdist_update_np,
            (x, centroids[0], d2.copy()),
        ),
        (
            "silhouette_mean",
            f"{args.sil_n}x{args.sil_dim}, k={args.k}",
            kernels._silhouette_mean_np,
            (sx, slabels, args.k),
        ),
    ]

    have_numba = getattr(kernels, "_HAVE_NUMBA", False)
    print(f"dispatched backend: {kernels.BACKEND} (numba available: {have_numba})")
    header = f"{'kernel':<18} {'shape':<22} {'numpy':>10} {'numba':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, shape, np_fn, call_args in cases:
        nb_fn = getattr(kernels, np_fn.__name__.replace("_np", "_nb"), None)
        t_np = median_time(np_fn, call_args, args.repeats)
        if nb_fn is None:
            print(f"{name:<18} {shape:<22} {t_np * 1e3:>8.2f}ms {'-':>10} {'-':>8}")
            continue
        t_nb = median_time(nb_fn, call_args, args.repeats)
        # same-answer check on the timed inputs
        got_np, got_nb = np_fn(*call_args), nb_fn(*call_args)
        if name in ("assign_labels", "centroid_sums"):
            assert np.array_equal(got_np[0], got_nb[0]), f"{name}: backends disagree"
        elif name == "silhouette_mean":
            assert abs(got_np - got_nb) < 1e-9, "silhouette: backends disagree"
        print(
            f"{name:<18} {shape:<22} {t_np * 1e3:>8.2f}ms {t_nb * 1e3:>8.2f}ms "
            f"{t_np / t_nb:>7.1f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
