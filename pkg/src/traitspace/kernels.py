"""Numeric hot loops behind the clustering core.

Two interchangeable backends compute the same quantities:

* ``numba`` — ``@njit``-compiled loops, used by default when numba imports.
* ``numpy`` — pure-vectorised fallback, always available.

The dispatched backend is chosen once at import time from the
``TRAITSPACE_KERNELS`` environment variable (``auto``, ``numba`` or ``numpy``;
default ``auto``).  Both backends break distance ties toward the lowest
cluster index, so label output is deterministic per backend; numba kernels are
single-threaded, which keeps results independent of thread count.  Both
implementations stay importable so the parity tests and
``benchmarks/bench_kernels.py`` can compare them directly.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_VAR = "TRAITSPACE_KERNELS"

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # numba is an optional accelerator, not a hard dependency
    _HAVE_NUMBA = False


def _resolve_backend() -> str:
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"{_ENV_VAR} must be auto, numba or numpy, got {choice!r}")
    if choice == "numba" and not _HAVE_NUMBA:
        raise ImportError(f"{_ENV_VAR}=numba but numba is not importable")
    if choice in ("auto", "numba") and _HAVE_NUMBA:
        return "numba"
    return "numpy"


BACKEND = _resolve_backend()


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _assign_labels_np(x: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = x.shape[0]
    k = centroids.shape[0]
    d2 = np.empty((n, k), dtype=np.float64)
    for j in range(k):
        diff = x - centroids[j]
        d2[:, j] = np.einsum("ij,ij->i", diff, diff)
    labels = np.argmin(d2, axis=1)
    return labels.astype(np.int64), d2[np.arange(n), labels]


def _centroid_sums_np(x: np.ndarray, labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    d = x.shape[1]
    sums = np.zeros((k, d), dtype=np.float64)
    np.add.at(sums, labels, x)
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    return sums, counts


def _min_sqdist_update_np(x: np.ndarray, centroid: np.ndarray, d2: np.ndarray) -> None:
    diff = x - centroid
    np.minimum(d2, np.einsum("ij,ij->i", diff, diff), out=d2)


def _silhouette_mean_np(x: np.ndarray, labels: np.ndarray, k: int) -> float:
    # Direct-difference distances (no |x|^2+|y|^2-2xy expansion): exact enough
    # for near-zero distances, one vectorised row at a time.
    n = x.shape[0]
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    total = 0.0
    for i in range(n):
        if counts[labels[i]] <= 1.0:
            continue
        diff = x - x[i]
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        sums = np.bincount(labels, weights=dist, minlength=k)
        own = labels[i]
        a = sums[own] / (counts[own] - 1.0)
        b = np.inf
        for c in range(k):
            if c != own and counts[c] > 0:
                b = min(b, sums[c] / counts[c])
        denom = max(a, b)
        if denom > 0.0:
            total += (b - a) / denom
    return total / n


# ---------------------------------------------------------------------------
# numba implementations (defined whenever numba imports, compiled on first use)
# ---------------------------------------------------------------------------

if _HAVE_NUMBA:

    @njit(cache=True)
    def _assign_labels_nb(x, centroids):
        n, d = x.shape
        k = centroids.shape[0]
        labels = np.empty(n, dtype=np.int64)
        best = np.empty(n, dtype=np.float64)
        for i in range(n):
            bj = 0
            bd = np.inf
            for j in range(k):
                acc = 0.0
                for t in range(d):
                    diff = x[i, t] - centroids[j, t]
                    acc += diff * diff
                if acc < bd:
                    bd = acc
                    bj = j
            labels[i] = bj
            best[i] = bd
        return labels, best

    @njit(cache=True)
    def _centroid_sums_nb(x, labels, k):
        n, d = x.shape
        sums = np.zeros((k, d), dtype=np.float64)
        counts = np.zeros(k, dtype=np.int64)
        for i in range(n):
            lab = labels[i]
            counts[lab] += 1
            for t in range(d):
                sums[lab, t] += x[i, t]
        return sums, counts

    @njit(cache=True)
    def _min_sqdist_update_nb(x, centroid, d2):
        n, d = x.shape
        for i in range(n):
            acc = 0.0
            for t in range(d):
                diff = x[i, t] - centroid[t]
                acc += diff * diff
            if acc < d2[i]:
                d2[i] = acc

    @njit(cache=True)
    def _silhouette_mean_nb(x, labels, k):
        n, d = x.shape
        counts = np.zeros(k, dtype=np.float64)
        for i in range(n):
            counts[labels[i]] += 1.0
        total = 0.0
        sums = np.empty(k, dtype=np.float64)
        for i in range(n):
            if counts[labels[i]] <= 1.0:
                continue
            for c in range(k):
                sums[c] = 0.0
            for j in range(n):
                acc = 0.0
                for t in range(d):
                    diff = x[j, t] - x[i, t]
                    acc += diff * diff
                sums[labels[j]] += np.sqrt(acc)
            own = labels[i]
            a = sums[own] / (counts[own] - 1.0)
            b = np.inf
            for c in range(k):
                if c != own and counts[c] > 0.0:
                    v = sums[c] / counts[c]
                    if v < b:
                        b = v
            denom = a if a > b else b
            if denom > 0.0:
                total += (b - a) / denom
        return total / n


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def assign_labels(x: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-centroid labels plus the squared distance to that centroid.

    Ties go to the lowest centroid index.
    """
    if BACKEND == "numba":
        return _assign_labels_nb(x, centroids)
    return _assign_labels_np(x, centroids)


def centroid_sums(x: np.ndarray, labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-cluster coordinate sums and member counts."""
    if BACKEND == "numba":
        return _centroid_sums_nb(x, labels, k)
    return _centroid_sums_np(x, labels, k)


def min_sqdist_update(x: np.ndarray, centroid: np.ndarray, d2: np.ndarray) -> None:
    """In-place ``d2 = min(d2, ||x - centroid||^2)`` (k-means++ bookkeeping)."""
    if BACKEND == "numba":
        _min_sqdist_update_nb(x, centroid, d2)
    else:
        _min_sqdist_update_np(x, centroid, d2)


def silhouette_mean(x: np.ndarray, labels: np.ndarray, k: int) -> float:
    """Mean silhouette coefficient, Euclidean distance, singletons scoring 0."""
    if BACKEND == "numba":
        return float(_silhouette_mean_nb(x, labels, k))
    return float(_silhouette_mean_np(x, labels, k))


def warmup() -> None:
    """Force JIT compilation of every dispatched kernel (cheap on numpy)."""
    x = np.array([[0.0, 0.0], [1.0, 1.0], [4.0, 4.0]])
    labels, _ = assign_labels(x, x[:2].copy())
    centroid_sums(x, labels, 2)
    d2 = np.full(3, np.inf)
    min_sqdist_update(x, x[0].copy(), d2)
    silhouette_mean(x, labels, 2)
