"""K-Means clustering with k-means++ seeding and quality scoring.

Fitting runs in standardized space with squared-Euclidean distance;
silhouette uses Euclidean distance in the same space; cohesion is cosine
similarity in original embedding space (a config switch flips it).  All
randomness flows through a seeded PCG64 generator so identical
``(data, k, seed)`` inputs reproduce identical models on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .vecstore import ScaledSet, VectorSet, centroid, cosine

DEFAULT_N_INIT = 10
DEFAULT_MAX_ITER = 300
_MODEL_FORMAT = "traitspace-cluster-model"


class ClusterError(ValueError):
    pass


class NonSeparableDataError(ClusterError):
    """Fewer distinct points than requested clusters."""


@dataclass(frozen=True)
class ClusterModel:
    """A fitted K-Means model; assignment is a verified local optimum."""

    k: int
    centroids: np.ndarray        # (k, d), standardized space
    assignment: np.ndarray       # (n,) cluster index per point
    inertia: float
    seed: int
    iterations_run: int
    inertia_trace: tuple[float, ...]

    def __post_init__(self):
        self.centroids.flags.writeable = False
        self.assignment.flags.writeable = False

    @property
    def dim(self) -> int:
        return int(self.centroids.shape[1])

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == cluster)


@dataclass(frozen=True)
class ClusterQuality:
    silhouette: float
    cohesion_per_cluster: tuple[float, ...]
    representative_words: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class KScan:
    rows: tuple[tuple[int, float], ...]
    recommended_k: int


def _as_matrix(data: ScaledSet | np.ndarray) -> np.ndarray:
    x = data.scaled if isinstance(data, ScaledSet) else np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ClusterError("need a non-empty 2-D point matrix")
    return np.ascontiguousarray(x, dtype=np.float64)


def _plusplus_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    chosen = np.empty((k, x.shape[1]), dtype=np.float64)
    first = int(rng.integers(n))
    chosen[0] = x[first]
    d2 = np.full(n, np.inf)
    kernels.min_sqdist_update(x, chosen[0], d2)
    for j in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            raise NonSeparableDataError("k-means++ ran out of distinct points")
        r = rng.random() * total
        idx = int(np.searchsorted(np.cumsum(d2), r, side="right"))
        idx = min(idx, n - 1)
        chosen[j] = x[idx]
        kernels.min_sqdist_update(x, chosen[j], d2)
    return chosen


def _repair_empty(
    x: np.ndarray,
    sums: np.ndarray,
    counts: np.ndarray,
    d2_assigned: np.ndarray,
) -> np.ndarray:
    """Means for populated clusters; empty ones reseed at the point farthest
    from its assigned centroid (keeps k intact). Ties go to the lowest index."""
    k = counts.shape[0]
    centroids = np.empty_like(sums)
    empties = [j for j in range(k) if counts[j] == 0]
    nonempty = counts > 0
    centroids[nonempty] = sums[nonempty] / counts[nonempty, None]
    if empties:
        order = np.argsort(-d2_assigned, kind="stable")
        cursor = 0
        for j in empties:
            centroids[j] = x[order[cursor]]
            cursor += 1
    return centroids


def _lloyd(
    x: np.ndarray, init: np.ndarray, max_iter: int
) -> tuple[np.ndarray, np.ndarray, float, int, list[float]]:
    k = init.shape[0]
    labels, d2 = kernels.assign_labels(x, init)
    trace = [float(d2.sum())]
    centroids = init
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        sums, counts = kernels.centroid_sums(x, labels, k)
        centroids = _repair_empty(x, sums, counts, d2)
        new_labels, d2 = kernels.assign_labels(x, centroids)
        trace.append(float(d2.sum()))
        if np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
    return labels, centroids, float(d2.sum()), iterations, trace


def kmeans(
    data: ScaledSet | np.ndarray,
    k: int,
    seed: int,
    n_init: int = DEFAULT_N_INIT,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ClusterModel:
    """Best-of-``n_init`` K-Means fit; deterministic for fixed (data, k, seed).

    Restart ``r`` draws from ``PCG64(SeedSequence([seed, r]))``, so results
    reproduce across platforms and are independent of thread count.
    """
    x = _as_matrix(data)
    n = x.shape[0]
    if k < 1 or k > n:
        raise ClusterError(f"k={k} out of range for {n} points")
    if k > 1 and np.unique(x, axis=0).shape[0] < k:
        raise NonSeparableDataError(
            f"only {np.unique(x, axis=0).shape[0]} distinct points for k={k}"
        )
    best: tuple[np.ndarray, np.ndarray, float, int, list[float]] | None = None
    for restart in range(n_init):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, restart])))
        init = _plusplus_init(x, k, rng)
        fit = _lloyd(x, init, max_iter)
        if best is None or fit[2] < best[2]:
            best = fit
    labels, centroids, inertia, iterations, trace = best
    return ClusterModel(
        k=k,
        centroids=centroids,
        assignment=labels,
        inertia=inertia,
        seed=seed,
        iterations_run=iterations,
        inertia_trace=tuple(trace),
    )


def silhouette(data: ScaledSet | np.ndarray, model: ClusterModel) -> float:
    """Mean silhouette coefficient of the model's assignment (Euclidean)."""
    if model.k < 2:
        raise ClusterError("silhouette needs k >= 2")
    x = _as_matrix(data)
    if x.shape[0] != model.assignment.shape[0]:
        raise ClusterError("model does not fit data: point count differs")
    return kernels.silhouette_mean(x, model.assignment, model.k)


def scan_k(
    data: ScaledSet | np.ndarray,
    kmin: int = 2,
    kmax: int = 10,
    seed: int = 0,
    n_init: int = DEFAULT_N_INIT,
) -> KScan:
    """Silhouette over k in [kmin, kmax]; recommends argmax, ties to smaller k."""
    x = _as_matrix(data)
    if not 2 <= kmin <= kmax <= x.shape[0]:
        raise ClusterError(f"need 2 <= kmin <= kmax <= {x.shape[0]}")
    rows: list[tuple[int, float]] = []
    best_k, best_s = kmin, -np.inf
    for k in range(kmin, kmax + 1):
        model = kmeans(x, k, seed, n_init=n_init)
        s = silhouette(x, model)
        rows.append((k, s))
        if s > best_s:
            best_k, best_s = k, s
    return KScan(rows=tuple(rows), recommended_k=best_k)


def cohesion(member_vectors: Sequence[np.ndarray] | np.ndarray) -> float:
    """Mean cosine similarity of members to their own centroid."""
    arr = np.asarray(member_vectors, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ClusterError("cohesion needs a non-empty member list")
    center = centroid(arr)
    return float(np.mean([cosine(vec, center) for vec in arr]))


def representative_words(
    model: ClusterModel, original: VectorSet, n: int
) -> tuple[tuple[str, ...], ...]:
    """Per cluster, the n member ids closest (cosine) to the cluster's
    original-space centroid, descending; ties break lexicographically."""
    if len(original) != model.assignment.shape[0]:
        raise ClusterError("vector set is not aligned with the model")
    out: list[tuple[str, ...]] = []
    for c in range(model.k):
        idx = model.members(c)
        center = centroid(original.vectors[idx])
        ranked = sorted(
            ((original.ids[i], cosine(original.vectors[i], center)) for i in idx),
            key=lambda pair: (-pair[1], pair[0]),
        )
        out.append(tuple(word for word, _ in ranked[:n]))
    return tuple(out)


def quality(
    data: ScaledSet,
    model: ClusterModel,
    n_representative: int = 5,
    cohesion_space: str = "original",
) -> ClusterQuality:
    """Silhouette, per-cluster cohesion and representative words in one shot."""
    if cohesion_space not in ("original", "standardized"):
        raise ClusterError(f"unknown cohesion space {cohesion_space!r}")
    vectors = data.source.vectors if cohesion_space == "original" else data.scaled
    cohesions = tuple(
        cohesion(vectors[model.members(c)]) for c in range(model.k)
    )
    words = representative_words(model, data.source, n_representative)
    return ClusterQuality(
        silhouette=silhouette(data, model),
        cohesion_per_cluster=cohesions,
        representative_words=words,
    )


# ---------------------------------------------------------------------------
# serialization (exact round-trip; floats written with repr)
# ---------------------------------------------------------------------------

def _fmt_floats(values: np.ndarray | Sequence[float]) -> str:
    return " ".join(repr(float(v)) for v in values)


def save_model(
    model: ClusterModel, ids: Sequence[str], path: str | Path, header_comment: str | None = None
) -> None:
    """Serialize model plus the per-point id -> cluster assignment rows."""
    if len(ids) != model.assignment.shape[0]:
        raise ClusterError("ids are not aligned with the model assignment")
    path = Path(path)
    lines = []
    if header_comment:
        lines.append(f"# {header_comment}")
    lines.append(f"format\t{_MODEL_FORMAT}\t1")
    lines.append(f"k\t{model.k}")
    lines.append(f"dim\t{model.dim}")
    lines.append(f"seed\t{model.seed}")
    lines.append(f"inertia\t{repr(model.inertia)}")
    lines.append(f"iterations\t{model.iterations_run}")
    lines.append(f"trace\t{_fmt_floats(model.inertia_trace)}")
    for c in range(model.k):
        lines.append(f"centroid\t{c}\t{_fmt_floats(model.centroids[c])}")
    for rid, lab in zip(ids, model.assignment):
        lines.append(f"assign\t{rid}\t{int(lab)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> tuple[ClusterModel, tuple[str, ...]]:
    """Inverse of :func:`save_model`; returns the model and the point ids."""
    path = Path(path)
    header: dict[str, str] = {}
    centroids: dict[int, np.ndarray] = {}
    ids: list[str] = []
    labels: list[int] = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if parts[0] == "centroid":
            centroids[int(parts[1])] = np.array(
                [float(t) for t in parts[2].split()], dtype=np.float64
            )
        elif parts[0] == "assign":
            ids.append(parts[1])
            labels.append(int(parts[2]))
        else:
            header[parts[0]] = parts[1]
    if header.get("format") != _MODEL_FORMAT:
        raise ClusterError(f"{path}: not a cluster model file")
    k = int(header["k"])
    model = ClusterModel(
        k=k,
        centroids=np.vstack([centroids[c] for c in range(k)]),
        assignment=np.array(labels, dtype=np.int64),
        inertia=float(header["inertia"]),
        seed=int(header["seed"]),
        iterations_run=int(header["iterations"]),
        inertia_trace=tuple(float(t) for t in header["trace"].split()),
    )
    return model, tuple(ids)
