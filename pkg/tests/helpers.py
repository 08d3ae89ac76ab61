"""Independent oracles and small builders shared across test modules.

The oracles deliberately re-derive results from definitions (brute force,
direct formulas) rather than calling back into the package, so agreement is
evidence and not tautology.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from traitspace.vecstore import VectorSet

# one line per acceptance criterion, printed by conftest in the terminal summary
ACCEPTANCE_VERDICTS: list[str] = []


def vs(ids, matrix) -> VectorSet:
    return VectorSet(ids=tuple(ids), vectors=np.array(matrix, dtype=np.float64))


def cos_oracle(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(u @ v) / (math.sqrt(float(u @ u)) * math.sqrt(float(v @ v)))


def silhouette_oracle(x: np.ndarray, labels: np.ndarray) -> float:
    """O(n^2) direct-definition mean silhouette (Euclidean)."""
    n = x.shape[0]
    dist = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=2))
    clusters = np.unique(labels)
    scores = []
    for i in range(n):
        mine = labels[i]
        same = np.flatnonzero(labels == mine)
        if same.size == 1:
            scores.append(0.0)
            continue
        a = dist[i, same[same != i]].mean()
        b = min(
            dist[i, np.flatnonzero(labels == c)].mean() for c in clusters if c != mine
        )
        scores.append((b - a) / max(a, b))
    return float(np.mean(scores))


def best_two_cluster_inertia(x: np.ndarray) -> float:
    """Exhaustive optimum over all 2-cluster partitions (both non-empty)."""
    n = x.shape[0]
    best = math.inf
    for bits in range(1, 2**n - 1):
        mask = np.array([(bits >> i) & 1 for i in range(n)], dtype=bool)
        inertia = 0.0
        for part in (x[mask], x[~mask]):
            center = part.mean(axis=0)
            inertia += float(((part - center) ** 2).sum())
        best = min(best, inertia)
    return best


def fit_score_oracle(items: np.ndarray, concepts: np.ndarray) -> float:
    """Brute-force mean over items of max cosine to any concept row."""
    total = 0.0
    for item in items:
        total += max(cos_oracle(item, c) for c in concepts)
    return total / items.shape[0]


def best_assignment_oracle(matrix: np.ndarray) -> float:
    """Max total similarity over injective cluster->trait assignments."""
    rows, cols = matrix.shape
    size = min(rows, cols)
    best = -math.inf
    for chosen_rows in itertools.combinations(range(rows), size):
        for perm in itertools.permutations(range(cols), size):
            best = max(best, sum(matrix[r, c] for r, c in zip(chosen_rows, perm)))
    return best


def naive_mention_counts(bodies, lexicon_words, tokenize) -> dict[str, int]:
    """Per-adjective loop over token lists; no sets, no automaton."""
    totals: dict[str, int] = {}
    for body in bodies:
        tokens = tokenize(body)
        for adj in lexicon_words:
            hits = sum(1 for t in tokens if t == adj)
            if hits:
                totals[adj] = totals.get(adj, 0) + hits
    return totals
