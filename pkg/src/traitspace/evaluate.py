"""Community profiling and the questionnaire-item validation protocol.

Profiling turns per-community adjective counts into percentage shares over a
model's concepts.  Validation asks how well each model's concepts line up
with a standard personality questionnaire: a fit score (mean best cosine
between item embeddings and concepts), nearest-item listings per concept,
and an independent clustering of the item embeddings whose clusters are
greedily matched one-to-one against the five trait directions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cluster import ClusterModel, kmeans
from .corpus import MentionCounts
from .models import ConceptModel, concept_of_words
from .vecstore import ScaledSet, VectorSet, cosine_to_many, standardize

log = logging.getLogger(__name__)


class EvalError(ValueError):
    pass


# ---------------------------------------------------------------------------
# community profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CommunityProfile:
    community: str
    shares: Mapping[str, float]  # concept label -> percentage of mentions
    counted_mentions: int
    dropped_mentions: int

    def __post_init__(self):
        object.__setattr__(self, "shares", MappingProxyType(dict(self.shares)))

    @property
    def empty(self) -> bool:
        return self.counted_mentions == 0


@dataclass(frozen=True)
class ProfileReport:
    kind: str
    labels: tuple[str, ...]
    profiles: tuple[CommunityProfile, ...]
    unresolved_words: tuple[str, ...]

    def for_community(self, name: str) -> CommunityProfile:
        for row in self.profiles:
            if row.community == name:
                return row
        raise KeyError(name)


def profile(
    model: ConceptModel,
    counts: MentionCounts,
    vectors: VectorSet,
    communities: Sequence[str] | None = None,
) -> ProfileReport:
    """Share of each community's adjective mentions landing on each concept.

    Mentions of adjectives the model cannot place (no membership and no
    vector) are dropped and reported.  Shares of a non-empty community sum
    to 100; a community with no countable mentions keeps all-zero shares
    and is flagged.
    """
    if communities is None:
        communities = sorted(counts.communities)
    words = sorted(counts.adjective_totals())
    mapping, unresolved = concept_of_words(model, vectors, words)
    profiles = []
    for name in communities:
        if name not in counts.communities:
            raise EvalError(f"community {name!r} has no counts")
        mentions = counts.communities[name].mentions
        per_label = {label: 0 for label in model.labels}
        counted = 0
        dropped = 0
        for word, count in mentions.items():
            label = mapping.get(word)
            if label is None:
                dropped += count
                continue
            per_label[label] += count
            counted += count
        if counted:
            shares = {label: 100.0 * per_label[label] / counted for label in model.labels}
        else:
            log.warning("community %r has no resolvable mentions", name)
            shares = {label: 0.0 for label in model.labels}
        profiles.append(
            CommunityProfile(
                community=name,
                shares=shares,
                counted_mentions=counted,
                dropped_mentions=dropped,
            )
        )
    return ProfileReport(
        kind=model.kind,
        labels=model.labels,
        profiles=tuple(profiles),
        unresolved_words=unresolved,
    )


# ---------------------------------------------------------------------------
# questionnaire fit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ItemFit:
    item: str
    best: str
    similarity: float


@dataclass(frozen=True)
class FitReport:
    kind: str
    score: float
    per_item: tuple[ItemFit, ...]


def fit_score(model: ConceptModel, item_vectors: VectorSet) -> FitReport:
    """Mean over items of the best cosine between item and any concept.

    Items are compared in the model's native space, so a cluster model sees
    items through the same per-dimension scaling its centroids were fit in.
    """
    if len(item_vectors) == 0:
        raise EvalError("no item vectors to score")
    centroids = model.centroid_matrix
    per_item = []
    best_sims = np.empty(len(item_vectors))
    for row, item_id in enumerate(item_vectors.ids):
        native = model.to_native(item_vectors.get(item_id))
        sims = cosine_to_many(native, centroids)
        best = int(np.argmax(sims))
        best_sims[row] = sims[best]
        per_item.append(
            ItemFit(item=item_id, best=model.concepts[best].label, similarity=float(sims[best]))
        )
    return FitReport(kind=model.kind, score=float(best_sims.mean()), per_item=tuple(per_item))


def nearest_items(
    model: ConceptModel, item_vectors: VectorSet, per_concept: int = 5
) -> dict[str, tuple[tuple[str, float], ...]]:
    """For each concept, the items most similar to its centroid.

    Cosine in native space, descending; exact ties order by item id.
    """
    if per_concept < 1:
        raise EvalError("per_concept must be >= 1")
    native = np.stack([model.to_native(item_vectors.get(i)) for i in item_vectors.ids])
    out: dict[str, tuple[tuple[str, float], ...]] = {}
    for concept in model.concepts:
        sims = cosine_to_many(concept.centroid, native)
        ranked = sorted(zip(item_vectors.ids, sims), key=lambda p: (-p[1], p[0]))
        out[concept.label] = tuple((item, float(sim)) for item, sim in ranked[:per_concept])
    return out


# ---------------------------------------------------------------------------
# item clustering and trait recovery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IpipClustering:
    """K-means over standardized item embeddings, with the scaler kept.

    The scaler lets cluster centroids be mapped back to the original
    embedding space, where they can be compared against trait directions.
    """

    ids: tuple[str, ...]
    scaled: ScaledSet
    fitted: ClusterModel

    @property
    def k(self) -> int:
        return self.fitted.k

    def members(self, cluster: int) -> tuple[str, ...]:
        return tuple(
            item for item, c in zip(self.ids, self.fitted.assignment) if int(c) == cluster
        )

    def centroids_original(self) -> np.ndarray:
        return np.stack(
            [self.scaled.inverse_transform(c) for c in self.fitted.centroids]
        )


def cluster_items(item_vectors: VectorSet, k: int = 5, seed: int = 0) -> IpipClustering:
    if len(item_vectors) < k:
        raise EvalError(f"{len(item_vectors)} items cannot form {k} clusters")
    scaled = standardize(item_vectors)
    fitted = kmeans(scaled.scaled, k=k, seed=seed)
    return IpipClustering(ids=item_vectors.ids, scaled=scaled, fitted=fitted)


@dataclass(frozen=True)
class TraitMatch:
    """Greedy one-to-one pairing of item clusters with trait concepts."""

    matrix: np.ndarray  # clusters x traits, cosine in original space
    trait_labels: tuple[str, ...]
    pairs: Mapping[int, str]
    unmatched_clusters: tuple[int, ...]
    unmatched_traits: tuple[str, ...]

    def __post_init__(self):
        mat = np.ascontiguousarray(self.matrix, dtype=np.float64)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "pairs", MappingProxyType(dict(self.pairs)))

    def similarity(self, cluster: int) -> float:
        trait = self.pairs[cluster]
        return float(self.matrix[cluster, self.trait_labels.index(trait)])


def map_clusters_to_traits(
    clustering: IpipClustering,
    traits: ConceptModel,
    min_similarity: float = 0.0,
) -> TraitMatch:
    """Pair clusters with traits greedily by descending cosine.

    Each round takes the best remaining (cluster, trait) cell; both sides
    then leave the pool.  Cells at or below ``min_similarity`` never match:
    a non-positive cosine means no semantic alignment, so a trait that every
    cluster points away from stays unmatched even when counts would allow a
    pairing.  Ties take the lowest cluster index, then the lowest trait index.
    """
    if traits.kind != "bigfive":
        raise EvalError("trait matching needs the five-trait model")
    originals = clustering.centroids_original()
    labels = traits.labels
    matrix = np.empty((clustering.k, len(labels)))
    for i, row in enumerate(originals):
        matrix[i] = cosine_to_many(row, traits.centroid_matrix)
    work = matrix.copy()
    pairs: dict[int, str] = {}
    free_traits = set(range(len(labels)))
    for _ in range(min(clustering.k, len(labels))):
        flat = int(np.argmax(work))
        i, j = divmod(flat, work.shape[1])
        if work[i, j] <= min_similarity:
            break
        pairs[i] = labels[j]
        free_traits.discard(j)
        work[i, :] = -np.inf
        work[:, j] = -np.inf
    unmatched_clusters = tuple(i for i in range(clustering.k) if i not in pairs)
    unmatched_traits = tuple(labels[j] for j in sorted(free_traits))
    if unmatched_traits:
        log.info("traits not recovered by item clustering: %s", ", ".join(unmatched_traits))
    return TraitMatch(
        matrix=matrix,
        trait_labels=labels,
        pairs=pairs,
        unmatched_clusters=unmatched_clusters,
        unmatched_traits=unmatched_traits,
    )


# ---------------------------------------------------------------------------
# plot data
# ---------------------------------------------------------------------------

def pca_2d(
    matrix: np.ndarray, ids: Sequence[str], labels: Iterable[int | str] | None = None
) -> list[tuple[str, float, float, str]]:
    """Two principal components per row, for plotting.

    Deterministic sign convention: within each component's loadings, the
    entry with the largest magnitude is made positive.  Returns one
    ``(id, x, y, label)`` row per input row.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != len(ids):
        raise EvalError("matrix rows and ids must line up")
    if matrix.shape[0] < 2 or matrix.shape[1] < 2:
        raise EvalError("need at least two rows and two dimensions")
    centered = matrix - matrix.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:2]
    for c in range(components.shape[0]):
        pivot = int(np.argmax(np.abs(components[c])))
        if components[c, pivot] < 0:
            components[c] = -components[c]
    coords = centered @ components.T
    if labels is None:
        labels = [""] * len(ids)
    return [
        (str(i), float(x), float(y), str(lab))
        for i, (x, y), lab in zip(ids, coords, labels)
    ]
