"""The three personality-concept models and vector-to-concept assignment.

* lexical — k-means clusters of decontextualised adjective embeddings,
  fit in standardized (per-dimension z-scored) space.
* contextual — the same construction over corpus-averaged contextual
  embeddings, restricted to adjectives actually observed in the corpus.
* bigfive — one concept per trait, each the mean embedding of its marker
  adjectives in the original (unstandardized) space.

A model carries everything needed to place a *new* vector: concept
centroids (cluster models keep both the fitting-space and original-space
versions), the scaler that maps raw vectors into the fitting space, and the
training membership of its words.  Members of a cluster model are always
assigned to their training cluster — the nearest centroid can disagree
after convergence, and :func:`disagreement` measures how often.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .cluster import ClusterModel, kmeans
from .lexicon import Lexicon, MarkerSet, TRAIT_CODES, TRAIT_NAMES
from .vecstore import ScaledSet, VectorSet, cosine_to_many, standardize

log = logging.getLogger(__name__)

MODEL_KINDS = ("lexical", "contextual", "bigfive")
_FORMAT_LINE = "format\ttraitspace-concept-model\t1"


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Concept:
    """One named direction: label, centroid(s), member words.

    ``centroid`` lives in the model's fitting space; cluster models also
    keep ``centroid_original``, the member mean in raw embedding space.
    """

    label: str
    centroid: np.ndarray
    members: tuple[str, ...]
    centroid_original: np.ndarray | None = None

    def __post_init__(self):
        vec = np.ascontiguousarray(self.centroid, dtype=np.float64)
        vec.setflags(write=False)
        object.__setattr__(self, "centroid", vec)
        if self.centroid_original is not None:
            orig = np.ascontiguousarray(self.centroid_original, dtype=np.float64)
            if orig.shape != vec.shape:
                raise ModelError("centroid spaces disagree on dimensionality")
            orig.setflags(write=False)
            object.__setattr__(self, "centroid_original", orig)

    @property
    def original(self) -> np.ndarray:
        """Original-space centroid (the fitting space itself when unscaled)."""
        return self.centroid if self.centroid_original is None else self.centroid_original


@dataclass(frozen=True)
class ConceptModel:
    kind: str
    concepts: tuple[Concept, ...]
    mean: np.ndarray | None = None  # scaler, present iff fitting space is standardized
    std: np.ndarray | None = None
    constant_dims: tuple[int, ...] = ()
    seed: int | None = None
    inertia: float | None = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ModelError(f"unknown model kind {self.kind!r}")
        if not self.concepts:
            raise ModelError("a model needs at least one concept")
        dims = {c.centroid.shape[0] for c in self.concepts}
        if len(dims) != 1:
            raise ModelError("concept centroids disagree on dimensionality")
        labels = [c.label for c in self.concepts]
        if len(set(labels)) != len(labels):
            raise ModelError("concept labels must be unique")
        for arr_name in ("mean", "std"):
            arr = getattr(self, arr_name)
            if arr is not None:
                arr = np.ascontiguousarray(arr, dtype=np.float64)
                arr.setflags(write=False)
                object.__setattr__(self, arr_name, arr)
        if (self.mean is None) != (self.std is None):
            raise ModelError("scaler needs both mean and std")
        # Members define the assignment rule for cluster models; the trait
        # model assigns everything, markers included, by nearest centroid.
        assignment: dict[str, str] = {}
        if self.kind != "bigfive":
            for concept in self.concepts:
                for word in concept.members:
                    if word in assignment:
                        raise ModelError(f"word {word!r} belongs to two concepts")
                    assignment[word] = concept.label
        object.__setattr__(self, "member_assignment", MappingProxyType(assignment))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.concepts)

    @property
    def dim(self) -> int:
        return self.concepts[0].centroid.shape[0]

    @property
    def centroid_matrix(self) -> np.ndarray:
        """Fitting-space centroids, one row per concept."""
        return np.stack([c.centroid for c in self.concepts])

    def concept(self, label: str) -> Concept:
        for c in self.concepts:
            if c.label == label:
                return c
        raise KeyError(label)

    def to_native(self, vectors: np.ndarray) -> np.ndarray:
        """Map raw embedding vectors into the space the centroids live in."""
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.shape[-1] != self.dim:
            raise ModelError(
                f"vector has {vectors.shape[-1]} dimensions, model expects {self.dim}"
            )
        if self.mean is None:
            return vectors
        safe = np.where(self.std < 1e-12, 1.0, self.std)
        out = (vectors - self.mean) / safe
        if self.constant_dims:
            out[..., list(self.constant_dims)] = 0.0
        return out


@dataclass(frozen=True)
class ClusterBuild:
    """A cluster model plus the fitting by-products needed for quality metrics."""

    model: ConceptModel
    fitted: ClusterModel
    scaled: ScaledSet


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def _cluster_model(
    kind: str, vectors: VectorSet, words: Iterable[str], k: int, seed: int
) -> ClusterBuild:
    words = list(words)
    kept = [w for w in words if w in vectors]
    missing = len(words) - len(kept)
    if missing:
        log.warning("%d lexicon words have no vector and are dropped", missing)
    if not kept:
        raise ModelError("no lexicon word has a vector")
    if len(kept) < k:
        raise ModelError(f"only {len(kept)} words with vectors, cannot form {k} clusters")
    subset = vectors.subset(kept)
    scaled = standardize(subset)
    fitted = kmeans(scaled.scaled, k=k, seed=seed)
    concepts = []
    for c in range(k):
        idx = fitted.members(c)
        members = tuple(sorted(subset.ids[i] for i in idx))
        concepts.append(
            Concept(
                label=f"cluster-{c}",
                centroid=fitted.centroids[c],
                members=members,
                centroid_original=subset.vectors[idx].mean(axis=0),
            )
        )
    model = ConceptModel(
        kind=kind,
        concepts=tuple(concepts),
        mean=scaled.mean,
        std=scaled.std,
        constant_dims=scaled.constant_dims,
        seed=seed,
        inertia=fitted.inertia,
    )
    return ClusterBuild(model=model, fitted=fitted, scaled=scaled)


def build_lexical_model(
    vectors: VectorSet, lexicon: Lexicon, k: int = 6, seed: int = 0
) -> ClusterBuild:
    """Cluster the full adjective lexicon's decontextualised embeddings."""
    return _cluster_model("lexical", vectors, lexicon, k, seed)


def build_contextual_model(
    vectors: VectorSet, found: Lexicon, k: int = 6, seed: int = 0
) -> ClusterBuild:
    """Cluster corpus-averaged embeddings of the adjectives actually observed."""
    if len(found) == 0:
        raise ModelError("the corpus produced no found adjectives to cluster")
    return _cluster_model("contextual", vectors, found, k, seed)


def build_bigfive_model(vectors: VectorSet, markers: MarkerSet) -> ConceptModel:
    """One concept per trait: the mean embedding of its marker adjectives.

    Markers are averaged in sorted order so a shuffled marker file yields a
    bit-identical model.  Markers without vectors are dropped and reported;
    a trait whose markers all lack vectors is an error.
    """
    concepts = []
    unresolved: list[str] = []
    for trait in TRAIT_CODES:
        resolved = sorted(w for w in markers.by_trait[trait] if w in vectors)
        dropped = sorted(set(markers.by_trait[trait]) - set(resolved))
        unresolved.extend(dropped)
        if not resolved:
            raise ModelError(f"no marker for trait {TRAIT_NAMES[trait]} has a vector")
        stack = np.stack([vectors.get(w) for w in resolved])
        concepts.append(
            Concept(label=TRAIT_NAMES[trait], centroid=stack.mean(axis=0), members=tuple(resolved))
        )
    if unresolved:
        log.warning("markers without vectors (dropped): %s", ", ".join(unresolved))
    return ConceptModel(kind="bigfive", concepts=tuple(concepts))


# ---------------------------------------------------------------------------
# assignment
# ---------------------------------------------------------------------------

def nearest_concept(
    model: ConceptModel, vector: np.ndarray, metric: str = "cosine"
) -> tuple[str, float]:
    """Nearest concept label for a raw vector, with the winning score.

    Cosine similarity in the model's fitting space by default; ``metric=
    "euclidean"`` picks the smallest distance (score is that distance).
    Ties go to the lowest-indexed concept.
    """
    native = model.to_native(vector)
    centroids = model.centroid_matrix
    if metric == "cosine":
        sims = cosine_to_many(native, centroids)
        best = int(np.argmax(sims))
        return model.concepts[best].label, float(sims[best])
    if metric == "euclidean":
        dists = np.sqrt(((centroids - native) ** 2).sum(axis=1))
        best = int(np.argmin(dists))
        return model.concepts[best].label, float(dists[best])
    raise ModelError(f"unknown metric {metric!r}")


def assign(
    model: ConceptModel,
    vector: np.ndarray,
    word: str | None = None,
    metric: str = "cosine",
) -> tuple[str, float]:
    """Concept and similarity for a vector (optionally a known word).

    A word that was a training member keeps its training concept, scored
    against that concept's centroid; anything else gets the nearest
    centroid and its score.
    """
    if word is not None and word in model.member_assignment:
        label = model.member_assignment[word]
        concept = model.concept(label)
        native = model.to_native(vector)
        if metric == "cosine":
            return label, float(cosine_to_many(native, concept.centroid[None, :])[0])
        if metric == "euclidean":
            return label, float(np.sqrt(((concept.centroid - native) ** 2).sum()))
        raise ModelError(f"unknown metric {metric!r}")
    return nearest_concept(model, vector, metric=metric)


def concept_of_words(
    model: ConceptModel, vectors: VectorSet, words: Iterable[str]
) -> tuple[dict[str, str], tuple[str, ...]]:
    """Concept per word via the member rule, else nearest centroid.

    Returns the mapping and the words that could not be resolved (neither
    members nor present in the vector set).
    """
    mapping: dict[str, str] = {}
    unresolved: list[str] = []
    for word in words:
        if word in model.member_assignment:
            mapping[word] = model.member_assignment[word]
        elif word in vectors:
            mapping[word] = nearest_concept(model, vectors.get(word))[0]
        else:
            unresolved.append(word)
    if unresolved:
        log.warning(
            "%d words unresolvable under %s model: %s%s",
            len(unresolved),
            model.kind,
            ", ".join(unresolved[:8]),
            "…" if len(unresolved) > 8 else "",
        )
    return mapping, tuple(unresolved)


@dataclass(frozen=True)
class Disagreement:
    """How often members' nearest centroids differ from their training cluster."""

    rate: float
    mismatched: tuple[str, ...]
    checked: int


def disagreement(model: ConceptModel, vectors: VectorSet) -> Disagreement:
    members = [w for w in model.member_assignment if w in vectors]
    mismatched = []
    for word in members:
        label, _ = nearest_concept(model, vectors.get(word))
        if label != model.member_assignment[word]:
            mismatched.append(word)
    rate = len(mismatched) / len(members) if members else 0.0
    return Disagreement(rate=rate, mismatched=tuple(sorted(mismatched)), checked=len(members))


# ---------------------------------------------------------------------------
# serialization (round-trip exact; floats written with repr)
# ---------------------------------------------------------------------------

def _fmt_floats(values: np.ndarray) -> str:
    return " ".join(repr(float(v)) for v in values)


def save_concept_model(model: ConceptModel, path: str | Path, comment: str | None = None) -> None:
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines += [_FORMAT_LINE, f"kind\t{model.kind}", f"dim\t{model.dim}"]
    if model.seed is not None:
        lines.append(f"seed\t{model.seed}")
    if model.inertia is not None:
        lines.append(f"inertia\t{repr(model.inertia)}")
    if model.mean is not None:
        lines.append(f"mean\t{_fmt_floats(model.mean)}")
        lines.append(f"std\t{_fmt_floats(model.std)}")
        lines.append("constant\t" + " ".join(str(i) for i in model.constant_dims))
    for concept in model.concepts:
        lines.append(
            f"concept\t{concept.label}\t{len(concept.members)}\t{_fmt_floats(concept.centroid)}"
        )
        if concept.centroid_original is not None:
            lines.append(
                f"origcent\t{concept.label}\t{_fmt_floats(concept.centroid_original)}"
            )
        for member in concept.members:
            lines.append(f"member\t{concept.label}\t{member}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_concept_model(path: str | Path) -> ConceptModel:
    path = Path(path)
    lines = [
        ln
        for ln in path.read_text(encoding="utf-8").splitlines()
        if ln.strip() and not ln.startswith("#")
    ]
    if not lines or lines[0] != _FORMAT_LINE:
        raise ModelError(f"{path}: not a concept-model file")
    meta: dict[str, str] = {}
    order: list[str] = []
    centroids: dict[str, np.ndarray] = {}
    originals: dict[str, np.ndarray] = {}
    members: dict[str, list[str]] = {}
    declared: dict[str, int] = {}
    for line in lines[1:]:
        parts = line.split("\t")
        if parts[0] == "concept":
            label = parts[1]
            order.append(label)
            declared[label] = int(parts[2])
            centroids[label] = np.array([float(x) for x in parts[3].split()])
            members.setdefault(label, [])
        elif parts[0] == "origcent":
            originals[parts[1]] = np.array([float(x) for x in parts[2].split()])
        elif parts[0] == "member":
            members.setdefault(parts[1], []).append(parts[2])
        else:
            meta[parts[0]] = parts[1] if len(parts) > 1 else ""
    if not order:
        raise ModelError(f"{path}: file defines no concepts")
    for label in order:
        if len(members[label]) != declared[label]:
            raise ModelError(
                f"{path}: concept {label!r} declares {declared[label]} members "
                f"but lists {len(members[label])}"
            )
    concepts = tuple(
        Concept(
            label=lab,
            centroid=centroids[lab],
            members=tuple(members[lab]),
            centroid_original=originals.get(lab),
        )
        for lab in order
    )
    mean = std = None
    constant: tuple[int, ...] = ()
    if "mean" in meta:
        mean = np.array([float(x) for x in meta["mean"].split()])
        std = np.array([float(x) for x in meta["std"].split()])
        constant = tuple(int(i) for i in meta.get("constant", "").split())
    model = ConceptModel(
        kind=meta["kind"],
        concepts=concepts,
        mean=mean,
        std=std,
        constant_dims=constant,
        seed=int(meta["seed"]) if "seed" in meta else None,
        inertia=float(meta["inertia"]) if "inertia" in meta else None,
    )
    if model.dim != int(meta.get("dim", model.dim)):
        raise ModelError(f"{path}: header dim disagrees with centroid width")
    return model
