"""traitspace: rebuild personality-language models from adjective embeddings.

The pipeline clusters an adjective lexicon's embedding vectors into
bottom-up personality concepts, counts how online communities use those
adjectives, profiles each community over the concepts, and validates every
model against a standard personality questionnaire.
"""

__version__ = "0.1.0"

from .cluster import ClusterModel, ClusterQuality, KScan, kmeans, scan_k, silhouette
from .corpus import MentionCounts, found_vocabulary, scan, top_communities
from .evaluate import FitReport, ProfileReport, TraitMatch, fit_score, profile
from .lexicon import Lexicon, MarkerSet, load_adjectives, load_ipip, load_markers
from .models import (
    ConceptModel,
    assign,
    build_bigfive_model,
    build_contextual_model,
    build_lexical_model,
)
from .vecstore import VectorSet, cosine, load_vectors, save_vectors, standardize

__all__ = [
    "__version__",
    "ClusterModel",
    "ClusterQuality",
    "KScan",
    "kmeans",
    "scan_k",
    "silhouette",
    "MentionCounts",
    "found_vocabulary",
    "scan",
    "top_communities",
    "FitReport",
    "ProfileReport",
    "TraitMatch",
    "fit_score",
    "profile",
    "Lexicon",
    "MarkerSet",
    "load_adjectives",
    "load_ipip",
    "load_markers",
    "ConceptModel",
    "assign",
    "build_bigfive_model",
    "build_contextual_model",
    "build_lexical_model",
    "VectorSet",
    "cosine",
    "load_vectors",
    "save_vectors",
    "standardize",
]
