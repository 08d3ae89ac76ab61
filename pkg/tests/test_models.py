import numpy as np
import pytest

from helpers import cos_oracle, vs
from traitspace import models
from traitspace.lexicon import make_lexicon
from traitspace.models import (
    Concept,
    ConceptModel,
    ModelError,
    assign,
    build_bigfive_model,
    build_contextual_model,
    build_lexical_model,
    concept_of_words,
    disagreement,
    load_concept_model,
    nearest_concept,
    save_concept_model,
)


def planted_vectors(rng, per=6):
    """Twelve words in two well-separated blobs."""
    words, rows = [], []
    for b, center in enumerate([[0.0, 0.0, 8.0], [8.0, 0.0, 0.0]]):
        for i in range(per):
            words.append(f"blob{b}w{i}")
            rows.append(np.asarray(center) + rng.normal(0, 0.2, 3))
    return vs(words, rows)


def marker_set(tmp_path, body):
    from traitspace.lexicon import load_markers

    path = tmp_path / "markers.txt"
    path.write_text(body, encoding="utf-8")
    return load_markers(path)


FIVE_TRAIT_FILE = (
    "O: creative\nC: neat\nE: bold\nA: kind\nN: moody\n"
)


# ---------------------------------------------------------------------------
# cluster-model construction
# ---------------------------------------------------------------------------

def test_lexical_model_recovers_planted_blobs(rng):
    vectors = planted_vectors(rng)
    lex = make_lexicon(list(vectors.ids))
    build = build_lexical_model(vectors, lex, k=2, seed=0)
    groups = {
        tuple(sorted(c.members)) for c in build.model.concepts
    }
    expected = {
        tuple(sorted(w for w in vectors.ids if w.startswith("blob0"))),
        tuple(sorted(w for w in vectors.ids if w.startswith("blob1"))),
    }
    assert groups == expected


def test_k_one_puts_every_word_in_single_concept(rng):
    vectors = planted_vectors(rng)
    lex = make_lexicon(list(vectors.ids))
    build = build_lexical_model(vectors, lex, k=1, seed=0)
    assert len(build.model.concepts) == 1
    assert set(build.model.concepts[0].members) == set(vectors.ids)


def test_cluster_model_carries_both_spaces(rng):
    vectors = planted_vectors(rng)
    lex = make_lexicon(list(vectors.ids))
    build = build_lexical_model(vectors, lex, k=2, seed=0)
    for concept in build.model.concepts:
        member_rows = np.stack([vectors.get(w) for w in concept.members])
        assert np.allclose(concept.centroid_original, member_rows.mean(axis=0))
    assert build.model.mean is not None and build.model.std is not None


def test_contextual_restriction_to_full_lexicon_matches_lexical(rng):
    vectors = planted_vectors(rng)
    lex = make_lexicon(list(vectors.ids))
    a = build_lexical_model(vectors, lex, k=2, seed=3)
    b = build_contextual_model(vectors, lex, k=2, seed=3)
    assert a.model.labels == b.model.labels
    assert np.array_equal(a.model.centroid_matrix, b.model.centroid_matrix)
    assert [c.members for c in a.model.concepts] == [c.members for c in b.model.concepts]


def test_contextual_each_word_own_concept_when_k_equals_n(rng):
    vectors = planted_vectors(rng, per=3)
    found = make_lexicon(list(vectors.ids))
    build = build_contextual_model(vectors, found, k=6, seed=0)
    assert sorted(len(c.members) for c in build.model.concepts) == [1] * 6


def test_contextual_empty_found_rejected(rng):
    vectors = planted_vectors(rng)
    from traitspace.lexicon import Lexicon

    with pytest.raises(ModelError):
        build_contextual_model(vectors, Lexicon(words=()), k=2, seed=0)


def test_words_without_vectors_dropped(rng):
    vectors = planted_vectors(rng)
    lex = make_lexicon(list(vectors.ids) + ["ghost"])
    build = build_lexical_model(vectors, lex, k=2, seed=0)
    assert "ghost" not in build.model.member_assignment


# ---------------------------------------------------------------------------
# trait-centroid model
# ---------------------------------------------------------------------------

def test_bigfive_centroid_is_marker_mean(tmp_path):
    vectors = vs(
        ["creative", "neat", "bold", "kind", "moody", "calm"],
        np.arange(18, dtype=float).reshape(6, 3),
    )
    markers = marker_set(
        tmp_path, "O: creative, calm\nC: neat\nE: bold\nA: kind\nN: moody\n"
    )
    model = build_bigfive_model(vectors, markers)
    openness = model.concept("Openness")
    expected = (vectors.get("creative") + vectors.get("calm")) / 2.0
    assert np.allclose(openness.centroid, expected)
    assert model.labels == (
        "Openness", "Conscientiousness", "Extraversion", "Agreeableness", "Neuroticism",
    )


def test_bigfive_single_marker_centroid_equals_vector(tmp_path):
    vectors = vs(["creative", "neat", "bold", "kind", "moody"], np.eye(5))
    model = build_bigfive_model(vectors, marker_set(tmp_path, FIVE_TRAIT_FILE))
    assert np.array_equal(model.concept("Extraversion").centroid, vectors.get("bold"))


def test_bigfive_independent_of_marker_file_order(tmp_path):
    vectors = vs(
        ["creative", "deep", "neat", "bold", "kind", "moody"],
        np.random.Generator(np.random.PCG64(5)).normal(size=(6, 4)),
    )
    a = build_bigfive_model(
        vectors,
        marker_set(tmp_path, "O: creative, deep\nC: neat\nE: bold\nA: kind\nN: moody\n"),
    )
    b = build_bigfive_model(
        vectors,
        marker_set(tmp_path, "N: moody\nA: kind\nE: bold\nC: neat\nO: deep, creative\n"),
    )
    assert np.array_equal(a.centroid_matrix, b.centroid_matrix)


def test_bigfive_trait_without_vectors_rejected(tmp_path):
    vectors = vs(["creative", "neat", "bold", "kind"], np.eye(4))
    with pytest.raises(ModelError, match="Neuroticism"):
        build_bigfive_model(vectors, marker_set(tmp_path, FIVE_TRAIT_FILE))


# ---------------------------------------------------------------------------
# assignment
# ---------------------------------------------------------------------------

def two_concept_model():
    return ConceptModel(
        kind="bigfive",
        concepts=(
            Concept(label="Openness", centroid=np.array([1.0, 0.0]), members=("a",)),
            Concept(label="Conscientiousness", centroid=np.array([0.0, 1.0]), members=("b",)),
            Concept(label="Extraversion", centroid=np.array([-1.0, 0.0]), members=("c",)),
            Concept(label="Agreeableness", centroid=np.array([0.0, -1.0]), members=("d",)),
            Concept(label="Neuroticism", centroid=np.array([1.0, 1.0]), members=("e",)),
        ),
    )


def test_vector_equal_to_centroid_scores_one():
    model = two_concept_model()
    label, sim = nearest_concept(model, np.array([1.0, 0.0]))
    assert label == "Openness"
    assert sim == 1.0


def test_tie_goes_to_lower_indexed_concept():
    model = ConceptModel(
        kind="bigfive",
        concepts=(
            Concept(label="Openness", centroid=np.array([1.0, 0.0]), members=()),
            Concept(label="Conscientiousness", centroid=np.array([1.0, 0.0]), members=()),
            Concept(label="Extraversion", centroid=np.array([0.0, 1.0]), members=()),
            Concept(label="Agreeableness", centroid=np.array([0.0, -1.0]), members=()),
            Concept(label="Neuroticism", centroid=np.array([-1.0, 0.0]), members=()),
        ),
    )
    label, _ = nearest_concept(model, np.array([2.0, 0.0]))
    assert label == "Openness"


def test_nearest_matches_brute_force_argmax(rng):
    concepts = tuple(
        Concept(label=f"cluster-{i}", centroid=rng.normal(size=4), members=())
        for i in range(3)
    )
    model = ConceptModel(kind="lexical", concepts=concepts, mean=np.zeros(4), std=np.ones(4))
    for _ in range(20):
        v = rng.normal(size=4)
        label, sim = nearest_concept(model, v)
        sims = [cos_oracle(v, c.centroid) for c in concepts]
        assert label == f"cluster-{int(np.argmax(sims))}"
        assert abs(sim - max(sims)) < 1e-12


def test_euclidean_metric_flag(rng):
    model = two_concept_model()
    # nearer to (1,1) euclidean, but cosine prefers exact direction (1,0)
    label_cos, _ = nearest_concept(model, np.array([30.0, 0.1]), metric="cosine")
    label_euc, dist = nearest_concept(model, np.array([0.9, 0.9]), metric="euclidean")
    assert label_cos == "Openness"
    assert label_euc == "Neuroticism"
    assert dist == pytest.approx(np.hypot(0.1, 0.1))
    with pytest.raises(ModelError):
        nearest_concept(model, np.array([1.0, 0.0]), metric="sideways")


def test_member_rule_overrides_nearest_centroid(rng):
    vectors = planted_vectors(rng)
    lex = make_lexicon(list(vectors.ids))
    build = build_lexical_model(vectors, lex, k=2, seed=0)
    model = build.model
    for word in vectors.ids:
        label, _ = assign(model, vectors.get(word), word=word)
        assert label == model.member_assignment[word]


def test_assign_non_member_falls_back_to_nearest(rng):
    model = two_concept_model()
    label, sim = assign(model, np.array([0.0, 5.0]), word="stranger")
    assert label == "Conscientiousness"
    assert sim == 1.0


def test_dimension_mismatch_rejected():
    model = two_concept_model()
    with pytest.raises(ModelError):
        nearest_concept(model, np.array([1.0, 0.0, 0.0]))


def test_concept_of_words_resolution_and_unresolved(rng):
    vectors = planted_vectors(rng)
    lex = make_lexicon(list(vectors.ids))
    model = build_lexical_model(vectors, lex, k=2, seed=0).model
    mapping, unresolved = concept_of_words(
        model, vectors, list(vectors.ids) + ["ghost"]
    )
    assert unresolved == ("ghost",)
    assert set(mapping) == set(vectors.ids)


def test_disagreement_zero_on_well_separated_blobs(rng):
    vectors = planted_vectors(rng)
    lex = make_lexicon(list(vectors.ids))
    model = build_lexical_model(vectors, lex, k=2, seed=0).model
    report = disagreement(model, vectors)
    assert report.checked == len(vectors.ids)
    assert report.rate == 0.0
    assert report.mismatched == ()


# ---------------------------------------------------------------------------
# model validation and serialization
# ---------------------------------------------------------------------------

def test_duplicate_labels_rejected():
    with pytest.raises(ModelError):
        ConceptModel(
            kind="lexical",
            concepts=(
                Concept(label="x", centroid=np.array([1.0]), members=("a",)),
                Concept(label="x", centroid=np.array([2.0]), members=("b",)),
            ),
        )


def test_word_in_two_concepts_rejected():
    with pytest.raises(ModelError):
        ConceptModel(
            kind="lexical",
            concepts=(
                Concept(label="x", centroid=np.array([1.0]), members=("a",)),
                Concept(label="y", centroid=np.array([2.0]), members=("a",)),
            ),
        )


def test_round_trip_exact(tmp_path, rng):
    vectors = planted_vectors(rng)
    lex = make_lexicon(list(vectors.ids))
    model = build_lexical_model(vectors, lex, k=2, seed=4).model
    path = tmp_path / "model.txt"
    save_concept_model(model, path, comment="config=feedface")
    loaded = load_concept_model(path)
    assert loaded.kind == model.kind
    assert loaded.labels == model.labels
    assert np.array_equal(loaded.centroid_matrix, model.centroid_matrix)
    assert np.array_equal(loaded.mean, model.mean)
    assert np.array_equal(loaded.std, model.std)
    assert loaded.constant_dims == model.constant_dims
    assert loaded.seed == model.seed and loaded.inertia == model.inertia
    assert dict(loaded.member_assignment) == dict(model.member_assignment)
    for a, b in zip(loaded.concepts, model.concepts):
        assert np.array_equal(a.centroid_original, b.centroid_original)
    # byte-for-byte stability: saving the loaded model reproduces the file
    again = tmp_path / "again.txt"
    save_concept_model(loaded, again, comment="config=feedface")
    assert again.read_bytes() == path.read_bytes()


def test_bigfive_round_trip(tmp_path):
    vectors = vs(["creative", "neat", "bold", "kind", "moody"], np.eye(5) * 2.0)
    markers_path = tmp_path / "m.txt"
    markers_path.write_text(FIVE_TRAIT_FILE, encoding="utf-8")
    from traitspace.lexicon import load_markers

    model = build_bigfive_model(vectors, load_markers(markers_path))
    path = tmp_path / "bigfive.txt"
    save_concept_model(model, path)
    loaded = load_concept_model(path)
    assert loaded.mean is None
    assert dict(loaded.member_assignment) == {}
    assert np.array_equal(loaded.centroid_matrix, model.centroid_matrix)


def test_load_rejects_member_count_mismatch(tmp_path, rng):
    vectors = planted_vectors(rng)
    lex = make_lexicon(list(vectors.ids))
    model = build_lexical_model(vectors, lex, k=2, seed=0).model
    path = tmp_path / "model.txt"
    save_concept_model(model, path)
    text = path.read_text(encoding="utf-8")
    doctored = text.replace("concept\tcluster-0\t6\t", "concept\tcluster-0\t5\t")
    path.write_text(doctored, encoding="utf-8")
    with pytest.raises(ModelError):
        load_concept_model(path)


def test_load_rejects_foreign_file(tmp_path):
    path = tmp_path / "other.txt"
    path.write_text("something\telse\n", encoding="utf-8")
    with pytest.raises(ModelError):
        load_concept_model(path)
