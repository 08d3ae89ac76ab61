import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import best_assignment_oracle, cos_oracle, fit_score_oracle, vs
from traitspace import corpus, evaluate
from traitspace.evaluate import (
    EvalError,
    cluster_items,
    fit_score,
    map_clusters_to_traits,
    nearest_items,
    pca_2d,
    profile,
)
from traitspace.lexicon import make_lexicon
from traitspace.models import Concept, ConceptModel, build_lexical_model


def lexical_two_blobs(rng):
    words, rows = [], []
    for b, center in enumerate([[0.0, 6.0], [6.0, 0.0]]):
        for i in range(4):
            words.append(f"b{b}w{i}")
            rows.append(np.asarray(center) + rng.normal(0, 0.1, 2))
    vectors = vs(words, rows)
    build = build_lexical_model(vectors, make_lexicon(words), k=2, seed=0)
    return vectors, build.model


def counts_from(records):
    lex = make_lexicon(sorted({w for _, body in records for w in body.split()}))
    stream = [
        corpus.CommentRecord(id=str(i), subreddit=sub, body=body)
        for i, (sub, body) in enumerate(records)
    ]
    return corpus.scan(stream, lex)


def bigfive(concept_rows, labels=None):
    labels = labels or (
        "Openness", "Conscientiousness", "Extraversion", "Agreeableness", "Neuroticism",
    )
    return ConceptModel(
        kind="bigfive",
        concepts=tuple(
            Concept(label=lab, centroid=np.asarray(row, dtype=float), members=())
            for lab, row in zip(labels, concept_rows)
        ),
    )


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

def test_profile_shares_sum_to_100(rng):
    vectors, model = lexical_two_blobs(rng)
    counts = counts_from([("x", "b0w0 b0w1 b1w0"), ("y", "b1w2 b1w3")])
    report = profile(model, counts, vectors)
    for row in report.profiles:
        assert abs(sum(row.shares.values()) - 100.0) < 1e-6
    x = report.for_community("x")
    assert x.shares["cluster-0"] + x.shares["cluster-1"] == pytest.approx(100.0)
    assert x.counted_mentions == 3


def test_profile_drops_unresolvable_mentions(rng):
    vectors, model = lexical_two_blobs(rng)
    counts = counts_from([("x", "b0w0 ghostword ghostword")])
    report = profile(model, counts, vectors)
    assert report.unresolved_words == ("ghostword",)
    row = report.for_community("x")
    assert row.dropped_mentions == 2
    assert row.counted_mentions == 1
    assert abs(sum(row.shares.values()) - 100.0) < 1e-6


def test_profile_flags_empty_community(rng):
    vectors, model = lexical_two_blobs(rng)
    counts = counts_from([("x", "nothing at all")])
    report = profile(model, counts, vectors)
    row = report.for_community("x")
    assert row.empty
    assert all(v == 0.0 for v in row.shares.values())


def test_profile_subset_does_not_renormalize_others(rng):
    vectors, model = lexical_two_blobs(rng)
    counts = counts_from([("x", "b0w0 b1w0"), ("y", "b1w1"), ("z", "b0w2")])
    full = profile(model, counts, vectors)
    partial = profile(model, counts, vectors, communities=["x", "z"])
    assert partial.for_community("x").shares == full.for_community("x").shares
    assert partial.for_community("z").shares == full.for_community("z").shares


def test_profile_unknown_community_rejected(rng):
    vectors, model = lexical_two_blobs(rng)
    counts = counts_from([("x", "b0w0")])
    with pytest.raises(EvalError):
        profile(model, counts, vectors, communities=["nope"])


# ---------------------------------------------------------------------------
# fit score
# ---------------------------------------------------------------------------

def test_fit_score_matches_brute_force(rng):
    for _ in range(10):
        items = rng.normal(size=(8, 4))
        concepts = rng.normal(size=(3, 4))
        item_set = vs([f"i{j}" for j in range(8)], items)
        model = ConceptModel(
            kind="bigfive",
            concepts=tuple(
                Concept(label=l, centroid=c, members=())
                for l, c in zip(
                    ("Openness", "Conscientiousness", "Extraversion"), concepts
                )
            ),
        )
        report = fit_score(model, item_set)
        assert abs(report.score - fit_score_oracle(items, concepts)) < 1e-12


def test_fit_score_invariant_under_concept_permutation(rng):
    items = rng.normal(size=(6, 3))
    rows = rng.normal(size=(4, 3))
    item_set = vs([f"i{j}" for j in range(6)], items)
    labels = ("cluster-0", "cluster-1", "cluster-2", "cluster-3")
    fwd = ConceptModel(
        kind="lexical",
        concepts=tuple(
            Concept(label=l, centroid=r, members=()) for l, r in zip(labels, rows)
        ),
    )
    rev = ConceptModel(
        kind="lexical",
        concepts=tuple(
            Concept(label=l, centroid=r, members=())
            for l, r in zip(labels, rows[::-1])
        ),
    )
    assert fit_score(fwd, item_set).score == fit_score(rev, item_set).score


def test_fit_score_invariant_under_item_rescaling(rng):
    items = rng.normal(size=(5, 3))
    rows = rng.normal(size=(2, 3))
    model = ConceptModel(
        kind="bigfive",
        concepts=(
            Concept(label="Openness", centroid=rows[0], members=()),
            Concept(label="Neuroticism", centroid=rows[1], members=()),
        ),
    )
    a = fit_score(model, vs([f"i{j}" for j in range(5)], items))
    b = fit_score(model, vs([f"i{j}" for j in range(5)], items * 3.7))
    for ra, rb in zip(a.per_item, b.per_item):
        assert ra.best == rb.best
        assert abs(ra.similarity - rb.similarity) < 1e-12


def test_fit_score_empty_items_rejected(rng):
    model = bigfive(np.eye(5))
    with pytest.raises(EvalError):
        fit_score(model, vs([], np.empty((0, 5))))


# ---------------------------------------------------------------------------
# nearest items
# ---------------------------------------------------------------------------

def test_item_equal_to_centroid_ranks_first(rng):
    model = bigfive(np.eye(5))
    items = vs(["match", "other"], [np.eye(5)[0], rng.normal(size=5)])
    near = nearest_items(model, items, per_concept=2)
    assert near["Openness"][0][0] == "match"
    assert near["Openness"][0][1] == 1.0


def test_nearest_items_matches_full_sort(rng):
    rows = rng.normal(size=(5, 3))
    items = vs([f"i{j}" for j in range(5)], rows)
    concepts = rng.normal(size=(2, 3))
    model = ConceptModel(
        kind="bigfive",
        concepts=(
            Concept(label="Openness", centroid=concepts[0], members=()),
            Concept(label="Neuroticism", centroid=concepts[1], members=()),
        ),
    )
    near = nearest_items(model, items, per_concept=5)
    for ci, label in enumerate(("Openness", "Neuroticism")):
        expected = sorted(
            ((f"i{j}", cos_oracle(rows[j], concepts[ci])) for j in range(5)),
            key=lambda p: (-p[1], p[0]),
        )
        got = near[label]
        assert [g[0] for g in got] == [e[0] for e in expected]


def test_nearest_items_tie_breaks_by_id():
    model = bigfive(np.eye(5))
    same = np.eye(5)[0]
    items = vs(["zebra", "apple"], [same, same.copy()])
    near = nearest_items(model, items, per_concept=2)
    assert [n[0] for n in near["Openness"]] == ["apple", "zebra"]


def test_nearest_items_rejects_bad_n(rng):
    model = bigfive(np.eye(5))
    with pytest.raises(EvalError):
        nearest_items(model, vs(["a"], np.eye(5)[:1]), per_concept=0)


# ---------------------------------------------------------------------------
# item clustering and trait mapping
# ---------------------------------------------------------------------------

def item_groups(rng, directions, per=4, scale=8.0, jitter=0.15):
    ids, rows = [], []
    for g, direction in enumerate(directions):
        for i in range(per):
            ids.append(f"g{g}i{i}")
            rows.append(scale * np.asarray(direction) + rng.normal(0, jitter, len(direction)))
    return vs(ids, rows)


def test_cluster_items_recovers_planted_groups(rng):
    items = item_groups(rng, np.eye(3))
    clustering = cluster_items(items, k=3, seed=1)
    for g in range(3):
        members = clustering.members(
            int(clustering.fitted.assignment[items.ids.index(f"g{g}i0")])
        )
        assert set(members) == {f"g{g}i{i}" for i in range(4)}


def test_cluster_items_singletons_when_k_equals_n(rng):
    items = vs([f"i{j}" for j in range(5)], rng.normal(size=(5, 3)))
    clustering = cluster_items(items, k=5, seed=0)
    assert sorted(clustering.fitted.assignment.tolist()) == [0, 1, 2, 3, 4]


def test_cluster_items_too_few_rejected(rng):
    items = vs(["a", "b"], rng.normal(size=(2, 2)))
    with pytest.raises(EvalError):
        cluster_items(items, k=5, seed=0)


def test_identical_centroid_sets_match_perfectly(rng):
    directions = np.eye(5)
    items = item_groups(rng, directions, per=1, jitter=0.0)
    clustering = cluster_items(items, k=5, seed=0)
    # singleton clusters sit exactly on the five direction vectors
    traits = bigfive(clustering.centroids_original())
    match = map_clusters_to_traits(clustering, traits)
    assert len(match.pairs) == 5
    assert match.unmatched_traits == ()
    assert match.unmatched_clusters == ()
    for i in match.pairs:
        assert match.similarity(i) > 1.0 - 1e-12


def test_matrix_entries_are_exact_pair_cosines(rng):
    items = item_groups(rng, np.eye(3))
    clustering = cluster_items(items, k=3, seed=0)
    trait_rows = rng.normal(size=(5, 3))
    traits = bigfive(trait_rows)
    match = map_clusters_to_traits(clustering, traits)
    originals = clustering.centroids_original()
    for i in range(3):
        for j in range(5):
            assert match.matrix[i, j] == pytest.approx(
                cos_oracle(originals[i], trait_rows[j]), abs=1e-12
            )


def test_greedy_never_reuses_cluster_or_trait(rng):
    for seed in range(5):
        local = np.random.Generator(np.random.PCG64(seed))
        items = item_groups(local, np.eye(4), per=3)
        clustering = cluster_items(items, k=4, seed=0)
        traits = bigfive(local.normal(size=(5, 4)))
        match = map_clusters_to_traits(clustering, traits)
        used_traits = list(match.pairs.values())
        assert len(used_traits) == len(set(used_traits))
        assert len(match.pairs) + len(match.unmatched_clusters) == 4


def test_greedy_equals_exhaustive_on_dominant_fixture(rng):
    # 3 clusters vs 5 traits with a strongly dominant structure: the greedy
    # total equals the brute-force optimum
    items = item_groups(rng, np.eye(3), per=2, jitter=0.05)
    clustering = cluster_items(items, k=3, seed=0)
    trait_rows = np.vstack([np.eye(3) * 0.9, [[0.1, 0.2, 0.3], [0.3, 0.1, 0.2]]])
    traits = bigfive(trait_rows)
    match = map_clusters_to_traits(clustering, traits)
    total = sum(match.similarity(i) for i in match.pairs)
    assert total == pytest.approx(best_assignment_oracle(np.asarray(match.matrix)), abs=1e-9)


def test_dominated_trait_stays_unmatched(rng):
    # five clusters, five traits; the third trait points away from every
    # cluster, so the pairing that bare counting would force never happens
    basis = np.eye(5)
    items = item_groups(rng, basis, per=3, jitter=0.1)
    clustering = cluster_items(items, k=5, seed=0)
    trait_rows = np.array(
        [
            basis[0],
            basis[1],
            -basis[2] - 0.1 * (basis[0] + basis[1] + basis[3] + basis[4]),
            basis[3],
            basis[4],
        ]
    )
    traits = bigfive(trait_rows)
    match = map_clusters_to_traits(clustering, traits)
    assert match.unmatched_traits == ("Extraversion",)
    assert len(match.unmatched_clusters) == 1
    assert len(match.pairs) == 4


def test_trait_mapping_requires_bigfive(rng):
    items = item_groups(rng, np.eye(3))
    clustering = cluster_items(items, k=3, seed=0)
    model = ConceptModel(
        kind="lexical",
        concepts=(Concept(label="cluster-0", centroid=np.ones(3), members=()),),
    )
    with pytest.raises(EvalError):
        map_clusters_to_traits(clustering, model)


# ---------------------------------------------------------------------------
# plot data
# ---------------------------------------------------------------------------

def test_pca_preserves_rank_two_geometry(rng):
    flat = rng.normal(size=(12, 2))
    lift = np.zeros((2, 5))
    lift[0, 1] = 2.0
    lift[1, 3] = -1.0
    data = flat @ lift
    rows = pca_2d(data, [f"p{i}" for i in range(12)], labels=[0] * 12)
    coords = np.array([[x, y] for _, x, y, _ in rows])
    orig_d = np.linalg.norm(data[:, None] - data[None, :], axis=2)
    new_d = np.linalg.norm(coords[:, None] - coords[None, :], axis=2)
    assert np.allclose(orig_d, new_d, atol=1e-9)


def test_pca_output_shape_and_labels(rng):
    data = rng.normal(size=(6, 4))
    rows = pca_2d(data, [f"p{i}" for i in range(6)], labels=[1, 1, 2, 2, 3, 3])
    assert len(rows) == 6
    assert rows[0][0] == "p0"
    assert {r[3] for r in rows} == {"1", "2", "3"}


def test_pca_deterministic(rng):
    data = rng.normal(size=(9, 3))
    a = pca_2d(data, [str(i) for i in range(9)])
    b = pca_2d(data, [str(i) for i in range(9)])
    assert a == b


def test_pca_rejects_misaligned_ids(rng):
    with pytest.raises(EvalError):
        pca_2d(rng.normal(size=(3, 3)), ["a", "b"])


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_profile_rows_always_sum_to_100(seed):
    local = np.random.Generator(np.random.PCG64(seed))
    vectors, model = lexical_two_blobs(local)
    words = list(vectors.ids)
    bodies = []
    for _ in range(int(local.integers(1, 4))):
        picks = local.choice(words, size=int(local.integers(1, 6)))
        bodies.append(("community", " ".join(picks)))
    counts = counts_from(bodies)
    report = profile(model, counts, vectors)
    for row in report.profiles:
        assert abs(sum(row.shares.values()) - 100.0) < 1e-6
