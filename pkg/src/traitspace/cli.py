"""Command-line pipeline: reproducible, config-driven runs.

Every stage writes its artifacts plus a ``manifest_<stage>.txt`` naming the
config digest, input digests and artifact digests — two runs with the same
config and inputs produce byte-identical artifacts and manifests.  Stage
outputs land atomically: files are staged in a temp directory inside the
output directory and moved into place only after the whole stage succeeded.

Settings resolve as: command-line flags > config file > built-in defaults.
The config file is flat ``key = value`` text with ``#`` comments; keys match
the long flag names with underscores.  Relative input paths in a config file
resolve against the config file's directory (the inputs travel with the
config); ``out`` resolves against the working directory.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import shutil
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import __version__, cluster, corpus, evaluate, models, vecstore
from .lexicon import load_adjectives, load_ipip, load_markers

log = logging.getLogger(__name__)

STAGES = ("cluster-lexicon", "scan-corpus", "build-models", "profile", "validate-ipip", "report")


class CliInputError(ValueError):
    """Missing or inconsistent inputs; maps to exit status 2."""


@dataclass(frozen=True)
class RunConfig:
    lexicon: str | None = None
    vectors: str | None = None
    contextual_vectors: str | None = None
    item_vectors: str | None = None
    corpus: str | None = None
    ipip: str | None = None
    markers: str | None = None
    out: str = "traitspace-out"
    seed: int = 0
    k: int = 6
    ipip_k: int = 5
    cap: int = 1_000_000
    cap_scope: str = "stream"
    top: int = 10
    top_by: str = "comments"
    metric: str = "cosine"
    count_mode: str = "tokens"
    cohesion_space: str = "original"
    matcher: str = "hash"
    communities: str = ""
    threads: int = 1
    plot_data: bool = False
    representatives: int = 5
    neighbors: int = 5
    scan_kmax: int = 10

    def lines(self) -> list[str]:
        out = []
        for f in sorted(fields(self), key=lambda f: f.name):
            value = getattr(self, f.name)
            out.append(f"{f.name} = {'' if value is None else value}")
        return out

    @property
    def digest(self) -> str:
        # The output directory and worker bound never influence results, so
        # they stay out of the digest: same inputs -> same artifact bytes,
        # wherever they land and however many threads ran.
        payload = "\n".join(
            line
            for line in self.lines()
            if not line.startswith(("out =", "threads ="))
        ).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()[:12]

    @property
    def out_dir(self) -> Path:
        return Path(self.out)

    def community_filter(self) -> tuple[str, ...] | None:
        names = tuple(n.strip() for n in self.communities.split(",") if n.strip())
        return names or None


_INT_KEYS = {"seed", "k", "ipip_k", "cap", "top", "threads", "representatives", "neighbors", "scan_kmax"}
_BOOL_KEYS = {"plot_data"}
_PATH_KEYS = {"lexicon", "vectors", "contextual_vectors", "item_vectors", "corpus", "ipip", "markers"}
_CHOICES = {
    "cap_scope": ("stream", "filtered"),
    "top_by": ("comments", "mentions"),
    "metric": ("cosine", "euclidean"),
    "count_mode": ("tokens", "comments"),
    "cohesion_space": ("original", "standardized"),
    "matcher": ("hash", "automaton"),
}


def _coerce(key: str, raw: str):
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise CliInputError(f"config key {key!r} needs an integer, got {raw!r}") from None
    if key in _BOOL_KEYS:
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise CliInputError(f"config key {key!r} needs a boolean, got {raw!r}")
    if key in _CHOICES and raw not in _CHOICES[key]:
        raise CliInputError(
            f"config key {key!r} must be one of {', '.join(_CHOICES[key])}, got {raw!r}"
        )
    return raw


def load_config_file(path: str | Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise CliInputError(f"config file not found: {path}")
    known = {f.name for f in fields(RunConfig)}
    overrides: dict = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise CliInputError(f"{path}: line {lineno}: expected 'key = value'")
        key = key.strip().replace("-", "_")
        if key not in known:
            raise CliInputError(f"{path}: line {lineno}: unknown key {key!r}")
        coerced = _coerce(key, value.strip())
        if key in _PATH_KEYS and coerced:
            # joining with an absolute value leaves it unchanged
            coerced = str(path.parent / coerced)
        overrides[key] = coerced
    return overrides


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = replace(cfg, **load_config_file(args.config))
    cli_overrides = {}
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            cli_overrides[f.name] = _coerce(f.name, value) if isinstance(value, str) else value
    return replace(cfg, **cli_overrides)


# ---------------------------------------------------------------------------
# artifact plumbing
# ---------------------------------------------------------------------------

def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


class Workspace:
    """Collects one stage's outputs in a temp dir, then installs them atomically."""

    def __init__(self, cfg: RunConfig, stage: str):
        self.cfg = cfg
        self.stage = stage
        self.out = cfg.out_dir
        self.tmp = self.out / f".tmp-{stage}"
        if self.tmp.exists():
            shutil.rmtree(self.tmp)
        self.tmp.mkdir(parents=True)
        self.artifacts: list[str] = []
        self.inputs: list[tuple[str, str]] = []

    def note_input(self, path: str | Path) -> Path:
        path = Path(path)
        if not path.is_file():
            raise CliInputError(f"input file not found: {path}")
        self.inputs.append((path.name, _sha256(path)))
        return path

    def artifact_path(self, name: str) -> Path:
        self.artifacts.append(name)
        return self.tmp / name

    def write_table(self, name: str, lines: list[str]) -> None:
        body = [f"# config={self.cfg.digest}"] + lines
        self.artifact_path(name).write_text("\n".join(body) + "\n", encoding="utf-8")

    def finalize(self) -> None:
        manifest = [
            f"stage\t{self.stage}",
            f"config\t{self.cfg.digest}",
            f"tool\ttraitspace {__version__}",
            f"numpy\t{np.__version__}",
            f"seed\t{self.cfg.seed}",
        ]
        for name, digest in sorted(self.inputs):
            manifest.append(f"input\t{name}\t{digest}")
        for name in sorted(self.artifacts):
            manifest.append(f"artifact\t{name}\t{_sha256(self.tmp / name)}")
        (self.tmp / f"manifest_{self.stage}.txt").write_text(
            "\n".join(manifest) + "\n", encoding="utf-8"
        )
        self.artifacts.append(f"manifest_{self.stage}.txt")
        for name in self.artifacts:
            (self.tmp / name).replace(self.out / name)
        shutil.rmtree(self.tmp)

    def abort(self) -> None:
        if self.tmp.exists():
            shutil.rmtree(self.tmp)


def _require(cfg: RunConfig, key: str) -> Path:
    value = getattr(cfg, key)
    if not value:
        raise CliInputError(f"--{key.replace('_', '-')} is required for this stage")
    path = Path(value)
    if not path.is_file():
        raise CliInputError(f"input file not found: {path}")
    return path


def _artifact(cfg: RunConfig, name: str, producer: str) -> Path:
    path = cfg.out_dir / name
    if not path.is_file():
        raise CliInputError(f"missing artifact {name} — run '{producer}' first")
    return path


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------

def stage_cluster_lexicon(cfg: RunConfig) -> None:
    lex_path = _require(cfg, "lexicon")
    vec_path = _require(cfg, "vectors")
    lexicon = load_adjectives(lex_path)
    vectors = vecstore.load_vectors(vec_path)
    build = models.build_lexical_model(vectors, lexicon, k=cfg.k, seed=cfg.seed)
    n_distinct = np.unique(build.scaled.scaled, axis=0).shape[0]
    kmax = min(cfg.scan_kmax, n_distinct)
    kscan = cluster.scan_k(build.scaled, kmin=2, kmax=kmax, seed=cfg.seed) if kmax >= 2 else None
    qual = cluster.quality(
        build.scaled,
        build.fitted,
        n_representative=cfg.representatives,
        cohesion_space=cfg.cohesion_space,
    )

    ws = Workspace(cfg, "cluster-lexicon")
    try:
        ws.note_input(lex_path)
        ws.note_input(vec_path)
        cluster.save_model(
            build.fitted,
            build.scaled.source.ids,
            ws.artifact_path("lexical_cluster_model.txt"),
            header_comment=f"config={cfg.digest}",
        )
        if kscan is not None:
            ws.write_table(
                "lexical_kscan.txt",
                [f"{k}\t{_fmt(s)}" for k, s in kscan.rows]
                + [f"recommended\t{kscan.recommended_k}"],
            )
        lines = [f"silhouette\t{_fmt(qual.silhouette)}", f"cohesion_space\t{cfg.cohesion_space}"]
        for c in range(build.fitted.k):
            lines.append(
                f"cluster\t{c}\t{_fmt(qual.cohesion_per_cluster[c])}\t"
                + " ".join(qual.representative_words[c])
            )
        ws.write_table("lexical_quality.txt", lines)
        if cfg.plot_data:
            rows = evaluate.pca_2d(
                build.scaled.scaled, build.scaled.source.ids, build.fitted.assignment
            )
            ws.write_table(
                "lexical_plot.txt",
                [f"{rid}\t{_fmt(x)}\t{_fmt(y)}\t{lab}" for rid, x, y, lab in rows],
            )
        ws.finalize()
    except BaseException:
        ws.abort()
        raise


def stage_scan_corpus(cfg: RunConfig) -> None:
    lex_path = _require(cfg, "lexicon")
    corpus_path = _require(cfg, "corpus")
    lexicon = load_adjectives(lex_path)
    counts = corpus.scan(
        corpus_path,
        lexicon,
        cap=cfg.cap,
        community_filter=cfg.community_filter(),
        count_mode=cfg.count_mode,
        matcher=cfg.matcher,
        workers=cfg.threads,
        cap_scope=cfg.cap_scope,
    )
    found = corpus.found_vocabulary(counts)
    leaders = corpus.top_communities(counts, n=cfg.top, by=cfg.top_by)

    ws = Workspace(cfg, "scan-corpus")
    try:
        ws.note_input(lex_path)
        ws.note_input(corpus_path)
        corpus.save_counts(
            counts, ws.artifact_path("mention_counts.txt"), header_comment=f"config={cfg.digest}"
        )
        ws.write_table("found_adjectives.txt", list(found))
        ws.write_table(
            "top_communities.txt",
            [
                f"{rank}\t{name}\t{counts.communities[name].comments}\t"
                f"{counts.communities[name].total_mentions}"
                for rank, name in enumerate(leaders, start=1)
            ],
        )
        ws.finalize()
    except BaseException:
        ws.abort()
        raise


def stage_build_models(cfg: RunConfig) -> None:
    lex_path = _require(cfg, "lexicon")
    vec_path = _require(cfg, "vectors")
    marker_path = _require(cfg, "markers")
    found_path = _artifact(cfg, "found_adjectives.txt", "scan-corpus")

    lexicon = load_adjectives(lex_path)
    vectors = vecstore.load_vectors(vec_path)
    found = load_adjectives(found_path)
    if cfg.contextual_vectors:
        ctx_path = Path(cfg.contextual_vectors)
        if not ctx_path.is_file():
            raise CliInputError(f"input file not found: {ctx_path}")
        ctx_vectors = vecstore.load_vectors(ctx_path)
    else:
        log.info(
            "no contextual embeddings supplied; the contextual model reuses "
            "the lexicon vectors restricted to found adjectives"
        )
        ctx_path = None
        ctx_vectors = vectors
    markers = load_markers(marker_path, lexicon=lexicon)

    lexical = models.build_lexical_model(vectors, lexicon, k=cfg.k, seed=cfg.seed)
    contextual = models.build_contextual_model(ctx_vectors, found, k=cfg.k, seed=cfg.seed)
    bigfive = models.build_bigfive_model(vectors, markers)

    summary: list[str] = []
    for build, source in ((lexical, vectors), (contextual, ctx_vectors)):
        model = build.model
        dis = models.disagreement(model, source)
        qual = cluster.quality(
            build.scaled,
            build.fitted,
            n_representative=cfg.representatives,
            cohesion_space=cfg.cohesion_space,
        )
        summary.append(f"model\t{model.kind}\tconcepts\t{len(model.concepts)}\tdim\t{model.dim}")
        summary.append(f"inertia\t{model.kind}\t{_fmt(model.inertia)}")
        summary.append(f"silhouette\t{model.kind}\t{_fmt(qual.silhouette)}")
        summary.append(
            f"member_disagreement\t{model.kind}\t{_fmt(dis.rate)}\tof\t{dis.checked}"
        )
        for i, concept in enumerate(model.concepts):
            summary.append(
                f"concept\t{model.kind}\t{concept.label}\t{len(concept.members)}\t"
                f"{_fmt(qual.cohesion_per_cluster[i])}\t"
                + " ".join(qual.representative_words[i])
            )
    summary.append(
        f"model\tbigfive\tconcepts\t{len(bigfive.concepts)}\tdim\t{bigfive.dim}"
    )
    for concept in bigfive.concepts:
        summary.append(
            f"concept\tbigfive\t{concept.label}\t{len(concept.members)}\t-\t"
            + " ".join(concept.members)
        )
    if markers.missing_from_lexicon:
        summary.append("markers_outside_lexicon\t" + " ".join(markers.missing_from_lexicon))

    ws = Workspace(cfg, "build-models")
    try:
        ws.note_input(lex_path)
        ws.note_input(vec_path)
        ws.note_input(marker_path)
        ws.note_input(found_path)
        if ctx_path is not None:
            ws.note_input(ctx_path)
        comment = f"config={cfg.digest}"
        models.save_concept_model(
            lexical.model, ws.artifact_path("model_lexical.txt"), comment=comment
        )
        models.save_concept_model(
            contextual.model, ws.artifact_path("model_contextual.txt"), comment=comment
        )
        models.save_concept_model(bigfive, ws.artifact_path("model_bigfive.txt"), comment=comment)
        ws.write_table("models_summary.txt", summary)
        ws.finalize()
    except BaseException:
        ws.abort()
        raise


def _load_models(cfg: RunConfig) -> dict[str, models.ConceptModel]:
    out = {}
    for kind in ("lexical", "contextual", "bigfive"):
        path = _artifact(cfg, f"model_{kind}.txt", "build-models")
        out[kind] = models.load_concept_model(path)
    return out


def stage_profile(cfg: RunConfig) -> None:
    vec_path = _require(cfg, "vectors")
    counts_path = _artifact(cfg, "mention_counts.txt", "scan-corpus")
    vectors = vecstore.load_vectors(vec_path)
    counts = corpus.load_counts(counts_path)
    trio = _load_models(cfg)
    chosen = cfg.community_filter()
    if chosen is None:
        chosen = tuple(corpus.top_communities(counts, n=cfg.top, by=cfg.top_by))

    reports = {}
    for kind, model in trio.items():
        reports[kind] = evaluate.profile(model, counts, vectors, communities=chosen)

    ws = Workspace(cfg, "profile")
    try:
        ws.note_input(vec_path)
        ws.note_input(counts_path)
        for kind in ("lexical", "contextual", "bigfive"):
            ws.note_input(cfg.out_dir / f"model_{kind}.txt")
        for kind, report in reports.items():
            lines = ["community\tcounted\tdropped\t" + "\t".join(report.labels)]
            for row in report.profiles:
                shares = "\t".join(_fmt(row.shares[label]) for label in report.labels)
                lines.append(
                    f"{row.community}\t{row.counted_mentions}\t{row.dropped_mentions}\t{shares}"
                )
            if report.unresolved_words:
                lines.append("unresolved\t" + " ".join(report.unresolved_words))
            ws.write_table(f"profile_{kind}.txt", lines)
        ws.finalize()
    except BaseException:
        ws.abort()
        raise


def stage_validate_ipip(cfg: RunConfig) -> None:
    ipip_path = _require(cfg, "ipip")
    items_vec_path = _require(cfg, "item_vectors")
    items = load_ipip(ipip_path)
    item_vectors = vecstore.load_vectors(items_vec_path)
    keys = []
    missing = 0
    for item in items:
        if item.key in item_vectors:
            keys.append(item.key)
        else:
            missing += 1
    if missing:
        log.warning("%d questionnaire items have no vector and are dropped", missing)
    if not keys:
        raise CliInputError("no questionnaire item has a vector")
    usable = item_vectors.subset(keys)
    trio = _load_models(cfg)

    fits = {kind: evaluate.fit_score(model, usable) for kind, model in trio.items()}
    neighbor_rows: list[str] = []
    for kind in ("lexical", "contextual", "bigfive"):
        near = evaluate.nearest_items(trio[kind], usable, per_concept=cfg.neighbors)
        for label in trio[kind].labels:
            for rank, (item, sim) in enumerate(near[label], start=1):
                neighbor_rows.append(f"{kind}\t{label}\t{rank}\t{_fmt(sim)}\t{item}")

    clustering = evaluate.cluster_items(usable, k=cfg.ipip_k, seed=cfg.seed)
    match = evaluate.map_clusters_to_traits(clustering, trio["bigfive"])
    declared = {item.key: (item.trait or "-") for item in items}

    ws = Workspace(cfg, "validate-ipip")
    try:
        ws.note_input(ipip_path)
        ws.note_input(items_vec_path)
        for kind in ("lexical", "contextual", "bigfive"):
            ws.note_input(cfg.out_dir / f"model_{kind}.txt")

        ranked = sorted(fits.values(), key=lambda r: (-r.score, r.kind))
        ws.write_table("fit_scores.txt", [f"{r.kind}\t{_fmt(r.score)}" for r in ranked])
        for kind, report in fits.items():
            ws.write_table(
                f"fit_items_{kind}.txt",
                [f"{row.item}\t{row.best}\t{_fmt(row.similarity)}" for row in report.per_item],
            )
        ws.write_table("nearest_items.txt", neighbor_rows)
        cluster.save_model(
            clustering.fitted,
            clustering.ids,
            ws.artifact_path("ipip_cluster_model.txt"),
            header_comment=f"config={cfg.digest}",
        )

        lines = ["matrix\tcluster\t" + "\t".join(match.trait_labels)]
        for i in range(clustering.k):
            row = "\t".join(_fmt(v) for v in match.matrix[i])
            lines.append(f"matrix\t{i}\t{row}")
        for i in sorted(match.pairs):
            lines.append(f"pair\t{i}\t{match.pairs[i]}\t{_fmt(match.similarity(i))}")
        lines.append(
            "unmatched_clusters\t" + " ".join(str(i) for i in match.unmatched_clusters)
        )
        lines.append("unmatched_traits\t" + " ".join(match.unmatched_traits))
        ws.write_table("trait_match.txt", lines)

        item_rows = []
        for item, label in zip(clustering.ids, clustering.fitted.assignment):
            trait = match.pairs.get(int(label), "-")
            item_rows.append(f"{item}\t{int(label)}\t{trait}\t{declared[item]}")
        ws.write_table("ipip_item_traits.txt", item_rows)

        if cfg.plot_data:
            rows = evaluate.pca_2d(
                clustering.scaled.scaled, clustering.ids, clustering.fitted.assignment
            )
            ws.write_table(
                "ipip_plot.txt",
                [f"{rid}\t{_fmt(x)}\t{_fmt(y)}\t{lab}" for rid, x, y, lab in rows],
            )
        ws.finalize()
    except BaseException:
        ws.abort()
        raise


def _read_table(path: Path) -> list[list[str]]:
    rows = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        rows.append(line.split("\t"))
    return rows


def stage_report(cfg: RunConfig) -> None:
    fit_path = _artifact(cfg, "fit_scores.txt", "validate-ipip")
    match_path = _artifact(cfg, "trait_match.txt", "validate-ipip")
    summary_path = _artifact(cfg, "models_summary.txt", "build-models")
    profile_paths = {
        kind: _artifact(cfg, f"profile_{kind}.txt", "profile")
        for kind in ("lexical", "contextual", "bigfive")
    }

    lines: list[str] = ["Model comparison", "================", ""]
    lines.append("Questionnaire fit (mean best cosine per item, higher is better):")
    for row in _read_table(fit_path):
        lines.append(f"  {row[0]:<12} {float(row[1]):.4f}")
    lines.append("")

    lines.append("Trait recovery from item clustering:")
    for row in _read_table(match_path):
        if row[0] == "pair":
            lines.append(f"  cluster {row[1]} -> {row[2]} (similarity {float(row[3]):.4f})")
    for row in _read_table(match_path):
        if row[0] == "unmatched_traits" and len(row) > 1 and row[1]:
            lines.append(f"  traits not recovered: {' '.join(row[1:])}")
        if row[0] == "unmatched_clusters" and len(row) > 1 and row[1]:
            lines.append(f"  clusters without a trait: {' '.join(row[1:])}")
    lines.append("")

    lines.append("Community profiles (dominant concept per model):")
    for kind, path in profile_paths.items():
        rows = _read_table(path)
        header = rows[0]
        labels = header[3:]
        lines.append(f"  [{kind}]")
        for row in rows[1:]:
            if row[0] == "unresolved":
                continue
            shares = [float(x) for x in row[3:]]
            top = max(range(len(labels)), key=lambda i: (shares[i], -i))
            lines.append(f"    {row[0]:<20} {labels[top]} ({shares[top]:.2f}%)")
    lines.append("")

    lines.append("Cluster summaries:")
    for row in _read_table(summary_path):
        if row[0] == "concept":
            lines.append(f"  {row[1]:<11} {row[2]:<18} n={row[3]:<4} {row[5] if len(row) > 5 else ''}")

    ws = Workspace(cfg, "report")
    try:
        ws.note_input(fit_path)
        ws.note_input(match_path)
        ws.note_input(summary_path)
        for path in profile_paths.values():
            ws.note_input(path)
        ws.write_table("report.txt", lines)
        ws.finalize()
    except BaseException:
        ws.abort()
        raise


def stage_all(cfg: RunConfig) -> None:
    stage_cluster_lexicon(cfg)
    stage_scan_corpus(cfg)
    stage_build_models(cfg)
    stage_profile(cfg)
    stage_validate_ipip(cfg)
    stage_report(cfg)


def cmd_inspect_vectors(cfg: RunConfig) -> None:
    vec_path = _require(cfg, "vectors")
    vs = vecstore.load_vectors(vec_path)
    print(f"count\t{len(vs)}")
    print(f"dim\t{vs.dim}")
    for rid in vs.ids:
        norm = float(np.linalg.norm(vs.get(rid)))
        print(f"vector\t{rid}\t{_fmt(norm)}")


_DISPATCH = {
    "cluster-lexicon": stage_cluster_lexicon,
    "scan-corpus": stage_scan_corpus,
    "build-models": stage_build_models,
    "profile": stage_profile,
    "validate-ipip": stage_validate_ipip,
    "report": stage_report,
    "all": stage_all,
    "inspect-vectors": cmd_inspect_vectors,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--lexicon", help="adjective list, one per line")
    sub.add_argument("--vectors", help="adjective embedding vectors (text or binary)")
    sub.add_argument("--contextual-vectors", dest="contextual_vectors",
                     help="corpus-averaged contextual embeddings")
    sub.add_argument("--item-vectors", dest="item_vectors",
                     help="questionnaire item embeddings")
    sub.add_argument("--corpus", help="newline-delimited JSON comments")
    sub.add_argument("--ipip", help="questionnaire items CSV (text,trait,facet)")
    sub.add_argument("--markers", help="trait marker adjectives file")
    sub.add_argument("--out", help="output directory (default traitspace-out)")
    sub.add_argument("--seed", type=int, help="random seed for all clustering")
    sub.add_argument("--k", type=int, help="number of adjective clusters (default 6)")
    sub.add_argument("--ipip-k", dest="ipip_k", type=int,
                     help="number of item clusters (default 5)")
    sub.add_argument("--cap", type=int, help="max comments to scan (default 1000000)")
    sub.add_argument("--cap-scope", dest="cap_scope", choices=("stream", "filtered"),
                     help="apply the cap before or after community filtering")
    sub.add_argument("--top", type=int, help="how many communities to keep (default 10)")
    sub.add_argument("--top-by", dest="top_by", choices=("comments", "mentions"),
                     help="community activity measure")
    sub.add_argument("--metric", choices=("cosine", "euclidean"),
                     help="assignment metric (default cosine)")
    sub.add_argument("--count-mode", dest="count_mode", choices=("tokens", "comments"),
                     help="count every occurrence or once per comment")
    sub.add_argument("--cohesion-space", dest="cohesion_space",
                     choices=("original", "standardized"))
    sub.add_argument("--matcher", choices=("hash", "automaton"),
                     help="adjective matching engine")
    sub.add_argument("--communities", help="comma-separated community filter")
    sub.add_argument("--threads", type=int, help="worker bound; never changes results")
    sub.add_argument("--plot-data", dest="plot_data", action="store_true", default=None,
                     help="emit 2-D projection files for plotting")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="traitspace",
        description="Rebuild personality-language models from adjective embeddings "
        "and profile how online communities use them.",
    )
    parser.add_argument("--version", action="version", version=f"traitspace {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)
    helps = {
        "cluster-lexicon": "cluster the adjective lexicon and report quality",
        "scan-corpus": "count lexicon adjectives per community",
        "build-models": "build the lexical, contextual and five-trait models",
        "profile": "profile communities over each model's concepts",
        "validate-ipip": "score models against questionnaire items",
        "report": "render a human-readable summary of prior stages",
        "all": "run every stage in order",
        "inspect-vectors": "print count, dimension and norms of a vector file",
    }
    for name, fn in _DISPATCH.items():
        sub = subs.add_parser(name, help=helps[name])
        _add_common_flags(sub)
        sub.set_defaults(func=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command != "inspect-vectors":
            cfg.out_dir.mkdir(parents=True, exist_ok=True)
        args.func(cfg)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0
