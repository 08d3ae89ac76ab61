"""Streaming comment scanner: count lexicon adjectives per community.

Input is newline-delimited JSON (one object per line) with configurable
field names; gzip/xz/bz2 input is decompressed by extension (zstd too when
the optional ``zstandard`` package is installed).  Matching is token-level,
case-insensitive and exact-form — "kind" never matches inside "unkindness".

Two interchangeable matchers produce identical counts by construction:

* :class:`TokenSetMatcher` — tokenize, then hash-set lookup (default; in
  CPython this is the faster path).
* :class:`AhoCorasickMatcher` — a multi-pattern automaton over the
  normalised raw text with token-boundary checks.

Lexicon entries that are not a single token (multiword entries) cannot match
at token level and are excluded from matching; both matchers share that rule.
"""

from __future__ import annotations

import bz2
import gzip
import json
import lzma
import logging
from collections import Counter, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

from .lexicon import Lexicon
from .textnorm import is_token_char, normalize_key, tokenize

log = logging.getLogger(__name__)

DEFAULT_CAP = 1_000_000
_BATCH = 2048


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class CommentRecord:
    id: str
    subreddit: str  # case-folded community name
    body: str


@dataclass
class CommunityCounts:
    comments: int = 0
    mentions: Counter = field(default_factory=Counter)

    @property
    def total_mentions(self) -> int:
        return sum(self.mentions.values())


@dataclass
class MentionCounts:
    """Per-community adjective occurrence counts from one scan (or a merge)."""

    communities: dict[str, CommunityCounts] = field(default_factory=dict)
    lexicon_words: tuple[str, ...] = ()
    records_scanned: int = 0
    records_skipped: int = 0
    count_mode: str = "tokens"

    def community(self, name: str) -> CommunityCounts:
        return self.communities.setdefault(name, CommunityCounts())

    @property
    def total_mentions(self) -> int:
        return sum(c.total_mentions for c in self.communities.values())

    def adjective_totals(self) -> Counter:
        totals: Counter = Counter()
        for counts in self.communities.values():
            totals.update(counts.mentions)
        return totals

    def merge(self, other: "MentionCounts") -> None:
        """Commutative, associative accumulation of another shard's counts."""
        if other.count_mode != self.count_mode:
            raise CorpusError("cannot merge counts with different count modes")
        for name, counts in other.communities.items():
            mine = self.community(name)
            mine.comments += counts.comments
            mine.mentions.update(counts.mentions)
        self.records_scanned += other.records_scanned
        self.records_skipped += other.records_skipped


# ---------------------------------------------------------------------------
# input stream
# ---------------------------------------------------------------------------

def _open_stream(path: Path) -> IO[str]:
    suffix = path.suffix.lower()
    if suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8", errors="replace")
    if suffix == ".xz":
        return lzma.open(path, "rt", encoding="utf-8", errors="replace")
    if suffix == ".bz2":
        return bz2.open(path, "rt", encoding="utf-8", errors="replace")
    if suffix == ".zst":
        try:
            import zstandard
        except ImportError:
            raise ImportError(
                f"{path}: .zst input needs the optional 'zstandard' package "
                "(pip install traitspace[zstd])"
            ) from None
        import io

        fh = path.open("rb")
        reader = zstandard.ZstdDecompressor().stream_reader(fh)
        return io.TextIOWrapper(reader, encoding="utf-8", errors="replace")
    return path.open("r", encoding="utf-8", errors="replace")


def iter_records(
    path: str | Path,
    fields: tuple[str, str, str] = ("id", "subreddit", "body"),
) -> Iterator[CommentRecord | None]:
    """Yield one CommentRecord per line; malformed lines yield None."""
    id_field, community_field, body_field = fields
    with _open_stream(Path(path)) as fh:
        for line in fh:
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                yield None
                continue
            if not isinstance(obj, dict):
                yield None
                continue
            rid = obj.get(id_field)
            community = obj.get(community_field)
            body = obj.get(body_field)
            if (
                not isinstance(rid, str)
                or not isinstance(community, str)
                or not isinstance(body, str)
                or not community.strip()
            ):
                yield None
                continue
            yield CommentRecord(id=rid, subreddit=normalize_key(community), body=body)


# ---------------------------------------------------------------------------
# matchers
# ---------------------------------------------------------------------------

def matchable_patterns(lexicon: Lexicon) -> tuple[str, ...]:
    """Entries that survive token-level matching (single-token entries)."""
    kept = []
    for word in lexicon:
        if tokenize(word) == [word]:
            kept.append(word)
    dropped = len(lexicon) - len(kept)
    if dropped:
        log.info("%d lexicon entries are not single tokens and cannot match", dropped)
    return tuple(kept)


class TokenSetMatcher:
    """Tokenize the comment and count hash-set hits."""

    def __init__(self, lexicon: Lexicon):
        self._patterns = frozenset(matchable_patterns(lexicon))

    def count(self, body: str) -> Counter:
        hits: Counter = Counter()
        for token in tokenize(body):
            if token in self._patterns:
                hits[token] += 1
        return hits


class AhoCorasickMatcher:
    """Multi-pattern automaton over normalised text with boundary checks.

    A pattern occurrence counts only when the characters on both sides are
    token separators, which makes it exactly equivalent to token lookup.
    """

    def __init__(self, lexicon: Lexicon):
        patterns = matchable_patterns(lexicon)
        self._goto: list[dict[str, int]] = [{}]
        self._fail: list[int] = [0]
        self._out: list[list[str]] = [[]]
        for pattern in patterns:
            state = 0
            for ch in pattern:
                nxt = self._goto[state].get(ch)
                if nxt is None:
                    self._goto.append({})
                    self._fail.append(0)
                    self._out.append([])
                    nxt = len(self._goto) - 1
                    self._goto[state][ch] = nxt
                state = nxt
            self._out[state].append(pattern)
        queue = deque()
        for state in self._goto[0].values():
            queue.append(state)
        while queue:
            state = queue.popleft()
            for ch, nxt in self._goto[state].items():
                queue.append(nxt)
                fall = self._fail[state]
                while fall and ch not in self._goto[fall]:
                    fall = self._fail[fall]
                self._fail[nxt] = self._goto[fall].get(ch, 0)
                if self._fail[nxt] == nxt:
                    self._fail[nxt] = 0
                self._out[nxt] = self._out[nxt] + self._out[self._fail[nxt]]

    def count(self, body: str) -> Counter:
        text = normalize_key(body)
        hits: Counter = Counter()
        state = 0
        n = len(text)
        for i, ch in enumerate(text):
            while state and ch not in self._goto[state]:
                state = self._fail[state]
            state = self._goto[state].get(ch, 0)
            for pattern in self._out[state]:
                start = i - len(pattern) + 1
                left_ok = start == 0 or not is_token_char(text[start - 1])
                right_ok = i + 1 == n or not is_token_char(text[i + 1])
                if left_ok and right_ok:
                    hits[pattern] += 1
        return hits


def make_matcher(lexicon: Lexicon, kind: str = "hash"):
    if kind == "hash":
        return TokenSetMatcher(lexicon)
    if kind == "automaton":
        return AhoCorasickMatcher(lexicon)
    raise CorpusError(f"unknown matcher {kind!r}")


# ---------------------------------------------------------------------------
# scanning
# ---------------------------------------------------------------------------

def _count_batch(
    records: list[CommentRecord], matcher, count_mode: str
) -> dict[str, CommunityCounts]:
    partial: dict[str, CommunityCounts] = {}
    for record in records:
        counts = partial.setdefault(record.subreddit, CommunityCounts())
        counts.comments += 1
        hits = matcher.count(record.body)
        if count_mode == "comments":
            for word in hits:
                counts.mentions[word] += 1
        else:
            counts.mentions.update(hits)
    return partial


def scan(
    source: str | Path | Iterable[CommentRecord | None],
    lexicon: Lexicon,
    cap: int = DEFAULT_CAP,
    community_filter: Iterable[str] | None = None,
    count_mode: str = "tokens",
    matcher: str = "hash",
    workers: int = 1,
    cap_scope: str = "stream",
    fields: tuple[str, str, str] = ("id", "subreddit", "body"),
) -> MentionCounts:
    """Count adjective mentions over the first ``cap`` accepted comments.

    ``cap_scope`` controls whether the cap counts every parsed record
    ("stream", the default) or only records passing the community filter
    ("filtered").  Results are independent of ``workers``: the cap fixes the
    record prefix and count merging is commutative.
    """
    if cap < 1:
        raise CorpusError("cap must be >= 1")
    if count_mode not in ("tokens", "comments"):
        raise CorpusError(f"unknown count mode {count_mode!r}")
    if cap_scope not in ("stream", "filtered"):
        raise CorpusError(f"unknown cap scope {cap_scope!r}")
    if isinstance(source, (str, Path)):
        stream: Iterable[CommentRecord | None] = iter_records(source, fields=fields)
    else:
        stream = source
    wanted = (
        {normalize_key(c) for c in community_filter} if community_filter is not None else None
    )
    engine = make_matcher(lexicon, matcher)

    result = MentionCounts(lexicon_words=tuple(lexicon), count_mode=count_mode)
    accepted: list[CommentRecord] = []
    parsed = 0
    for record in stream:
        if record is None:
            result.records_skipped += 1
            continue
        keep = wanted is None or record.subreddit in wanted
        if cap_scope == "stream":
            parsed += 1
            if keep:
                accepted.append(record)
            if parsed >= cap:
                break
        else:
            if keep:
                parsed += 1
                accepted.append(record)
                if parsed >= cap:
                    break
    result.records_scanned = parsed

    batches = [accepted[i : i + _BATCH] for i in range(0, len(accepted), _BATCH)]
    if workers <= 1 or len(batches) <= 1:
        partials = (_count_batch(batch, engine, count_mode) for batch in batches)
        for partial in partials:
            _merge_partial(result, partial)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for partial in pool.map(
                lambda batch: _count_batch(batch, engine, count_mode), batches
            ):
                _merge_partial(result, partial)
    found = sum(1 for _, count in result.adjective_totals().items() if count > 0)
    log.info(
        "scanned %d comments (%d skipped): %d of %d lexicon adjectives found",
        result.records_scanned,
        result.records_skipped,
        found,
        len(lexicon),
    )
    return result


def _merge_partial(result: MentionCounts, partial: dict[str, CommunityCounts]) -> None:
    for name, counts in partial.items():
        mine = result.community(name)
        mine.comments += counts.comments
        mine.mentions.update(counts.mentions)


def top_communities(counts: MentionCounts, n: int = 10, by: str = "comments") -> list[str]:
    """The n busiest communities, descending; ties break lexicographically."""
    if not counts.communities:
        raise CorpusError("no communities counted")
    if by == "comments":
        keyed = [(c.comments, name) for name, c in counts.communities.items()]
    elif by == "mentions":
        keyed = [(c.total_mentions, name) for name, c in counts.communities.items()]
    else:
        raise CorpusError(f"unknown activity measure {by!r}")
    if n > len(keyed):
        log.info("asked for top %d but only %d communities exist", n, len(keyed))
    ranked = sorted(keyed, key=lambda pair: (-pair[0], pair[1]))
    return [name for _, name in ranked[:n]]


def found_vocabulary(counts: MentionCounts) -> Lexicon:
    """Sub-lexicon of adjectives seen at least once, in lexicon order."""
    totals = counts.adjective_totals()
    words = tuple(w for w in counts.lexicon_words if totals.get(w, 0) > 0)
    if not words:
        log.warning("no lexicon adjective occurred in the scanned corpus")
    return Lexicon(words=words)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def save_counts(counts: MentionCounts, path: str | Path, header_comment: str | None = None) -> None:
    path = Path(path)
    lines = []
    if header_comment:
        lines.append(f"# {header_comment}")
    lines.append("[meta]")
    lines.append(f"count_mode\t{counts.count_mode}")
    lines.append(f"records_scanned\t{counts.records_scanned}")
    lines.append(f"records_skipped\t{counts.records_skipped}")
    lines.append("lexicon\t" + "\t".join(counts.lexicon_words))
    lines.append("[communities]")
    for name in sorted(counts.communities):
        c = counts.communities[name]
        lines.append(f"{name}\t{c.comments}\t{c.total_mentions}")
    lines.append("[mentions]")
    for name in sorted(counts.communities):
        mentions = counts.communities[name].mentions
        for word in sorted(mentions):
            lines.append(f"{name}\t{word}\t{mentions[word]}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_counts(path: str | Path) -> MentionCounts:
    path = Path(path)
    counts = MentionCounts()
    stored_totals: dict[str, int] = {}
    section = None
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        if line in ("[meta]", "[communities]", "[mentions]"):
            section = line
            continue
        parts = line.split("\t")
        if section == "[meta]":
            key = parts[0]
            if key == "count_mode":
                counts.count_mode = parts[1]
            elif key == "records_scanned":
                counts.records_scanned = int(parts[1])
            elif key == "records_skipped":
                counts.records_skipped = int(parts[1])
            elif key == "lexicon":
                counts.lexicon_words = tuple(parts[1:])
        elif section == "[communities]":
            counts.community(parts[0]).comments = int(parts[1])
            stored_totals[parts[0]] = int(parts[2])
        elif section == "[mentions]":
            counts.community(parts[0]).mentions[parts[1]] += int(parts[2])
        else:
            raise CorpusError(f"{path}: line {lineno}: content before section header")
    for name, total in stored_totals.items():
        actual = counts.communities[name].total_mentions
        if actual != total:
            raise CorpusError(
                f"{path}: community {name!r} claims {total} mentions but rows sum to {actual}"
            )
    return counts
