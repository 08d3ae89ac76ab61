"""Word and item inputs: the adjective lexicon, IPIP items, trait markers.

File formats: adjectives are plain text (one per line), IPIP items are CSV
with a ``text,trait,facet`` header, markers are ``trait:adj,adj,...`` lines
keyed by the five trait codes O/C/E/A/N.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .textnorm import normalize_key

log = logging.getLogger(__name__)

TRAIT_CODES = ("O", "C", "E", "A", "N")
TRAIT_NAMES = {
    "O": "Openness",
    "C": "Conscientiousness",
    "E": "Extraversion",
    "A": "Agreeableness",
    "N": "Neuroticism",
}
EXPECTED_IPIP_ITEMS = 300


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class Lexicon:
    """Ordered, unique, normalised word list (first occurrence wins)."""

    words: tuple[str, ...]
    duplicates_dropped: int = 0
    empty_lines: int = 0
    _index: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", frozenset(self.words))

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def __iter__(self):
        return iter(self.words)


@dataclass(frozen=True)
class IpipItem:
    """One inventory item; ``text`` keeps original casing for embedding."""

    text: str
    trait: str | None = None
    facet: str | None = None

    @property
    def key(self) -> str:
        """Normalised join key used to look up the item's embedding."""
        return normalize_key(self.text)


@dataclass(frozen=True)
class MarkerSet:
    """Trait code -> marker adjectives; exactly the five O/C/E/A/N traits."""

    by_trait: dict[str, tuple[str, ...]]
    missing_from_lexicon: tuple[str, ...] = ()

    def __post_init__(self):
        if tuple(sorted(self.by_trait)) != tuple(sorted(TRAIT_CODES)):
            raise LexiconError(
                f"marker set must cover exactly {'/'.join(TRAIT_CODES)}, "
                f"got {sorted(self.by_trait)}"
            )
        for trait, words in self.by_trait.items():
            if not words:
                raise LexiconError(f"trait {trait} has no marker adjectives")

    @property
    def total(self) -> int:
        return sum(len(words) for words in self.by_trait.values())


def make_lexicon(words) -> Lexicon:
    """Normalise and deduplicate an iterable of raw words."""
    seen: dict[str, None] = {}
    duplicates = 0
    empties = 0
    for raw in words:
        word = normalize_key(raw)
        if not word:
            empties += 1
        elif word in seen:
            duplicates += 1
        else:
            seen[word] = None
    if not seen:
        raise LexiconError("no usable entries")
    return Lexicon(
        words=tuple(seen), duplicates_dropped=duplicates, empty_lines=empties
    )


def load_adjectives(path: str | Path) -> Lexicon:
    """Load a one-word-per-line lexicon; ``#`` lines are comments."""
    path = Path(path)
    lines = [
        line
        for line in path.read_text(encoding="utf-8").splitlines()
        if not line.startswith("#")
    ]
    try:
        lex = make_lexicon(lines)
    except LexiconError:
        raise LexiconError(f"{path}: no usable entries") from None
    if lex.duplicates_dropped:
        log.info("%s: dropped %d duplicate entries", path, lex.duplicates_dropped)
    return lex


def load_ipip(path: str | Path) -> list[IpipItem]:
    """Load IPIP items from CSV; rejected (empty-text) rows are logged."""
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "text" not in reader.fieldnames:
            raise LexiconError(f"{path}: missing required 'text' column")
        items: list[IpipItem] = []
        rejected = 0
        for row in reader:
            text = (row.get("text") or "").strip()
            if not text:
                rejected += 1
                continue
            trait = (row.get("trait") or "").strip().upper() or None
            if trait is not None and trait not in TRAIT_CODES:
                raise LexiconError(f"{path}: unknown trait code {trait!r} for {text!r}")
            facet = (row.get("facet") or "").strip() or None
            items.append(IpipItem(text=text, trait=trait, facet=facet))
    if rejected:
        log.warning("%s: rejected %d rows with empty text", path, rejected)
    if len(items) != EXPECTED_IPIP_ITEMS:
        log.warning(
            "%s: %d items (expected %d); continuing", path, len(items), EXPECTED_IPIP_ITEMS
        )
    return items


def load_markers(path: str | Path, lexicon: Lexicon | None = None) -> MarkerSet:
    """Load ``trait:adj,adj,...`` marker lines; optionally check lexicon
    membership and report markers the lexicon lacks."""
    path = Path(path)
    by_trait: dict[str, tuple[str, ...]] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        trait, sep, rest = line.partition(":")
        trait = trait.strip().upper()
        if not sep or trait not in TRAIT_CODES:
            raise LexiconError(f"{path}: line {lineno}: expected 'TRAIT:adj,adj,...'")
        if trait in by_trait:
            raise LexiconError(f"{path}: line {lineno}: trait {trait} repeated")
        words = tuple(
            dict.fromkeys(normalize_key(w) for w in rest.split(",") if normalize_key(w))
        )
        by_trait[trait] = words
    missing: tuple[str, ...] = ()
    if lexicon is not None:
        missing = tuple(
            sorted({w for words in by_trait.values() for w in words if w not in lexicon})
        )
        if missing:
            log.warning("%s: %d markers absent from lexicon: %s", path, len(missing), missing)
    return MarkerSet(by_trait=by_trait, missing_from_lexicon=missing)
