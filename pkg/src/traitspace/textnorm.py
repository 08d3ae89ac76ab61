"""Shared text normalisation: one key function, one tokenizer.

Every join key in the pipeline (vector ids, lexicon entries, corpus tokens,
item texts) goes through :func:`normalize_key`, so lookups never miss on
case or Unicode form.
"""

from __future__ import annotations

import re
import unicodedata

# A token is a maximal run of letters, digits, apostrophes and hyphens; every
# other character splits.  Hyphenated lexicon entries ("well-known") therefore
# stay single tokens, and "kind" never matches inside "unkindness".
_TOKEN_RE = re.compile(r"(?:[^\W\d_]|\d|['\-])+", re.UNICODE)


def normalize_key(text: str) -> str:
    """Lowercased, NFC-normalised, stripped form used as a join key."""
    return unicodedata.normalize("NFC", text.strip().lower())


def tokenize(text: str) -> list[str]:
    """Split normalised text into matchable tokens."""
    return _TOKEN_RE.findall(normalize_key(text))


def is_token_char(ch: str) -> bool:
    """True for characters that continue a token (the matcher's boundary test)."""
    return bool(_TOKEN_RE.fullmatch(ch))
