#!/usr/bin/env python3
"""Regenerate the bundled desk-scale fixture.

Writes src/traitspace/fixtures/desk/: a 30-adjective lexicon in six planted
8-dimensional blobs, 200 synthetic comments over three communities, twelve
questionnaire items with matching vectors, a marker file, and a config file
wired to run the whole pipeline in seconds.  Fully deterministic — rerunning
this script must reproduce the files byte for byte.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "src" / "traitspace" / "fixtures" / "desk"

BLOBS = [
    ["unlovable", "unattractive", "incompetent", "worthless", "inadequate"],
    ["kind", "warm", "friendly", "caring", "helpful"],
    ["creative", "curious", "inventive", "insightful", "clever"],
    ["rude", "cruel", "harsh", "hostile", "arrogant"],
    ["calm", "relaxed", "steady", "patient", "composed"],
    ["lively", "energetic", "outgoing", "talkative", "cheerful"],
]

# never used in any comment: keeps the found vocabulary a strict subset
NEVER_MENTIONED = {"composed", "insightful"}

MARKERS = {
    "O": ["creative", "inventive"],
    "C": ["steady", "patient"],
    "E": ["talkative", "outgoing"],
    "A": ["kind", "warm"],
    "N": ["worthless", "inadequate"],
}

# (item text, declared trait, home blob)
IPIP_ITEMS = [
    ("Worry about things", "N", 0),
    ("Feel inadequate", "N", 0),
    ("Am kind to everyone", "A", 1),
    ("Sympathize with others", "A", 1),
    ("Have a vivid imagination", "O", 2),
    ("Love to think up new ways of doing things", "O", 2),
    ("Insult people", "A", 3),
    ("Get angry easily", "N", 3),
    ("Am always prepared", "C", 4),
    ("Am exacting in my work", "C", 4),
    ("Am the life of the party", "E", 5),
    ("Talk to a lot of different people at parties", "E", 5),
]

DIM = 8
SEED = 20260825

FILLER = [
    "honestly i think this is",
    "not sure why but it feels",
    "my friend said the coach was",
    "the whole thread sounded",
    "today everything seemed",
    "that chapter was genuinely",
    "after the workout i felt",
    "people keep being",
]

# substring traps and punctuation edges; none of these add lexicon tokens
TRAPS = [
    "the unkindness of strangers",
    "a well-known author",
    "don't be a stranger",
    "she said 'brilliant' twice",
    "it was UNREMARKABLE overall",
]


def centers() -> np.ndarray:
    out = np.zeros((len(BLOBS), DIM))
    for b in range(len(BLOBS)):
        out[b, b] = 10.0
        out[b, (b + 3) % DIM] = -4.0
    return out


def fmt(vec: np.ndarray) -> str:
    return " ".join(repr(float(v)) for v in vec)


def write_vectors(rng: np.random.Generator) -> None:
    cs = centers()
    lines = ["# desk fixture: 30 adjectives, 6 planted blobs, dim 8"]
    for b, words in enumerate(BLOBS):
        for word in words:
            vec = cs[b] + rng.normal(0.0, 0.3, DIM)
            lines.append(f"{word}\t{fmt(vec)}")
    (OUT / "vectors.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_item_vectors(rng: np.random.Generator) -> None:
    cs = centers()
    lines = ["# desk fixture: questionnaire item embeddings, dim 8"]
    for text, _, blob in IPIP_ITEMS:
        vec = cs[blob] + rng.normal(0.0, 0.4, DIM)
        lines.append(f"{text.lower()}\t{fmt(vec)}")
    (OUT / "item_vectors.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_lexicon() -> None:
    lines = ["# desk fixture lexicon: 30 adjectives"]
    for words in BLOBS:
        lines.extend(words)
    (OUT / "adjectives.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_markers() -> None:
    lines = ["# desk fixture trait markers, two per trait"]
    for trait, words in MARKERS.items():
        lines.append(f"{trait}: {', '.join(words)}")
    (OUT / "markers.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_ipip() -> None:
    lines = ["text,trait,facet"]
    for text, trait, _ in IPIP_ITEMS:
        lines.append(f"{text},{trait},")
    (OUT / "ipip_items.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_comments(rng: np.random.Generator) -> None:
    # community -> (comment count, blob weights)
    plans = {
        "books": (70, [0.05, 0.15, 0.55, 0.05, 0.15, 0.05]),
        "fitness": (80, [0.05, 0.10, 0.05, 0.05, 0.30, 0.45]),
        "rant": (50, [0.40, 0.05, 0.05, 0.40, 0.05, 0.05]),
    }
    usable = [[w for w in words if w not in NEVER_MENTIONED] for words in BLOBS]
    records = []
    serial = 0
    for community, (n, weights) in plans.items():
        for _ in range(n):
            serial += 1
            filler = FILLER[int(rng.integers(len(FILLER)))]
            n_adj = int(rng.integers(1, 4))
            words = []
            for _ in range(n_adj):
                blob = int(rng.choice(len(BLOBS), p=weights))
                words.append(usable[blob][int(rng.integers(len(usable[blob])))])
            body = f"{filler} {' and '.join(words)}."
            if rng.random() < 0.2:
                body += " " + TRAPS[int(rng.integers(len(TRAPS)))]
            if rng.random() < 0.1:
                body = body.upper()
            records.append({"id": f"c{serial:04d}", "subreddit": community, "body": body})
    payload = "\n".join(json.dumps(r, ensure_ascii=False) for r in records) + "\n"
    (OUT / "comments.ndjson").write_text(payload, encoding="utf-8")


def write_conf() -> None:
    lines = [
        "# desk-scale pipeline configuration",
        "lexicon = adjectives.txt",
        "vectors = vectors.txt",
        "corpus = comments.ndjson",
        "ipip = ipip_items.csv",
        "item_vectors = item_vectors.txt",
        "markers = markers.txt",
        "out = desk-out",
        "seed = 7",
        "k = 6",
        "ipip_k = 5",
        "cap = 1000000",
        "top = 3",
        "plot_data = true",
    ]
    (OUT / "desk.conf").write_text("\n".join(lines) + "\n", encoding="utf-8")


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.Generator(np.random.PCG64(SEED))
    write_lexicon()
    write_vectors(rng)
    write_item_vectors(rng)
    write_markers()
    write_ipip()
    write_comments(rng)
    write_conf()
    print(f"fixture written to {OUT}")


if __name__ == "__main__":
    main()
