"""Embedding vector sets: loading, validation, z-scoring and similarity math.

File formats (auto-detected on load):

* Text — one record per line, ``id<TAB>c1 c2 ... cD``, ``#`` lines ignored.
* Binary — magic ``EMBV`` + version byte ``0x01``, little-endian u32 count and
  dim, then per record a u16 id byte-length, the UTF-8 id, and dim float32s.

Ids are lowercased and NFC-normalised at load so joins against the lexicon
and corpus tokens never miss on case or Unicode form.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .textnorm import normalize_key

_MAGIC = b"EMBV"
_VERSION = 1
_CONSTANT_STD = 1e-12


class VectorLoadError(ValueError):
    """A vector file failed validation."""


class DimensionMismatchError(VectorLoadError):
    pass


class DuplicateIdError(VectorLoadError):
    pass


class NonFiniteValueError(VectorLoadError):
    pass


class EmptyFileError(VectorLoadError):
    pass


class ZeroVectorError(ValueError):
    """Cosine similarity is undefined for a zero-norm vector."""


@dataclass(frozen=True)
class VectorSet:
    """Immutable id -> embedding table; iteration order is file order."""

    ids: tuple[str, ...]
    vectors: np.ndarray  # (n, dim) float64, read-only
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.vectors.flags.writeable = False
        object.__setattr__(self, "_index", {w: i for i, w in enumerate(self.ids)})

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, key: str) -> bool:
        return key in self._index

    def get(self, key: str) -> np.ndarray | None:
        i = self._index.get(key)
        return None if i is None else self.vectors[i]

    def subset(self, keys: Iterable[str]) -> "VectorSet":
        """Restriction to ``keys``, preserving this set's record order."""
        wanted = set(keys)
        missing = wanted - self._index.keys()
        if missing:
            shown = ", ".join(sorted(missing)[:5])
            raise KeyError(f"{len(missing)} ids not in vector set (e.g. {shown})")
        idx = [i for i, w in enumerate(self.ids) if w in wanted]
        return VectorSet(
            ids=tuple(self.ids[i] for i in idx),
            vectors=self.vectors[idx].copy(),
        )


def _build(records: list[tuple[str, np.ndarray]], source: str) -> VectorSet:
    if not records:
        raise EmptyFileError(f"{source}: no vector records")
    dim = len(records[0][1])
    seen: set[str] = set()
    for lineno, (rid, vec) in enumerate(records, start=1):
        if len(vec) != dim:
            raise DimensionMismatchError(
                f"{source}: record {lineno} ({rid!r}) has dim {len(vec)}, expected {dim}"
            )
        if rid in seen:
            raise DuplicateIdError(f"{source}: duplicate id {rid!r}")
        seen.add(rid)
        if not np.all(np.isfinite(vec)):
            raise NonFiniteValueError(f"{source}: non-finite value in record {rid!r}")
    matrix = np.vstack([vec for _, vec in records]).astype(np.float64)
    return VectorSet(ids=tuple(rid for rid, _ in records), vectors=matrix)


def _load_text(path: Path) -> VectorSet:
    records: list[tuple[str, np.ndarray]] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            rid, sep, coords = line.partition("\t")
            if not sep:
                raise VectorLoadError(f"{path}: line {lineno}: missing tab separator")
            try:
                vec = np.array([float(tok) for tok in coords.split()], dtype=np.float64)
            except ValueError as exc:
                raise VectorLoadError(f"{path}: line {lineno}: {exc}") from None
            if vec.size == 0:
                raise VectorLoadError(f"{path}: line {lineno}: record has no coordinates")
            records.append((normalize_key(rid), vec))
    return _build(records, str(path))


def _load_binary(path: Path) -> VectorSet:
    data = path.read_bytes()
    if data[:4] != _MAGIC or data[4] != _VERSION:
        raise VectorLoadError(f"{path}: bad magic/version header")
    count, dim = struct.unpack_from("<II", data, 5)
    off = 13
    records: list[tuple[str, np.ndarray]] = []
    for _ in range(count):
        (idlen,) = struct.unpack_from("<H", data, off)
        off += 2
        rid = data[off : off + idlen].decode("utf-8")
        off += idlen
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=off).astype(np.float64)
        off += 4 * dim
        records.append((normalize_key(rid), vec))
    if off != len(data):
        raise VectorLoadError(f"{path}: {len(data) - off} trailing bytes")
    return _build(records, str(path))


def load_vectors(path: str | Path) -> VectorSet:
    """Load a vector file, auto-detecting text vs binary format."""
    path = Path(path)
    with path.open("rb") as fh:
        head = fh.read(5)
    if head[:4] == _MAGIC:
        return _load_binary(path)
    return _load_text(path)


def save_vectors(vs: VectorSet, path: str | Path, fmt: str = "text") -> None:
    """Write a vector file; binary round-trips bit-exactly, text via repr."""
    path = Path(path)
    if fmt == "text":
        with path.open("w", encoding="utf-8") as fh:
            for rid, vec in zip(vs.ids, vs.vectors):
                fh.write(rid + "\t" + " ".join(repr(float(c)) for c in vec) + "\n")
    elif fmt == "binary":
        parts = [_MAGIC, bytes([_VERSION]), struct.pack("<II", len(vs), vs.dim)]
        for rid, vec in zip(vs.ids, vs.vectors):
            raw = rid.encode("utf-8")
            parts.append(struct.pack("<H", len(raw)))
            parts.append(raw)
            parts.append(vec.astype("<f4").tobytes())
        path.write_bytes(b"".join(parts))
    else:
        raise ValueError(f"unknown vector format {fmt!r}")


@dataclass(frozen=True)
class ScaledSet:
    """Z-scored view of a :class:`VectorSet` (population standard deviation).

    Dimensions with std below 1e-12 are flagged constant and mapped to 0 so
    downstream distances stay finite.
    """

    source: VectorSet
    mean: np.ndarray
    std: np.ndarray
    scaled: np.ndarray
    constant_dims: tuple[int, ...]

    def transform(self, vec: np.ndarray) -> np.ndarray:
        """Map an original-space vector into this set's standardized space."""
        out = (np.asarray(vec, dtype=np.float64) - self.mean) / np.where(
            self.std < _CONSTANT_STD, 1.0, self.std
        )
        if self.constant_dims:
            out[list(self.constant_dims)] = 0.0
        return out

    def inverse_transform(self, vec: np.ndarray) -> np.ndarray:
        """Map a standardized-space vector back to original space."""
        out = np.asarray(vec, dtype=np.float64) * np.where(
            self.std < _CONSTANT_STD, 0.0, self.std
        ) + self.mean
        return out


def standardize(vs: VectorSet) -> ScaledSet:
    """Per-dimension z-scoring with divisor-N standard deviation."""
    if len(vs) == 0:
        raise ValueError("cannot standardize an empty vector set")
    mean = vs.vectors.mean(axis=0)
    std = vs.vectors.std(axis=0)  # population (ddof=0)
    constant = np.flatnonzero(std < _CONSTANT_STD)
    safe_std = np.where(std < _CONSTANT_STD, 1.0, std)
    scaled = (vs.vectors - mean) / safe_std
    if constant.size:
        scaled[:, constant] = 0.0
    scaled.flags.writeable = False
    return ScaledSet(
        source=vs,
        mean=mean,
        std=std,
        scaled=scaled,
        constant_dims=tuple(int(i) for i in constant),
    )


def cosine(u: Sequence[float] | np.ndarray, v: Sequence[float] | np.ndarray) -> float:
    """Cosine similarity, clamped into [-1, 1] against rounding.

    The denominator is ``sqrt(|u|^2 * |v|^2)`` rather than ``|u| * |v|``:
    with correctly rounded arithmetic that makes cosine(v, v) exactly 1.0,
    so a lossless round-trip really scores 1.0.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    nu2 = float(u @ u)
    nv2 = float(v @ v)
    if nu2 == 0.0 or nv2 == 0.0:
        raise ZeroVectorError("cosine undefined for zero-norm vector")
    denom = math.sqrt(nu2 * nv2)
    if denom == 0.0 or math.isinf(denom):
        # the squared-norm product under/overflowed; trade exactness for range
        denom = math.sqrt(nu2) * math.sqrt(nv2)
    return min(1.0, max(-1.0, float(u @ v) / denom))


def cosine_to_many(query: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """Cosine of ``query`` against every row of ``matrix``, clamped to [-1, 1].

    Uses the same ``sqrt(|u|^2 * |v|^2)`` denominator as :func:`cosine`, so a
    row identical to the query scores exactly 1.0.
    """
    query = np.asarray(query, dtype=np.float64)
    nq2 = float(query @ query)
    if nq2 == 0.0:
        raise ZeroVectorError("cosine undefined for zero-norm vector")
    norms2 = np.einsum("ij,ij->i", matrix, matrix)
    if np.any(norms2 == 0.0):
        raise ZeroVectorError("cosine undefined: zero-norm row in matrix")
    denom = np.sqrt(norms2 * nq2)
    bad = (denom == 0.0) | np.isinf(denom)
    if np.any(bad):  # squared-norm product under/overflowed for some rows
        denom = np.where(bad, np.sqrt(norms2) * math.sqrt(nq2), denom)
    return np.clip((matrix @ query) / denom, -1.0, 1.0)


def centroid(vectors: Sequence[np.ndarray] | np.ndarray) -> np.ndarray:
    """Element-wise arithmetic mean of a non-empty list of equal-length vectors."""
    arr = np.asarray(vectors, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("centroid needs a non-empty list of equal-length vectors")
    return arr.mean(axis=0)
