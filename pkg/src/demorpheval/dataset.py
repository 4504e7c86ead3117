"""Ingestion and validation: JSON-lines evaluation manifests, the BEMB
binary embedding store, gallery assembly, and the train/test identity
scenario classifier.

BEMB layout (all integers little-endian, no padding):
    magic  b"BEMB" | version u16 = 1 | name-length u16 + UTF-8 name
    | dimension u32 | count u32
    | count records of: id-length u16 + UTF-8 id + dimension float32
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .biometric import Embedding
from .errors import (
    BadMagicError,
    DimensionMismatchError,
    DuplicateIdError,
    DuplicateMorphIdError,
    EmptyRecordSetError,
    EmptySetError,
    FormatError,
    InvalidRecordError,
    MalformedLineError,
    MissingEmbeddingError,
    MissingFieldError,
    TruncatedFileError,
)

_MAGIC = b"BEMB"
_VERSION = 1

_RECORD_FIELDS = (
    "morph_id",
    "morph_path",
    "gt1_id",
    "gt2_id",
    "gt1_path",
    "gt2_path",
    "out1_path",
    "out2_path",
)


@dataclass(frozen=True)
class MorphRecord:
    """One evaluation unit: morph, both ground truths, both demorpher outputs."""

    morph_id: str
    morph_path: str
    gt1_id: str
    gt2_id: str
    gt1_path: str
    gt2_path: str
    out1_path: str
    out2_path: str

    def __post_init__(self):
        if self.gt1_id == self.gt2_id:
            raise InvalidRecordError(
                f"record {self.morph_id!r}: gt1_id and gt2_id must differ"
            )
        # output paths may coincide (trivial demorpher); everything else is distinct
        paths = [self.morph_path, self.gt1_path, self.gt2_path]
        outs = {self.out1_path, self.out2_path}
        if len(set(paths)) != 3 or outs & set(paths):
            raise InvalidRecordError(
                f"record {self.morph_id!r}: morph/ground-truth/output paths must be distinct"
            )


def parse_manifest(path: str | Path) -> list[MorphRecord]:
    """Read a JSON-lines manifest; order-preserving, duplicate morph_ids rejected."""
    records: list[MorphRecord] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLineError(lineno, f"invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise MalformedLineError(lineno, "line is not a JSON object")
            for name in _RECORD_FIELDS:
                if name not in obj:
                    raise MissingFieldError(lineno, name)
            extra = set(obj) - set(_RECORD_FIELDS)
            if extra:
                raise MalformedLineError(lineno, f"unexpected fields {sorted(extra)}")
            if not all(isinstance(obj[name], str) and obj[name] for name in _RECORD_FIELDS):
                raise MalformedLineError(lineno, "all fields must be nonempty strings")
            if obj["morph_id"] in seen:
                raise DuplicateMorphIdError(obj["morph_id"])
            seen.add(obj["morph_id"])
            records.append(MorphRecord(**obj))
    return records


def write_manifest(records: list[MorphRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps({f: getattr(rec, f) for f in _RECORD_FIELDS}) + "\n")


@dataclass
class EmbeddingStore:
    """Immutable-after-load id -> Embedding map with a uniform dimension."""

    matcher_name: str
    dimension: int
    entries: dict[str, Embedding] = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension < 1:
            raise DimensionMismatchError("store dimension must be positive")
        for key, emb in self.entries.items():
            if emb.vector.size != self.dimension:
                raise DimensionMismatchError(
                    f"embedding {key!r} has dimension {emb.vector.size}, "
                    f"store declares {self.dimension}"
                )

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, embedding_id: str) -> bool:
        return embedding_id in self.entries

    def get(self, embedding_id: str) -> Embedding:
        try:
            return self.entries[embedding_id]
        except KeyError:
            raise MissingEmbeddingError(embedding_id) from None

    def add(self, emb: Embedding) -> None:
        if emb.id in self.entries:
            raise DuplicateIdError(f"embedding id {emb.id!r} already present")
        if emb.vector.size != self.dimension:
            raise DimensionMismatchError(
                f"embedding {emb.id!r} has dimension {emb.vector.size}, "
                f"store declares {self.dimension}"
            )
        self.entries[emb.id] = emb


def load_embedding_store(path: str | Path) -> EmbeddingStore:
    """Parse a BEMB file, validating magic, version, count, and dimensions."""
    data = Path(path).read_bytes()
    view = memoryview(data)
    pos = 0

    def take(n: int, what: str) -> memoryview:
        nonlocal pos
        if pos + n > len(data):
            raise TruncatedFileError(f"{path}: truncated while reading {what}")
        chunk = view[pos : pos + n]
        pos += n
        return chunk

    if bytes(take(4, "magic")) != _MAGIC:
        raise BadMagicError(f"{path}: missing BEMB magic")
    (version,) = struct.unpack("<H", take(2, "version"))
    if version != _VERSION:
        raise BadMagicError(f"{path}: unsupported BEMB version {version}")
    (name_len,) = struct.unpack("<H", take(2, "name length"))
    matcher_name = bytes(take(name_len, "matcher name")).decode("utf-8")
    dimension, count = struct.unpack("<II", take(8, "dimension/count"))
    if dimension == 0:
        raise DimensionMismatchError(f"{path}: declared dimension is 0")

    store = EmbeddingStore(matcher_name=matcher_name, dimension=dimension)
    vec_bytes = 4 * dimension
    for i in range(count):
        (id_len,) = struct.unpack("<H", take(2, f"record {i} id length"))
        emb_id = bytes(take(id_len, f"record {i} id")).decode("utf-8")
        raw = take(vec_bytes, f"record {i} vector")
        vector = np.frombuffer(raw, dtype="<f4").astype(np.float64)
        store.add(Embedding(id=emb_id, vector=vector))
    if pos != len(data):
        raise FormatError(f"{path}: {len(data) - pos} trailing bytes after {count} records")
    return store


def write_embedding_store(store: EmbeddingStore, path: str | Path) -> None:
    """Serialize a store as BEMB; vectors are stored as little-endian float32."""
    name = store.matcher_name.encode("utf-8")
    parts = [
        _MAGIC,
        struct.pack("<H", _VERSION),
        struct.pack("<H", len(name)),
        name,
        struct.pack("<II", store.dimension, len(store.entries)),
    ]
    for emb_id, emb in store.entries.items():
        raw_id = emb_id.encode("utf-8")
        parts.append(struct.pack("<H", len(raw_id)))
        parts.append(raw_id)
        parts.append(emb.vector.astype("<f4").tobytes())
    Path(path).write_bytes(b"".join(parts))


@dataclass(frozen=True)
class ScenarioSplit:
    """Identity pools used to build the train and test morphs."""

    train_identities: frozenset[str]
    test_identities: frozenset[str]

    def __post_init__(self):
        if not self.train_identities or not self.test_identities:
            raise EmptySetError("train and test identity sets must be nonempty")


def classify_scenario(split: ScenarioSplit) -> str:
    """Map a split to its identity-overlap regime.

    scenario1: test identities all seen in training; scenario3: fully
    disjoint pools; scenario2: partial overlap.
    """
    train, test = split.train_identities, split.test_identities
    if test <= train:
        return "scenario1"
    if not test & train:
        return "scenario3"
    return "scenario2"


def gallery_ids(records: list[MorphRecord]) -> set[str]:
    """All constituent ground-truth ids across the manifest (the bonafide gallery)."""
    if not records:
        raise EmptyRecordSetError("gallery requires at least one record")
    ids: set[str] = set()
    for rec in records:
        ids.add(rec.gt1_id)
        ids.add(rec.gt2_id)
    return ids


def read_id_list(path: str | Path) -> frozenset[str]:
    """One identity per line; blank lines ignored."""
    with open(path, "r", encoding="utf-8") as fh:
        return frozenset(line.strip() for line in fh if line.strip())
