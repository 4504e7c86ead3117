"""Batch face-image embedding into a BEMB store.

Runs a serialized TorchScript embedding network (any model taking
N x 3 x S x S float batches and returning N x D vectors) over every
image in a directory and writes one BEMB record per file, keyed by the
file's stem.  Embeddings are L2-normalized at write time so cosine
similarity downstream reduces to a dot product; the matcher name carries
a ``+l2`` suffix to record that.

Face detection/alignment is NOT performed: inputs must be pre-cropped.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from PIL import Image

BEMB_MAGIC = b"BEMB"
BEMB_VERSION = 1
BATCH_SIZE = 32

# ArcFace-style input normalization: RGB, (x - 127.5) / 128
_NORM_OFFSET = 127.5
_NORM_SCALE = 128.0


class EmbedError(Exception):
    """Job-level failure (bad directory, bad model, duplicate stems)."""


@dataclass(frozen=True)
class EmbedJob:
    image_dir: str | Path
    model_path: str | Path
    matcher_name: str
    output_path: str | Path
    input_size: int = 112


@dataclass
class EmbedResult:
    count: int
    dimension: int
    failures: list[tuple[str, str]] = field(default_factory=list)


def list_images(image_dir: Path) -> list[Path]:
    files = sorted(p for p in image_dir.iterdir() if p.is_file())
    if not files:
        raise EmbedError(f"{image_dir}: no files to embed")
    stems: dict[str, Path] = {}
    for path in files:
        other = stems.setdefault(path.stem, path)
        if other != path:
            raise EmbedError(f"duplicate file stem {path.stem!r}: {other.name} vs {path.name}")
    return files


def preprocess(path: Path, input_size: int) -> np.ndarray:
    """Decode, resize to the model's square input, normalize, return CHW float32."""
    with Image.open(path) as im:
        rgb = im.convert("RGB").resize((input_size, input_size), Image.BILINEAR)
    arr = (np.asarray(rgb, dtype=np.float32) - _NORM_OFFSET) / _NORM_SCALE
    return np.transpose(arr, (2, 0, 1))


def embed_directory(job: EmbedJob) -> EmbedResult:
    """Embed every image in the job's directory and write the BEMB store.

    Per-image decode failures are collected and skipped; the store is
    still written for the images that succeeded.  Callers treat a
    nonempty failure list as a nonzero-exit condition.
    """
    image_dir = Path(job.image_dir)
    files = list_images(image_dir)

    try:
        model = torch.jit.load(str(job.model_path), map_location="cpu")
    except (RuntimeError, ValueError) as exc:
        raise EmbedError(f"cannot load model {job.model_path}: {exc}") from exc
    model.eval()

    failures: list[tuple[str, str]] = []
    names: list[str] = []
    tensors: list[np.ndarray] = []
    for path in files:
        try:
            tensors.append(preprocess(path, job.input_size))
            names.append(path.stem)
        except (OSError, ValueError) as exc:
            failures.append((path.name, f"{type(exc).__name__}: {exc}"))

    if not tensors:
        raise EmbedError(f"{image_dir}: every image failed to decode")

    vectors: list[np.ndarray] = []
    with torch.no_grad():
        for start in range(0, len(tensors), BATCH_SIZE):
            batch = torch.from_numpy(np.stack(tensors[start : start + BATCH_SIZE]))
            out = model(batch)
            if out.ndim != 2 or out.shape[0] != batch.shape[0]:
                raise EmbedError(
                    f"model returned shape {tuple(out.shape)}, expected (N, D)"
                )
            vectors.append(out.numpy().astype(np.float64))
    matrix = np.concatenate(vectors, axis=0)
    dimension = matrix.shape[1]

    kept_names: list[str] = []
    kept_rows: list[np.ndarray] = []
    for name, row in zip(names, matrix):
        norm = float(np.linalg.norm(row))
        if norm == 0.0:
            failures.append((name, "zero embedding vector"))
            continue
        kept_names.append(name)
        kept_rows.append(row / norm)

    if not kept_rows:
        raise EmbedError("no usable embeddings produced")

    matcher_name = job.matcher_name
    if not matcher_name.endswith("+l2"):
        matcher_name += "+l2"
    write_bemb(Path(job.output_path), matcher_name, dimension, kept_names, kept_rows)
    return EmbedResult(count=len(kept_rows), dimension=dimension, failures=failures)


def write_bemb(
    path: Path, matcher_name: str, dimension: int, names: list[str], rows: list[np.ndarray]
) -> None:
    """Serialize records in the BEMB grammar (little-endian, float32, no padding)."""
    name_bytes = matcher_name.encode("utf-8")
    parts = [
        BEMB_MAGIC,
        struct.pack("<H", BEMB_VERSION),
        struct.pack("<H", len(name_bytes)),
        name_bytes,
        struct.pack("<II", dimension, len(names)),
    ]
    for name, row in zip(names, rows):
        raw = name.encode("utf-8")
        parts.append(struct.pack("<H", len(raw)))
        parts.append(raw)
        parts.append(np.asarray(row, dtype="<f4").tobytes())
    path.write_bytes(b"".join(parts))
