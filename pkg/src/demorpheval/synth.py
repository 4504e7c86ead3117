"""Self-contained synthetic data: the grid embedder, texture faces, and
benchmark generation.

The grid embedder (per-cell luma means over an 8x8 grid, unit-normalized)
reproduces the geometry the evaluation relies on without any ML runtime:
an alpha-blended morph's embedding sits between its constituents'
embeddings, so the morph matches both constituents more strongly than it
matches anyone else in the gallery.  Texture faces are per-identity
cell-brightness fields plus a high-frequency texture shared by every
image, standing in for the shared structure of face photos.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .biometric import Embedding
from .dataset import EmbeddingStore, MorphRecord, write_manifest
from .errors import ValidationError, ZeroVectorError
from .images import (
    ImageBuffer,
    alpha_blend_morph,
    load_image,
    quantize_intensities,
    save_png,
    to_luma,
)

GRID_EMBED_CELLS = 8
GRID_MATCHER_NAME = "grid8+l2"


def grid_embed(img: ImageBuffer, grid: int = GRID_EMBED_CELLS) -> np.ndarray:
    """Unit-normalized vector of per-cell luma means over a grid x grid tiling."""
    y = to_luma(img).pixels[:, :, 0].astype(np.float64)
    h, w = y.shape
    if h < grid or w < grid:
        raise ValidationError(f"image {w}x{h} too small for a {grid}x{grid} cell grid")
    ys = [(i * h) // grid for i in range(grid + 1)]
    xs = [(j * w) // grid for j in range(grid + 1)]
    cells = np.empty(grid * grid, dtype=np.float64)
    k = 0
    for i in range(grid):
        for j in range(grid):
            cells[k] = y[ys[i] : ys[i + 1], xs[j] : xs[j + 1]].mean()
            k += 1
    norm = np.linalg.norm(cells)
    if norm == 0.0:
        raise ZeroVectorError("all-black image has no grid embedding")
    return cells / norm


def make_embedding(img: ImageBuffer, embedding_id: str, grid: int = GRID_EMBED_CELLS) -> Embedding:
    return Embedding(id=embedding_id, vector=grid_embed(img, grid))


def build_grid_store(
    records: list[MorphRecord],
    matcher_name: str = GRID_MATCHER_NAME,
    grid: int = GRID_EMBED_CELLS,
) -> EmbeddingStore:
    """Grid-embed every image a manifest references.

    Keys follow the evaluation convention: morphs by morph_id, ground
    truths by their ids, outputs by file stem.
    """
    id_to_path: dict[str, str] = {}

    def claim(embedding_id: str, path: str) -> None:
        previous = id_to_path.setdefault(embedding_id, path)
        if previous != path:
            raise ValidationError(
                f"embedding id {embedding_id!r} maps to both {previous!r} and {path!r}"
            )

    for rec in records:
        claim(rec.morph_id, rec.morph_path)
        claim(rec.gt1_id, rec.gt1_path)
        claim(rec.gt2_id, rec.gt2_path)
        claim(Path(rec.out1_path).stem, rec.out1_path)
        claim(Path(rec.out2_path).stem, rec.out2_path)

    store = EmbeddingStore(matcher_name=matcher_name, dimension=grid * grid)
    for embedding_id in sorted(id_to_path):
        store.add(make_embedding(load_image(id_to_path[embedding_id]), embedding_id, grid))
    return store


def _bilinear_upsample(grid_vals: np.ndarray, size: int) -> np.ndarray:
    """Upsample a small square grid to size x size (cell centers, flat borders)."""
    g = grid_vals.shape[0]
    pos = (np.arange(size) + 0.5) * g / size - 0.5
    lo = np.clip(np.floor(pos).astype(int), 0, g - 1)
    hi = np.clip(lo + 1, 0, g - 1)
    frac = np.clip(pos - lo, 0.0, 1.0)
    rows = grid_vals[lo, :] * (1.0 - frac)[:, None] + grid_vals[hi, :] * frac[:, None]
    return rows[:, lo] * (1.0 - frac)[None, :] + rows[:, hi] * frac[None, :]


def _nearest_upsample(grid_vals: np.ndarray, size: int) -> np.ndarray:
    """Blocky upsampling: each pixel takes its cell's value exactly, so the
    grid embedder recovers the designed cell pattern with no smoothing."""
    g = grid_vals.shape[0]
    idx = (np.arange(size) * g) // size
    return grid_vals[np.ix_(idx, idx)]


def shared_texture(size: int, sigma: float, seed: int) -> np.ndarray:
    """Zero-mean high-frequency detail layer added to every synthetic face."""
    rng = np.random.default_rng(seed)
    return rng.normal(0.0, sigma, size=(size, size))


def texture_face(
    cell_values: np.ndarray,
    texture: np.ndarray,
    interp: str = "bilinear",
) -> ImageBuffer:
    """Identity image: brightness field from cell values plus shared texture."""
    size = texture.shape[0]
    vals = np.asarray(cell_values, dtype=np.float64)
    if interp == "bilinear":
        field = _bilinear_upsample(vals, size)
    elif interp == "nearest":
        field = _nearest_upsample(vals, size)
    else:
        raise ValidationError(f"unknown interpolation {interp!r}")
    return ImageBuffer(quantize_intensities(field + texture)[:, :, np.newaxis])


def bounded_agreement_patterns(
    rng: np.random.Generator,
    count: int,
    cells: int = GRID_EMBED_CELLS,
    agreement_bounds: tuple[int, int] = (26, 38),
    max_tries: int = 200_000,
) -> list[np.ndarray]:
    """Binary cell patterns whose pairwise agreement stays inside the bounds.

    Capping the agreement caps every cross-identity embedding cosine,
    which keeps every impostor score strictly below every genuine score on
    the synthetic benchmark (the trivial-solution degeneracy regime).
    """
    n_cells = cells * cells
    lo, hi = agreement_bounds
    patterns: list[np.ndarray] = []
    tries = 0
    while len(patterns) < count:
        tries += 1
        if tries > max_tries:
            raise ValidationError(
                f"could not sample {count} patterns with agreement in [{lo}, {hi}]"
            )
        cand = rng.integers(0, 2, n_cells)
        if all(lo <= int(np.sum(cand == p)) <= hi for p in patterns):
            patterns.append(cand)
    return patterns


def make_benchmark(
    out_dir: str | Path,
    n_identities: int = 40,
    n_morphs: int = 100,
    size: int = 128,
    alpha: float = 0.5,
    seed: int = 7,
    cells: int = GRID_EMBED_CELLS,
    texture_sigma: float = 10.0,
    brightness_levels: tuple[float, float] = (30.0, 225.0),
    brightness_jitter: float = 15.0,
) -> tuple[list[MorphRecord], Path]:
    """Generate texture-face identities and alpha-blend morphs on disk.

    Identities are bimodal cell-brightness patterns with bounded pairwise
    agreement (see ``bounded_agreement_patterns``), rendered blocky so the
    grid embedder reads the pattern back exactly.  Returns the manifest
    records (output paths are placeholders until a baseline or a real
    demorpher materializes them) and the manifest path.
    """
    max_pairs = n_identities * (n_identities - 1) // 2
    if n_morphs > max_pairs:
        raise ValidationError(f"{n_morphs} morphs need more than {max_pairs} identity pairs")
    out_dir = Path(out_dir)
    img_dir = out_dir / "images"
    img_dir.mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(seed)
    texture = shared_texture(size, texture_sigma, seed=seed + 1)
    low, high = brightness_levels

    identity_paths: list[str] = []
    identity_ids: list[str] = []
    patterns = bounded_agreement_patterns(rng, n_identities, cells)
    for n, pattern in enumerate(patterns):
        identity_id = f"id_{n:03d}"
        values = np.where(pattern.reshape(cells, cells) == 1, high, low)
        values = values + rng.uniform(-brightness_jitter, brightness_jitter, (cells, cells))
        img = texture_face(values, texture, interp="nearest")
        path = img_dir / f"{identity_id}.png"
        save_png(img, path)
        identity_ids.append(identity_id)
        identity_paths.append(str(path))

    pair_indices = rng.choice(max_pairs, size=n_morphs, replace=False)
    all_pairs = [(i, j) for i in range(n_identities) for j in range(i + 1, n_identities)]

    records: list[MorphRecord] = []
    for m, pair_idx in enumerate(pair_indices):
        i, j = all_pairs[pair_idx]
        morph_id = f"m_{m:03d}"
        morph = alpha_blend_morph(
            load_image(identity_paths[i]), load_image(identity_paths[j]), alpha
        )
        morph_path = img_dir / f"{morph_id}.png"
        save_png(morph, morph_path)
        records.append(
            MorphRecord(
                morph_id=morph_id,
                morph_path=str(morph_path),
                gt1_id=identity_ids[i],
                gt2_id=identity_ids[j],
                gt1_path=identity_paths[i],
                gt2_path=identity_paths[j],
                out1_path=str(out_dir / "pending" / f"{morph_id}__o1.png"),
                out2_path=str(out_dir / "pending" / f"{morph_id}__o2.png"),
            )
        )

    manifest_path = out_dir / "manifest.jsonl"
    write_manifest(records, manifest_path)
    return records, manifest_path


def make_sanity_subjects(
    seed: int,
    size: int = 128,
    cells: int = 4,
    levels: tuple[float, float] = (20.0, 235.0),
    texture_sigma: float = 25.0,
) -> tuple[ImageBuffer, ImageBuffer]:
    """Two distinct-identity faces sharing the same fine texture.

    The second subject uses the brightness-complement of the first one's
    cell pattern, so their grid embeddings are far apart while the shared
    texture keeps their local structure (and so their SSIM) moderately
    high -- the regime where plain IQA misleads.
    """
    rng = np.random.default_rng(seed)
    texture = shared_texture(size, texture_sigma, seed=seed + 1)
    pattern = rng.choice(levels, size=(cells, cells))
    subject = texture_face(pattern, texture)
    other = texture_face(255.0 - pattern, texture)
    return subject, other
