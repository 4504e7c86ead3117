import struct

import numpy as np
import pytest

from demorpheval.images import ImageBuffer


def random_image(rng: np.random.Generator, width: int, height: int, channels: int = 1) -> ImageBuffer:
    return ImageBuffer.from_array(
        rng.integers(0, 256, size=(height, width, channels)).astype(np.uint8)
    )


def constant_image(value: int, width: int = 32, height: int = 32, channels: int = 1) -> ImageBuffer:
    return ImageBuffer.from_array(np.full((height, width, channels), value, dtype=np.uint8))


def bmp_bytes(rgb_rows: list[list[tuple[int, int, int]]]) -> bytes:
    """Hand-assemble an uncompressed bottom-up 24-bit BMP from RGB rows
    (top row first, as displayed)."""
    height = len(rgb_rows)
    width = len(rgb_rows[0])
    row_size = (3 * width + 3) & ~3
    pixel_data = b""
    for row in reversed(rgb_rows):  # bottom-up storage
        line = b"".join(struct.pack("<BBB", b, g, r) for (r, g, b) in row)
        pixel_data += line + b"\x00" * (row_size - len(line))
    header_size = 14 + 40
    file_size = header_size + len(pixel_data)
    file_header = struct.pack("<2sIHHI", b"BM", file_size, 0, 0, header_size)
    dib = struct.pack("<IiiHHIIiiII", 40, width, height, 1, 24, 0, len(pixel_data), 2835, 2835, 0, 0)
    return file_header + dib + pixel_data


@pytest.fixture(scope="session")
def small_benchmark(tmp_path_factory):
    """A compact synthetic benchmark shared by harness/CLI tests."""
    from demorpheval.harness import materialize_baseline
    from demorpheval.synth import build_grid_store, make_benchmark

    root = tmp_path_factory.mktemp("bench")
    records, manifest_path = make_benchmark(root, n_identities=10, n_morphs=12, seed=3)
    trivial_records, trivial_manifest = materialize_baseline(records, "trivial", root / "trivial")
    oracle_records, oracle_manifest = materialize_baseline(records, "oracle", root / "oracle")
    return {
        "root": root,
        "records": records,
        "manifest": manifest_path,
        "trivial_records": trivial_records,
        "trivial_manifest": trivial_manifest,
        "trivial_store": build_grid_store(trivial_records),
        "oracle_records": oracle_records,
        "oracle_manifest": oracle_manifest,
        "oracle_store": build_grid_store(oracle_records),
    }
