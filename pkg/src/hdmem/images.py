"""Binary images as states: IDX ingestion, PGM output, demo glyphs."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import FileFormatError, State

__all__ = [
    "BitImage",
    "demo_glyphs",
    "ingest_idx_images",
    "write_idx_images",
    "write_pgm",
]

# IDX magic for unsigned-byte rank-3 data (count, rows, cols)
_IDX_MAGIC_U8_3D = 0x00000803


@dataclass(frozen=True)
class BitImage:
    """A binarized image: row-major 0/1 pixels plus its shape."""

    width: int
    height: int
    bits: np.ndarray

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"bad image shape {self.width}x{self.height}")
        if self.bits.shape != (self.height * self.width,):
            raise ValueError(
                f"expected {self.height * self.width} pixels, got {self.bits.shape}"
            )
        if self.bits.dtype != np.uint8 or np.any(self.bits > 1):
            raise ValueError("pixels must be uint8 values 0 or 1")

    def to_state(self) -> State:
        return State.from_bits(self.bits)

    @classmethod
    def from_state(cls, state: State, width: int, height: int) -> "BitImage":
        if width * height != state.dimension:
            raise ValueError(
                f"dimension mismatch: {width * height} vs {state.dimension}"
            )
        return cls(width, height, state.to_bits())

    def as_grid(self) -> np.ndarray:
        return self.bits.reshape(self.height, self.width)


def ingest_idx_images(path, threshold: int = 128, count: int | None = None) -> list[BitImage]:
    """Read an IDX unsigned-byte image file and binarize the pixels.

    A pixel becomes 1 when its value is >= threshold. ``count`` limits
    how many leading images are read; default all. Format violations
    raise FileFormatError naming the byte offset; missing or unreadable
    files raise OSError as usual.
    """
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold must be in [0, 255], got {threshold}")
    raw = Path(path).read_bytes()
    if len(raw) < 16:
        raise FileFormatError(
            f"{path}: truncated IDX header, {len(raw)} bytes (need 16)"
        )
    magic, n, rows, cols = struct.unpack(">IIII", raw[:16])
    if magic != _IDX_MAGIC_U8_3D:
        raise FileFormatError(
            f"{path}: bad magic 0x{magic:08x} at offset 0, expected 0x{_IDX_MAGIC_U8_3D:08x}"
        )
    if rows == 0 or cols == 0:
        raise FileFormatError(f"{path}: zero image shape {rows}x{cols} in header")
    if count is None:
        count = n
    if count > n:
        raise FileFormatError(f"{path}: requested {count} images, file holds {n}")
    need = 16 + n * rows * cols
    if len(raw) < need:
        raise FileFormatError(
            f"{path}: truncated at byte {len(raw)}, header implies {need}"
        )
    pixels = np.frombuffer(raw, dtype=np.uint8, count=count * rows * cols, offset=16)
    pixels = pixels.reshape(count, rows * cols)
    return [
        BitImage(int(cols), int(rows), (row >= threshold).astype(np.uint8))
        for row in pixels
    ]


def write_idx_images(path, images: list[BitImage]) -> None:
    """Write bit images as an IDX unsigned-byte file (1 -> 255, 0 -> 0)."""
    if not images:
        raise ValueError("images must be non-empty")
    w, h = images[0].width, images[0].height
    for img in images:
        if (img.width, img.height) != (w, h):
            raise ValueError("all images must share one shape")
    with open(path, "wb") as fh:
        fh.write(struct.pack(">IIII", _IDX_MAGIC_U8_3D, len(images), h, w))
        for img in images:
            fh.write((img.bits * np.uint8(255)).tobytes())


def write_pgm(image: BitImage, path) -> None:
    """Write a bit image as a binary PGM (P5), 1 -> 255."""
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write((image.bits * np.uint8(255)).tobytes())


def _rect(grid: np.ndarray, r0: int, r1: int, c0: int, c1: int) -> None:
    grid[r0:r1, c0:c1] = 1


def _glyph_nine(grid: np.ndarray, r: int, c: int) -> None:
    # 8x8 ring with a tail down the right side
    _rect(grid, r, r + 2, c, c + 8)
    _rect(grid, r + 6, r + 8, c, c + 8)
    _rect(grid, r, r + 8, c, c + 2)
    _rect(grid, r, r + 14, c + 6, c + 8)


def _glyph_four(grid: np.ndarray, r: int, c: int) -> None:
    # left stroke, crossbar, long right stroke
    _rect(grid, r, r + 8, c, c + 2)
    _rect(grid, r + 6, r + 8, c, c + 8)
    _rect(grid, r, r + 14, c + 5, c + 7)


def demo_glyphs(count: int = 6, side: int = 28) -> list[BitImage]:
    """Deterministic demo sequence of digit-like glyphs.

    The first half are 9-like, the second half 4-like, each placed at
    its own offset so that all pairs are clearly distinct as states.
    Up to 6 glyphs on a side x side canvas (side >= 28).
    """
    if not 1 <= count <= 6:
        raise ValueError(f"count must be in [1, 6], got {count}")
    if side < 28:
        raise ValueError(f"side must be at least 28, got {side}")
    placements = [
        (_glyph_nine, 1, 2),
        (_glyph_nine, 1, 15),
        (_glyph_nine, 13, 2),
        (_glyph_four, 13, 15),
        (_glyph_four, 7, 9),
        (_glyph_four, 1, 9),
    ]
    images = []
    for draw, r, c in placements[:count]:
        grid = np.zeros((side, side), dtype=np.uint8)
        draw(grid, r, c)
        images.append(BitImage(side, side, grid.reshape(-1)))
    return images
