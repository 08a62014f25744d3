"""Bit images, IDX ingestion, PGM output, demo glyphs."""

import struct

import numpy as np
import pytest

from hdmem import FileFormatError, distance, mean_activity
from hdmem.images import (
    BitImage,
    demo_glyphs,
    ingest_idx_images,
    write_idx_images,
    write_pgm,
)

IDX_MAGIC = 0x00000803


def checker(width, height):
    bits = np.indices((height, width)).sum(axis=0) % 2
    return BitImage(width, height, bits.reshape(-1).astype(np.uint8))


class TestBitImage:
    def test_state_round_trip(self):
        img = checker(5, 3)
        back = BitImage.from_state(img.to_state(), 5, 3)
        assert np.array_equal(back.bits, img.bits)
        assert (back.width, back.height) == (5, 3)

    def test_as_grid_shape_and_content(self):
        img = checker(4, 2)
        grid = img.as_grid()
        assert grid.shape == (2, 4)
        assert grid[0, 0] == 0 and grid[0, 1] == 1
        assert np.array_equal(grid.reshape(-1), img.bits)

    def test_from_state_dimension_mismatch(self):
        img = checker(4, 2)
        with pytest.raises(ValueError, match="dimension mismatch"):
            BitImage.from_state(img.to_state(), 3, 2)

    @pytest.mark.parametrize(
        "width,height,bits",
        [
            (0, 2, np.zeros(0, dtype=np.uint8)),
            (2, -1, np.zeros(0, dtype=np.uint8)),
            (2, 2, np.zeros(3, dtype=np.uint8)),
            (2, 2, np.zeros(4, dtype=np.int64)),
            (2, 2, np.full(4, 2, dtype=np.uint8)),
        ],
    )
    def test_rejects_bad_construction(self, width, height, bits):
        with pytest.raises(ValueError):
            BitImage(width, height, bits)


class TestIdxRoundTrip:
    def test_write_then_ingest(self, tmp_path):
        images = [checker(6, 4), BitImage(6, 4, np.ones(24, dtype=np.uint8))]
        path = tmp_path / "pair.idx"
        write_idx_images(path, images)
        back = ingest_idx_images(path)
        assert len(back) == 2
        for a, b in zip(images, back):
            assert (a.width, a.height) == (b.width, b.height)
            assert np.array_equal(a.bits, b.bits)

    def test_file_layout(self, tmp_path):
        path = tmp_path / "one.idx"
        write_idx_images(path, [checker(3, 2)])
        raw = path.read_bytes()
        assert struct.unpack(">IIII", raw[:16]) == (IDX_MAGIC, 1, 2, 3)
        assert raw[16:] == bytes([0, 255, 0, 255, 0, 255])

    def test_count_limits_ingestion(self, tmp_path):
        path = tmp_path / "six.idx"
        write_idx_images(path, demo_glyphs(6))
        assert len(ingest_idx_images(path, count=2)) == 2

    def test_write_rejects_mixed_shapes(self, tmp_path):
        with pytest.raises(ValueError, match="one shape"):
            write_idx_images(tmp_path / "bad.idx", [checker(3, 2), checker(2, 3)])
        with pytest.raises(ValueError, match="non-empty"):
            write_idx_images(tmp_path / "bad.idx", [])


class TestIdxFormatErrors:
    def test_truncated_header(self, tmp_path):
        path = tmp_path / "short.idx"
        path.write_bytes(b"\x00" * 10)
        with pytest.raises(FileFormatError, match="truncated IDX header"):
            ingest_idx_images(path)

    def test_bad_magic_names_offset(self, tmp_path):
        path = tmp_path / "magic.idx"
        path.write_bytes(struct.pack(">IIII", 0x12345678, 1, 1, 1) + b"\x00")
        with pytest.raises(FileFormatError, match="0x12345678 at offset 0"):
            ingest_idx_images(path)

    def test_zero_shape(self, tmp_path):
        path = tmp_path / "flat.idx"
        path.write_bytes(struct.pack(">IIII", IDX_MAGIC, 1, 0, 5))
        with pytest.raises(FileFormatError, match="zero image shape"):
            ingest_idx_images(path)

    def test_count_beyond_file(self, tmp_path):
        path = tmp_path / "two.idx"
        write_idx_images(path, demo_glyphs(2))
        with pytest.raises(FileFormatError, match="requested 3 images, file holds 2"):
            ingest_idx_images(path, count=3)

    def test_truncated_pixels(self, tmp_path):
        path = tmp_path / "cut.idx"
        write_idx_images(path, demo_glyphs(2))
        raw = path.read_bytes()
        path.write_bytes(raw[:-5])
        with pytest.raises(
            FileFormatError, match=f"truncated at byte {len(raw) - 5}"
        ):
            ingest_idx_images(path)

    def test_missing_file_is_oserror(self, tmp_path):
        with pytest.raises(OSError):
            ingest_idx_images(tmp_path / "absent.idx")


class TestThreshold:
    def test_pixel_at_threshold_becomes_one(self, tmp_path):
        path = tmp_path / "gray.idx"
        payload = bytes([0, 99, 100, 101, 255, 7])
        path.write_bytes(struct.pack(">IIII", IDX_MAGIC, 1, 2, 3) + payload)
        img = ingest_idx_images(path, threshold=100)[0]
        assert img.bits.tolist() == [0, 0, 1, 1, 1, 0]

    def test_threshold_extremes(self, tmp_path):
        path = tmp_path / "gray.idx"
        payload = bytes([0, 128, 255, 1])
        path.write_bytes(struct.pack(">IIII", IDX_MAGIC, 1, 2, 2) + payload)
        assert ingest_idx_images(path, threshold=0)[0].bits.tolist() == [1, 1, 1, 1]
        assert ingest_idx_images(path, threshold=255)[0].bits.tolist() == [0, 0, 1, 0]

    def test_threshold_range(self, tmp_path):
        with pytest.raises(ValueError, match=r"\[0, 255\]"):
            ingest_idx_images(tmp_path / "x.idx", threshold=256)


class TestPgm:
    def test_header_and_payload(self, tmp_path):
        img = checker(3, 2)
        path = tmp_path / "img.pgm"
        write_pgm(img, path)
        raw = path.read_bytes()
        assert raw.startswith(b"P5\n3 2\n255\n")
        assert raw[len(b"P5\n3 2\n255\n"):] == bytes([0, 255, 0, 255, 0, 255])


class TestDemoGlyphs:
    def test_deterministic(self):
        a = demo_glyphs(6)
        b = demo_glyphs(6)
        assert all(np.array_equal(x.bits, y.bits) for x, y in zip(a, b))

    def test_shapes_and_count(self):
        glyphs = demo_glyphs(4, side=32)
        assert len(glyphs) == 4
        assert all((g.width, g.height) == (32, 32) for g in glyphs)
        assert len(demo_glyphs(1)) == 1

    def test_all_pairs_distinct_as_states(self):
        states = [g.to_state() for g in demo_glyphs(6)]
        for i in range(6):
            for j in range(i + 1, 6):
                assert distance(states[i], states[j]) >= 0.08

    def test_sparse_but_not_empty(self):
        # glyph ink covers a small, nonzero fraction of the canvas
        for g in demo_glyphs(6):
            q = mean_activity(g.to_state())
            assert 0.05 < q < 0.5

    def test_count_prefix_stability(self):
        two = demo_glyphs(2)
        six = demo_glyphs(6)
        assert all(np.array_equal(a.bits, b.bits) for a, b in zip(two, six))

    @pytest.mark.parametrize("count,side", [(0, 28), (7, 28), (3, 27)])
    def test_validation(self, count, side):
        with pytest.raises(ValueError):
            demo_glyphs(count, side=side)
