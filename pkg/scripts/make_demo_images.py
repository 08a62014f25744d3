#!/usr/bin/env python3
"""Write the built-in glyph sequence as an IDX image file.

The file feeds the image-demo experiment (``hdmem image-demo --images``)
and exercises the same ingestion path as any external IDX data. With
--pgm-dir each glyph is also rendered as a PGM for quick inspection.
"""

import argparse
from pathlib import Path

from hdmem.images import demo_glyphs, write_idx_images, write_pgm


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", type=Path, help="IDX file to write")
    parser.add_argument("--count", type=int, default=6, help="glyphs to emit (1-6)")
    parser.add_argument("--side", type=int, default=28, help="canvas side, >= 28")
    parser.add_argument("--pgm-dir", type=Path, help="also render one PGM per glyph")
    args = parser.parse_args()

    glyphs = demo_glyphs(args.count, side=args.side)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_idx_images(args.out, glyphs)
    print(f"wrote {len(glyphs)} {args.side}x{args.side} glyphs to {args.out}")
    if args.pgm_dir:
        args.pgm_dir.mkdir(parents=True, exist_ok=True)
        for i, glyph in enumerate(glyphs, start=1):
            path = args.pgm_dir / f"glyph{i}.pgm"
            write_pgm(glyph, path)
            print(f"  {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
