#!/usr/bin/env python3
"""Cut the 64x64 natural-photo fixture corpus used by the report tests.

Sources are scikit-image sample photos that are public domain or CC0
(astronaut, rocket: public domain; coffee, chelsea: CC0). Tiles are taken
on an evenly spaced grid so the corpus is reproducible.
"""
import os
import sys

import numpy as np
from PIL import Image
import skimage.data

TILE = 64
PER_SOURCE = 30
SOURCES = ["astronaut", "coffee", "chelsea", "rocket"]


def tiles(img, count):
    h, w = img.shape[:2]
    rows, cols = h // TILE, w // TILE
    cells = [(r, c) for r in range(rows) for c in range(cols)]
    idx = np.linspace(0, len(cells) - 1, count).round().astype(int)
    for i in idx:
        r, c = cells[i]
        yield img[r * TILE:(r + 1) * TILE, c * TILE:(c + 1) * TILE, :3]


def main(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    for name in SOURCES:
        img = getattr(skimage.data, name)()
        for k, t in enumerate(tiles(img, PER_SOURCE)):
            path = os.path.join(out_dir, f"{name}_{k:02d}.png")
            Image.fromarray(np.ascontiguousarray(t)).save(path, optimize=True)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/corpus")
