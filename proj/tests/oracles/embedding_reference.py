#!/usr/bin/env python3
"""Independent numpy reference for the patch embedding golden vectors.

Random parameters follow the library's documented recipe: a SplitMix64
stream, entries (raw >> 11) * 2^-52 - 1, E filled row-major then E_pos,
scaled by 1/sqrt(P*P*C) and 1/sqrt(D).
"""
import hashlib
import struct

import numpy as np

from reference_cipher import SplitMix64, fixture


def random_params(patch, n, dim, seed):
    s = SplitMix64(seed)
    flat = patch * patch * 3

    def draw(count):
        return np.array([(s.next() >> 11) * 2.0 ** -52 - 1.0 for _ in range(count)])

    e = draw(flat * dim).reshape(flat, dim) / np.sqrt(flat)
    pos = draw(n * dim).reshape(n, dim) / np.sqrt(dim)
    return e, pos


def patches(img, w, h, patch):
    a = np.frombuffer(img, dtype=np.uint8).reshape(h, w, 3).astype(np.float64)
    rows = []
    for by in range(h // patch):
        for bx in range(w // patch):
            blk = a[by * patch:(by + 1) * patch, bx * patch:(bx + 1) * patch, :]
            rows.append(blk.transpose(2, 0, 1).ravel())  # channel, row, column
    return (2.0 * np.array(rows) - 255.0) / 255.0


if __name__ == "__main__":
    np.set_printoptions(precision=17)
    img = fixture(32, 32)
    e, pos = random_params(16, 4, 4, 7)
    z = patches(img, 32, 32, 16) @ e + pos
    print("embed:")
    for row in z:
        print(", ".join(repr(float(v)) for v in row))
    print("feature:", ", ".join(repr(float(v)) for v in z.mean(axis=0)))
    print("E[0,0], E[767,3], Epos[3,3]:", repr(e[0, 0]), repr(e[767, 3]), repr(pos[3, 3]))
    tape = SplitMix64(1)
    raw = b"".join(struct.pack("<Q", tape.next()) for _ in range(10000))
    print("tape sha256 seed=1 10000 draws:", hashlib.sha256(raw).hexdigest())
