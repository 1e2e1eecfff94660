#!/usr/bin/env python3
"""Brute-force SSIM oracle: every 8x8 window, stride 1, uniform weights,
sample (n-1) covariance, per channel then averaged over RGB.

Usage: python3 ssim_reference.py a.png b.png
"""
import sys

import numpy as np
from PIL import Image

C1 = (0.01 * 255) ** 2
C2 = (0.03 * 255) ** 2
WIN = 8


def channel_ssim(a, b):
    h, w = a.shape
    total, count = 0.0, 0
    for y in range(h - WIN + 1):
        for x in range(w - WIN + 1):
            p = a[y:y + WIN, x:x + WIN].ravel()
            q = b[y:y + WIN, x:x + WIN].ravel()
            mx, my = p.mean(), q.mean()
            vx, vy = p.var(ddof=1), q.var(ddof=1)
            cov = ((p - mx) * (q - my)).sum() / (p.size - 1)
            total += ((2 * mx * my + C1) * (2 * cov + C2)) / (
                (mx * mx + my * my + C1) * (vx + vy + C2))
            count += 1
    return total / count


def ssim(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return sum(channel_ssim(a[..., c], b[..., c]) for c in range(3)) / 3


if __name__ == "__main__":
    a = Image.open(sys.argv[1]).convert("RGB")
    b = Image.open(sys.argv[2]).convert("RGB")
    print(repr(ssim(a, b)))
