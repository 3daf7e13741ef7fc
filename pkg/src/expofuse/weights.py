"""Local-range texture feature and per-exposure fusion weight maps.

Well-exposed regions show the largest spread between neighboring
intensities; saturated or crushed regions flatten out.  The max-minus-min
over each pixel's 8-neighborhood therefore ranks, per pixel, which
exposure saw the scene best, and normalizing across the stack turns the
ranking into blending weights that sum to one everywhere.
"""

from __future__ import annotations

import numpy as np

from .image import as_plane
from .pyramid import Pyramid, analyze_gaussian

#: Below this per-pixel sum of raw ranges the stack is flat everywhere
#: and weights fall back to uniform.
FLAT_EPS = 1e-12


def local_range(plane: np.ndarray) -> np.ndarray:
    """Max minus min over the 8 neighbors of each pixel (center excluded).

    Borders replicate the edge sample, so a 1x1 plane has zero range.
    """
    p = as_plane(plane)
    h, w = p.shape
    padded = np.pad(p, 1, mode="edge")
    neighbors = [
        padded[di : di + h, dj : dj + w]
        for di in (0, 1, 2)
        for dj in (0, 1, 2)
        if (di, dj) != (1, 1)
    ]
    return np.maximum.reduce(neighbors) - np.minimum.reduce(neighbors)


def normalize_weights(raw: list[np.ndarray]) -> list[np.ndarray]:
    """Per-pixel normalization of raw range maps to a partition of unity.

    Pixels that are flat across every exposure get uniform 1/N weights
    instead of a divide-by-zero.
    """
    if len(raw) < 1:
        raise ValueError("need at least one raw weight map")
    planes = [as_plane(r) for r in raw]
    shapes = {p.shape for p in planes}
    if len(shapes) != 1:
        raise ValueError(f"raw weight maps differ in shape: {sorted(shapes)}")
    n = len(planes)
    total = np.zeros_like(planes[0])
    for p in planes:
        total = total + p
    flat = total < FLAT_EPS
    safe_total = np.where(flat, 1.0, total)
    return [np.where(flat, 1.0 / n, p / safe_total) for p in planes]


def weight_pyramids(weights: list[np.ndarray], depth: int) -> list[Pyramid]:
    """Gaussian pyramid of each weight map.

    Linearity and constant preservation of the pyramid kernel keep the
    per-pixel sum at 1 on every level.
    """
    return [analyze_gaussian(w, depth) for w in weights]
