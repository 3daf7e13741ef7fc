"""Burt-Adelson Gaussian/Laplacian pyramid analysis and synthesis.

Levels shrink by ceil(n/2) per axis.  Both directions of the transform
use the same separable 5-tap kernel with reflected borders (mirror
without repeating the edge sample, "abc|ba"), which preserves constant
planes and makes analysis/synthesis exact inverses for any size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .image import as_plane

GAUSSIAN = "gaussian"
LAPLACIAN = "laplacian"

# Generating parameter of the equivalent weighting function; 0.4 gives
# the most Gaussian-like kernel.
KERNEL_A = 0.4
KERNEL = (0.25 - KERNEL_A / 2.0, 0.25, KERNEL_A, 0.25, 0.25 - KERNEL_A / 2.0)

#: Smallest edge allowed at the coarsest pyramid level.
MIN_LEVEL_DIM = 4


class DepthError(ValueError):
    """Requested pyramid depth would shrink a level below the minimum size."""


@dataclass(frozen=True)
class Pyramid:
    """Ordered levels, index 0 at full resolution."""

    levels: tuple[np.ndarray, ...]
    kind: str

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, LAPLACIAN):
            raise ValueError(f"kind must be {GAUSSIAN!r} or {LAPLACIAN!r}")
        object.__setattr__(self, "levels", tuple(self.levels))

    @property
    def depth(self) -> int:
        return len(self.levels) - 1


def _smooth_axis(plane: np.ndarray, taps, axis: int) -> np.ndarray:
    """5-tap filtering along one axis with reflected borders."""
    pad = [(0, 0), (0, 0)]
    pad[axis] = (2, 2)
    padded = np.pad(plane, pad, mode="reflect")
    n = plane.shape[axis]
    acc = np.zeros_like(plane)
    for m, w in enumerate(taps):
        if axis == 0:
            acc += w * padded[m : m + n, :]
        else:
            acc += w * padded[:, m : m + n]
    return acc


def _smooth(plane: np.ndarray, taps) -> np.ndarray:
    """Separable 5-tap filtering along both axes with reflected borders."""
    return _smooth_axis(_smooth_axis(plane, taps, 0), taps, 1)


def reduce(plane: np.ndarray) -> np.ndarray:
    """Low-pass filter and decimate to ceil(n/2) per axis."""
    p = np.asarray(plane, dtype=np.float64)
    if min(p.shape) < 2:
        raise ValueError(f"cannot reduce a plane of shape {p.shape}; both dims must be >= 2")
    return _smooth(p, KERNEL)[::2, ::2]


def expand(plane: np.ndarray, target_w: int, target_h: int) -> np.ndarray:
    """Upsample to an explicit target size, the adjoint-style inverse of reduce.

    Samples land on even coordinates of a zero-inserted grid which is then
    filtered with the doubled kernel, so constants come back as constants.
    """
    p = np.asarray(plane, dtype=np.float64)
    if (math.ceil(target_w / 2), math.ceil(target_h / 2)) != (p.shape[1], p.shape[0]):
        raise ValueError(
            f"target {target_w}x{target_h} does not expand from a plane of shape {p.shape}"
        )
    up = np.zeros((target_h, target_w), dtype=np.float64)
    up[::2, ::2] = p
    # the doubled kernel restores unit gain over the zero-inserted samples;
    # a degenerate 1-pixel axis has no inserted zeros and needs no gain
    doubled = tuple(2.0 * w for w in KERNEL)
    out = up
    for axis, size in ((0, target_h), (1, target_w)):
        if size >= 2:
            out = _smooth_axis(out, doubled, axis)
    return out


def max_depth(width: int, height: int) -> int:
    """Largest depth whose coarsest level keeps both dims >= MIN_LEVEL_DIM."""
    w, h = width, height
    d = 0
    while math.ceil(w / 2) >= MIN_LEVEL_DIM and math.ceil(h / 2) >= MIN_LEVEL_DIM:
        w, h = math.ceil(w / 2), math.ceil(h / 2)
        d += 1
    return d


def default_depth(width: int, height: int) -> int:
    """Depth used when the caller does not pin one.

    Scales with image size, leaving a coarsest level of roughly 8-16
    pixels, and never exceeds what the minimum-size rule admits.
    """
    d = max(1, int(math.floor(math.log2(min(width, height)))) - 3)
    admissible = max_depth(width, height)
    if admissible < 1:
        raise DepthError(
            f"image {width}x{height} is too small for any pyramid "
            f"(coarsest level would drop below {MIN_LEVEL_DIM} pixels)"
        )
    return min(d, admissible)


def _check_depth(shape: tuple[int, int], depth: int) -> None:
    if depth < 1:
        raise DepthError(f"depth must be >= 1, got {depth}")
    if depth > max_depth(shape[1], shape[0]):
        raise DepthError(
            f"depth {depth} too large for a {shape[1]}x{shape[0]} plane: "
            f"coarsest level would drop below {MIN_LEVEL_DIM} pixels"
        )


def analyze_gaussian(plane: np.ndarray, depth: int) -> Pyramid:
    """Successively low-passed and decimated copies, levels 0..depth."""
    p = as_plane(plane)
    _check_depth(p.shape, depth)
    levels = [np.asarray(p)]
    for _ in range(depth):
        levels.append(reduce(levels[-1]))
    return Pyramid(levels=tuple(levels), kind=GAUSSIAN)


def analyze_laplacian(plane: np.ndarray, depth: int) -> Pyramid:
    """Band-pass residuals between Gaussian levels; the top level stays Gaussian."""
    gauss = analyze_gaussian(plane, depth)
    levels = []
    for l in range(depth):
        g = gauss.levels[l]
        up = expand(gauss.levels[l + 1], g.shape[1], g.shape[0])
        levels.append(g - up)
    levels.append(gauss.levels[depth])
    return Pyramid(levels=tuple(levels), kind=LAPLACIAN)


def collapse(pyr: Pyramid) -> np.ndarray:
    """Synthesize the full-resolution plane from a Laplacian pyramid."""
    if pyr.kind != LAPLACIAN:
        raise ValueError("collapse expects a Laplacian pyramid")
    acc = pyr.levels[-1]
    for level in reversed(pyr.levels[:-1]):
        acc = level + expand(acc, level.shape[1], level.shape[0])
    return acc
