"""Deterministic synthetic bracketed test scene.

A desk-sized tabletop arrangement lit by a strong side light: scene
radiance spans better than three decades, so every exposure in the
bracket clips somewhere.  The short exposure holds the brightly lit
side, the long one digs out the shadowed side, and the middle one covers
neither extreme completely.  High-contrast texture is present everywhere
in radiance, and the fused output fills nearly the whole display range,
which makes the stack suitable for exercising weight maps, detail
fusion, and the iteration-count trends.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from .image import ExposureStack, MultiChannelImage, quantize_u8, write_pnm

DESK_GAINS = (0.25, 1.0, 4.0)
DESK_SIZE = 128

_RADIANCE_MIN = 0.002
_RADIANCE_MAX = 4.6
_GRAIN_SEED = 20130221


def desk_radiance(width: int = DESK_SIZE, height: int = DESK_SIZE) -> np.ndarray:
    """Linear scene radiance, shape (3, height, width), no clipping applied."""
    x = np.linspace(0.0, 1.0, width)[None, :]
    y = np.linspace(0.0, 1.0, height)[:, None]

    # side light: illumination climbs over three decades left to right
    illum = _RADIANCE_MIN * (_RADIANCE_MAX / _RADIANCE_MIN) ** x
    illum = illum * np.ones((height, width))

    # tabletop albedo: woodgrain-ish sinusoids plus a coarse high-contrast
    # checker and speckle grain
    grain = 0.22 * np.sin(2 * np.pi * (7.0 * y + 1.5 * x)) + 0.132 * np.sin(
        2 * np.pi * (23.0 * x + 3.0 * y)
    )
    ones = np.ones((height, width))
    checker = 0.34 * ((np.floor(8.0 * x * ones) + np.floor(8.0 * y * ones)) % 2.0 - 0.5)
    rng = np.random.default_rng(_GRAIN_SEED)
    speckle = 0.10 * rng.standard_normal((height, width))
    albedo = np.clip(0.62 + grain + checker + speckle, 0.08, 1.0)

    # a few props with distinct reflectance
    def rect(x0, x1, y0, y1):
        return ((x >= x0) & (x < x1)) & ((y >= y0) & (y < y1))

    sheet = rect(0.10, 0.42, 0.55, 0.90)
    book = rect(0.55, 0.88, 0.12, 0.38)
    mug = (x - 0.32) ** 2 + (y - 0.28) ** 2 < 0.012

    r, g, b = albedo.copy(), albedo.copy(), albedo.copy()
    r[sheet], g[sheet], b[sheet] = 0.92, 0.90, 0.86
    r[book], g[book], b[book] = 0.70, 0.25, 0.20
    r[mug], g[mug], b[mug] = 0.25, 0.45, 0.75
    prop = sheet | book | mug
    for chan in (r, g, b):
        chan[prop] = np.clip(chan[prop] + 1.1 * (grain + checker)[prop], 0.05, 1.0)

    return np.stack([r, g, b]) * illum[None, :, :]


def render_exposure(radiance: np.ndarray, gain: float) -> MultiChannelImage:
    """Expose, clip to the sensor range, and quantize to the 8-bit grid."""
    captured = np.clip(radiance * gain, 0.0, 1.0)
    channels = tuple(quantize_u8(c).astype(np.float64) / 255.0 for c in captured)
    return MultiChannelImage(channels=channels)


def desk_stack(
    width: int = DESK_SIZE, height: int = DESK_SIZE, gains=DESK_GAINS
) -> ExposureStack:
    """The bundled three-exposure bracket of the desk scene."""
    radiance = desk_radiance(width, height)
    return ExposureStack(images=tuple(render_exposure(radiance, g) for g in gains))


def write_desk_stack(directory) -> list[Path]:
    """Write the bracket as desk_0.ppm .. desk_2.ppm, shortest exposure first."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, img in enumerate(desk_stack()):
        path = directory / f"desk_{i}.ppm"
        path.write_bytes(write_pnm(img))
        paths.append(path)
    return paths


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "data/desk"
    for p in write_desk_stack(target):
        print(p)
