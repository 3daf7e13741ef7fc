"""Pixel-grid data model, binary PGM/PPM codec, and luminance conversion.

Intensities are float64 in [0, 1] internally; 8-bit netpbm files are the
only on-disk format.  A "plane" throughout this package is a read-only
2-D float64 numpy array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# ITU-R BT.601 luma coefficients, the conventional choice for 8-bit
# photographic sources.
LUMA_R = 0.299
LUMA_G = 0.587
LUMA_B = 0.114

_WHITESPACE = b" \t\n\r\x0b\x0c"


class PnmError(ValueError):
    """Malformed or unsupported PGM/PPM data.

    ``offset`` is the byte position at which parsing failed; ``message``
    is the description without the offset suffix.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.message = message
        self.offset = offset


def as_plane(values) -> np.ndarray:
    """Coerce to a read-only 2-D float64 grid, rejecting non-finite values."""
    plane = np.asarray(values, dtype=np.float64)
    if plane.ndim != 2:
        raise ValueError(f"plane must be 2-D, got shape {plane.shape}")
    if plane.shape[0] < 1 or plane.shape[1] < 1:
        raise ValueError(f"plane must be at least 1x1, got shape {plane.shape}")
    if not np.isfinite(plane).all():
        raise ValueError("plane contains NaN or Inf")
    if plane.flags.writeable:
        plane = plane.copy()
        plane.flags.writeable = False
    return plane


@dataclass(frozen=True)
class MultiChannelImage:
    """One (gray) or three (RGB) co-registered intensity planes in [0, 1]."""

    channels: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.channels) not in (1, 3):
            raise ValueError(f"channel count must be 1 or 3, got {len(self.channels)}")
        planes = tuple(as_plane(c) for c in self.channels)
        shapes = {p.shape for p in planes}
        if len(shapes) != 1:
            raise ValueError(f"channel dimensions differ: {sorted(shapes)}")
        for p in planes:
            if p.min() < 0.0 or p.max() > 1.0:
                raise ValueError("image channel values must lie in [0, 1]")
        object.__setattr__(self, "channels", planes)

    @property
    def width(self) -> int:
        return self.channels[0].shape[1]

    @property
    def height(self) -> int:
        return self.channels[0].shape[0]


@dataclass(frozen=True)
class ExposureStack:
    """Ordered bracketed exposure series; all members share geometry."""

    images: tuple[MultiChannelImage, ...]

    def __post_init__(self):
        if len(self.images) < 1:
            raise ValueError("exposure stack must contain at least one image")
        first = self.images[0]
        for i, img in enumerate(self.images):
            if (img.width, img.height) != (first.width, first.height):
                raise ValueError(
                    f"stack image {i} is {img.width}x{img.height}, "
                    f"expected {first.width}x{first.height}"
                )
            if len(img.channels) != len(first.channels):
                raise ValueError(
                    f"stack image {i} has {len(img.channels)} channels, "
                    f"expected {len(first.channels)}"
                )
        object.__setattr__(self, "images", tuple(self.images))

    def __len__(self) -> int:
        return len(self.images)

    def __iter__(self):
        return iter(self.images)


def _skip_header_space(data: bytes, pos: int) -> int:
    """Advance past whitespace and '#' comment lines."""
    n = len(data)
    while pos < n:
        c = data[pos]
        if c == 0x23:  # '#'
            while pos < n and data[pos] not in (0x0A, 0x0D):
                pos += 1
        elif c in _WHITESPACE:
            pos += 1
        else:
            break
    return pos


def _read_header_int(data: bytes, pos: int, what: str) -> tuple[int, int]:
    pos = _skip_header_space(data, pos)
    start = pos
    while pos < len(data) and data[pos : pos + 1].isdigit():
        pos += 1
    if pos == start:
        raise PnmError(f"expected {what} in header", start)
    return int(data[start:pos]), pos


def read_pnm(data: bytes) -> MultiChannelImage:
    """Decode a binary PGM (P5) or PPM (P6) byte string.

    Only maxval 255 is supported; samples map to [0, 1] as v / 255.
    Raises :class:`PnmError` naming the failing byte offset.
    """
    magic = data[:2]
    if magic == b"P5":
        nchan = 1
    elif magic == b"P6":
        nchan = 3
    else:
        raise PnmError("not a binary PGM (P5) or PPM (P6) file", 0)

    width, pos = _read_header_int(data, 2, "width")
    height, pos = _read_header_int(data, pos, "height")
    maxval_at = _skip_header_space(data, pos)
    maxval, pos = _read_header_int(data, pos, "maxval")
    if maxval != 255:
        raise PnmError(f"unsupported maxval {maxval}, only 255 is supported", maxval_at)
    if width < 1 or height < 1:
        raise PnmError(f"invalid dimensions {width}x{height}", 2)
    if pos >= len(data) or data[pos : pos + 1] not in (b" ", b"\t", b"\n", b"\r"):
        raise PnmError("expected single whitespace after maxval", pos)
    pos += 1

    expected = width * height * nchan
    payload = data[pos : pos + expected]
    if len(payload) < expected:
        raise PnmError(
            f"truncated payload, expected {expected} bytes, got {len(payload)}",
            pos + len(payload),
        )
    samples = np.frombuffer(payload, dtype=np.uint8).astype(np.float64) / 255.0
    if nchan == 1:
        planes = (samples.reshape(height, width),)
    else:
        interleaved = samples.reshape(height, width, 3)
        planes = tuple(interleaved[:, :, c] for c in range(3))
    return MultiChannelImage(channels=planes)


def quantize_u8(plane: np.ndarray) -> np.ndarray:
    """Map [0, 1] intensities to 8-bit samples.

    round(v * 255) with half-away-from-zero ties, clamped to [0, 255];
    out-of-range inputs (e.g. fusion overshoot) clamp rather than wrap.
    """
    scaled = np.floor(np.asarray(plane, dtype=np.float64) * 255.0 + 0.5)
    return np.clip(scaled, 0.0, 255.0).astype(np.uint8)


def write_pnm(image: MultiChannelImage) -> bytes:
    """Encode as binary PGM/PPM, the inverse of :func:`read_pnm` up to quantization."""
    magic = b"P5" if len(image.channels) == 1 else b"P6"
    header = magic + b"\n%d %d\n255\n" % (image.width, image.height)
    quantized = [quantize_u8(c) for c in image.channels]
    if len(quantized) == 1:
        payload = quantized[0].tobytes()
    else:
        payload = np.stack(quantized, axis=-1).tobytes()
    return header + payload


def to_luminance(image: MultiChannelImage) -> np.ndarray:
    """Single luminance plane: gray images pass through, RGB uses BT.601."""
    if len(image.channels) == 1:
        return image.channels[0]
    r, g, b = image.channels
    # stays within [0, 1] for in-range inputs: every product and partial
    # sum is bounded by the same expression evaluated at r = g = b = 1,
    # which rounds to just below 1.0
    return LUMA_R * r + LUMA_G * g + LUMA_B * b
