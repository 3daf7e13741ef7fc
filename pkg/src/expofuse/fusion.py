"""Base-layer pyramid blending, detail-layer fusion, and the full pipeline.

Each exposure is split into a diffused base and a residual detail layer.
Bases blend at every pyramid scale under local-range weights; details
combine either as a plain scaled average or through a zero-centered
sigmoid that boosts weak texture while saturating strong edges.  The
fused image is the clamped sum of the two fused layers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffusion import DiffusionParams, decompose
from .image import ExposureStack, MultiChannelImage, to_luminance
from .pyramid import LAPLACIAN, Pyramid, analyze_laplacian, collapse, default_depth
from .weights import local_range, normalize_weights, weight_pyramids

USER_DRIVEN = "user"
SIGMOID = "sigmoid"

DEFAULT_ALPHA1 = 1.2
DEFAULT_ALPHA2 = 2.0
DEFAULT_STEEPNESS = 27.0
DEFAULT_THRESHOLD = 0.002


@dataclass(frozen=True)
class FusionConfig:
    """All free parameters of the pipeline.

    ``depth=None`` picks a pyramid depth from the image size.  In sigmoid
    mode ``steepness`` sets the small-signal detail gain (steepness/4 per
    unit of ``alpha2``) and ``threshold`` shifts the response for global
    contrast control.
    """

    diffusion: DiffusionParams = DiffusionParams()
    depth: int | None = None
    detail_mode: str = SIGMOID
    alpha1: float = DEFAULT_ALPHA1
    alpha2: float = DEFAULT_ALPHA2
    steepness: float = DEFAULT_STEEPNESS
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if self.detail_mode not in (USER_DRIVEN, SIGMOID):
            raise ValueError(
                f"detail_mode must be {USER_DRIVEN!r} or {SIGMOID!r}, got {self.detail_mode!r}"
            )
        if self.depth is not None and self.depth < 1:
            raise ValueError(f"depth must be >= 1 or None for auto, got {self.depth}")
        if not self.alpha1 > 0:
            raise ValueError(f"alpha1 must be positive, got {self.alpha1}")
        if not self.alpha2 > 0:
            raise ValueError(f"alpha2 must be positive, got {self.alpha2}")
        if not self.steepness > 0:
            raise ValueError(f"steepness must be positive, got {self.steepness}")
        if self.threshold < 0:
            raise ValueError(f"threshold must be >= 0, got {self.threshold}")


@dataclass(frozen=True)
class FusedResult:
    """Fused image plus the two layers it was composed from.

    ``image`` equals clamp(base + detail, 0, 1) channel by channel.
    """

    image: MultiChannelImage
    base: tuple[np.ndarray, ...]
    detail: tuple[np.ndarray, ...]


def sigmoid(x, steepness: float = DEFAULT_STEEPNESS, threshold: float = DEFAULT_THRESHOLD):
    """Saturating response 1 / (1 + exp(-steepness*x + threshold))."""
    z = np.multiply(steepness, x) - threshold
    e = np.exp(-np.abs(z))
    return np.where(z >= 0.0, 1.0 / (1.0 + e), e / (1.0 + e))[()]


def sigmoid_deriv(x, steepness: float = DEFAULT_STEEPNESS, threshold: float = DEFAULT_THRESHOLD):
    """Slope of :func:`sigmoid`; peaks at steepness/4 where the response crosses 1/2."""
    s = sigmoid(x, steepness, threshold)
    return steepness * s * (1.0 - s)


def fuse_detail_user(details: list[np.ndarray], alpha1: float = DEFAULT_ALPHA1) -> np.ndarray:
    """Scaled average of the detail layers."""
    if len(details) < 1:
        raise ValueError("need at least one detail layer")
    return (alpha1 / len(details)) * np.sum(details, axis=0)


def fuse_detail_sigmoid(
    details: list[np.ndarray],
    alpha2: float = DEFAULT_ALPHA2,
    steepness: float = DEFAULT_STEEPNESS,
    threshold: float = DEFAULT_THRESHOLD,
) -> np.ndarray:
    """Average of sigmoid-remapped detail layers.

    The response is re-centered so zero detail maps to zero; otherwise the
    sigmoid's 1/2 resting level would add a flat offset to the whole image.
    """
    if len(details) < 1:
        raise ValueError("need at least one detail layer")
    rest = sigmoid(0.0, steepness, threshold)
    acc = np.zeros_like(np.asarray(details[0], dtype=np.float64))
    for d in details:
        acc += sigmoid(d, steepness, threshold) - rest
    return (alpha2 / len(details)) * acc


def fuse_base(bases: list[np.ndarray], weight_pyrs: list[Pyramid], depth: int) -> np.ndarray:
    """Blend base layers scale by scale under Gaussian weight pyramids.

    Every Laplacian level, including the coarsest Gaussian top, is
    weighted per pixel and summed over the stack before synthesis.
    """
    if len(bases) != len(weight_pyrs):
        raise ValueError(f"{len(bases)} base layers but {len(weight_pyrs)} weight pyramids")
    fused_levels: list[np.ndarray] | None = None
    for base, wpyr in zip(bases, weight_pyrs):
        band = analyze_laplacian(base, depth)
        if len(band.levels) != len(wpyr.levels):
            raise ValueError("weight pyramid depth does not match base pyramid depth")
        terms = [lvl * w for lvl, w in zip(band.levels, wpyr.levels)]
        if fused_levels is None:
            fused_levels = terms
        else:
            fused_levels = [f + t for f, t in zip(fused_levels, terms)]
    assert fused_levels is not None
    return collapse(Pyramid(levels=tuple(fused_levels), kind=LAPLACIAN))


def fuse_exposures(stack: ExposureStack, config: FusionConfig = FusionConfig()) -> FusedResult:
    """Run the whole pipeline on a bracketed exposure stack."""
    images = list(stack)
    nchan = len(images[0].channels)
    depth = config.depth
    if depth is None:
        depth = default_depth(images[0].width, images[0].height)

    # per-exposure, per-channel two-layer split
    layers = [[decompose(ch, config.diffusion) for ch in img.channels] for img in images]

    # one weight map per exposure from the base layer's luminance,
    # shared across color channels
    base_images = [
        MultiChannelImage(channels=tuple(np.clip(tl.base, 0.0, 1.0) for tl in per_img))
        for per_img in layers
    ]
    raw = [local_range(to_luminance(b)) for b in base_images]
    wpyrs = weight_pyramids(normalize_weights(raw), depth)

    fused_base = []
    fused_detail = []
    for c in range(nchan):
        fused_base.append(fuse_base([per_img[c].base for per_img in layers], wpyrs, depth))
        details = [per_img[c].detail for per_img in layers]
        if config.detail_mode == USER_DRIVEN:
            fused_detail.append(fuse_detail_user(details, config.alpha1))
        else:
            fused_detail.append(
                fuse_detail_sigmoid(details, config.alpha2, config.steepness, config.threshold)
            )

    channels = tuple(np.clip(b + d, 0.0, 1.0) for b, d in zip(fused_base, fused_detail))
    return FusedResult(
        image=MultiChannelImage(channels=channels),
        base=tuple(fused_base),
        detail=tuple(fused_detail),
    )
