"""Quantitative evaluation: entropy, relative MSE, and timing."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .fusion import FusionConfig, fuse_exposures
from .image import ExposureStack, MultiChannelImage, quantize_u8, to_luminance


@dataclass(frozen=True)
class MetricReport:
    """One row of evaluation output; missing measurements stay None."""

    entropy_bits: float | None = None
    relative_mse_pct: float | None = None
    elapsed_ms: float | None = None

    def csv_line(self) -> str:
        fields = (self.entropy_bits, self.relative_mse_pct, self.elapsed_ms)
        return ",".join("" if v is None else f"{v:.6f}" for v in fields)


def _luminance_of(image) -> np.ndarray:
    if isinstance(image, MultiChannelImage):
        return to_luminance(image)
    return np.asarray(image, dtype=np.float64)


def _samples_of(image) -> np.ndarray:
    if isinstance(image, MultiChannelImage):
        return np.stack(image.channels)
    return np.asarray(image, dtype=np.float64)


def entropy(image) -> float:
    """Shannon entropy in bits of the 8-bit-quantized luminance histogram.

    0 for a constant image, 8 when all 256 levels are equally populated.
    """
    luma = _luminance_of(image)
    hist = np.bincount(quantize_u8(luma).ravel(), minlength=256).astype(np.float64)
    p = hist / hist.sum()
    nonzero = p[p > 0.0]
    # adding 0.0 turns the single-bin result of -0.0 into +0.0
    return float(-np.sum(nonzero * np.log2(nonzero)) + 0.0)


def relative_mse(test, reference) -> float:
    """Mean squared difference as a percentage of the reference's mean square."""
    t = _samples_of(test)
    r = _samples_of(reference)
    if t.shape != r.shape:
        raise ValueError(f"shape mismatch: test {t.shape} vs reference {r.shape}")
    ref_power = float(np.mean(np.square(r)))
    err_power = float(np.mean(np.square(t - r)))
    if ref_power == 0.0:
        if err_power == 0.0:
            return 0.0
        raise ValueError("reference image is all zero but test is not")
    return 100.0 * err_power / ref_power


def time_fusion(stack: ExposureStack, config: FusionConfig = FusionConfig()) -> float:
    """Wall-clock milliseconds of one fusion run on a monotonic clock."""
    start = time.perf_counter()
    fuse_exposures(stack, config)
    return (time.perf_counter() - start) * 1000.0
