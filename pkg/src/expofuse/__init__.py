"""Multi-exposure image fusion via anisotropic-diffusion two-layer
decomposition, local-range weight maps, and Laplacian-pyramid blending."""

from .diffusion import (
    G1,
    G2,
    DiffusionParams,
    TwoLayer,
    conduction,
    decompose,
    diffuse,
    diffuse_step,
)
from .fusion import (
    SIGMOID,
    USER_DRIVEN,
    FusedResult,
    FusionConfig,
    fuse_base,
    fuse_detail_sigmoid,
    fuse_detail_user,
    fuse_exposures,
    sigmoid,
    sigmoid_deriv,
)
from .image import (
    ExposureStack,
    MultiChannelImage,
    PnmError,
    as_plane,
    quantize_u8,
    read_pnm,
    to_luminance,
    write_pnm,
)
from .metrics import MetricReport, entropy, relative_mse, time_fusion
from .pyramid import (
    GAUSSIAN,
    LAPLACIAN,
    DepthError,
    Pyramid,
    analyze_gaussian,
    analyze_laplacian,
    collapse,
    default_depth,
    expand,
    max_depth,
    reduce,
)
from .weights import local_range, normalize_weights, weight_pyramids

__version__ = "0.1.0"

__all__ = [
    "G1",
    "G2",
    "GAUSSIAN",
    "LAPLACIAN",
    "SIGMOID",
    "USER_DRIVEN",
    "DepthError",
    "DiffusionParams",
    "ExposureStack",
    "FusedResult",
    "FusionConfig",
    "MetricReport",
    "MultiChannelImage",
    "PnmError",
    "Pyramid",
    "TwoLayer",
    "analyze_gaussian",
    "analyze_laplacian",
    "as_plane",
    "collapse",
    "conduction",
    "decompose",
    "default_depth",
    "diffuse",
    "diffuse_step",
    "entropy",
    "expand",
    "fuse_base",
    "fuse_detail_sigmoid",
    "fuse_detail_user",
    "fuse_exposures",
    "local_range",
    "max_depth",
    "normalize_weights",
    "quantize_u8",
    "read_pnm",
    "reduce",
    "relative_mse",
    "sigmoid",
    "sigmoid_deriv",
    "time_fusion",
    "to_luminance",
    "weight_pyramids",
    "write_pnm",
]
