"""Command-line driver: fuse, decompose, metrics, and report subcommands.

Exit codes: 0 success, 1 usage error, 2 I/O or file-format error,
3 dimension or parameter error.  Diagnostics go to stderr; stdout carries
only requested data.  Output files are written atomically (temp file plus
rename), so a failing run never leaves a partial image behind.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .diffusion import DiffusionParams, decompose
from .fusion import SIGMOID, USER_DRIVEN, FusionConfig, fuse_exposures
from .image import (
    ExposureStack,
    MultiChannelImage,
    PnmError,
    read_pnm,
    to_luminance,
    write_pnm,
)
from .metrics import MetricReport, entropy, relative_mse
from .pyramid import DepthError
from .report import DEFAULT_ITERATION_VALUES, iteration_sweep, render_figures, write_csv
from .weights import local_range

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_CONFIG = 3


class ConfigError(ValueError):
    """Flag value violates a parameter invariant; maps to exit code 3."""


class _Parser(argparse.ArgumentParser):
    # usage problems must exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_levels(text: str):
    if text == "auto":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {text!r}")


def _parse_int_list(text: str):
    try:
        return tuple(int(tok) for tok in text.split(",") if tok)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_diffusion_flags(sub):
    sub.add_argument("--t", type=int, default=1, metavar="N",
                     help="diffusion iterations (default 1)")
    sub.add_argument("--lambda", dest="rate", type=float, default=1.0 / 7.0, metavar="F",
                     help="diffusion rate in (0,1] (default 1/7)")
    sub.add_argument("--kappa", type=float, default=30.0, metavar="F",
                     help="gradient scale on the 0-255 intensity scale (default 30)")
    sub.add_argument("--conduction", choices=["g1", "g2"], default="g1",
                     help="edge-stopping function (default g1)")


def _add_fusion_flags(sub):
    _add_diffusion_flags(sub)
    sub.add_argument("--detail-mode", choices=[USER_DRIVEN, SIGMOID], default=SIGMOID,
                     help="detail fusion rule (default sigmoid)")
    sub.add_argument("--alpha1", type=float, default=1.2, metavar="F",
                     help="linear detail gain for user mode (default 1.2)")
    sub.add_argument("--alpha2", type=float, default=2.0, metavar="F",
                     help="detail gain for sigmoid mode (default 2)")
    sub.add_argument("--a", type=float, default=27.0, metavar="F",
                     help="sigmoid steepness (default 27)")
    sub.add_argument("--theta", type=float, default=0.002, metavar="F",
                     help="sigmoid threshold (default 0.002)")
    sub.add_argument("--levels", type=_parse_levels, default=None, metavar="N|auto",
                     help="pyramid depth, or 'auto' from image size (default auto)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="expofuse", allow_abbrev=False,
                     description="Multi-exposure image fusion on PGM/PPM stacks.")
    subs = parser.add_subparsers(dest="command", required=True)

    fuse = subs.add_parser("fuse", allow_abbrev=False,
                           help="fuse a bracketed exposure stack into one image")
    fuse.add_argument("-o", "--output", required=True, metavar="OUT",
                      help="fused image to write (PGM/PPM)")
    _add_fusion_flags(fuse)
    fuse.add_argument("inputs", nargs="+", metavar="IN", help="input exposures")
    fuse.set_defaults(func=_cmd_fuse)

    dec = subs.add_parser("decompose", allow_abbrev=False,
                          help="write the base and detail layers of one image")
    dec.add_argument("--base", required=True, metavar="OUT1", help="base layer output")
    dec.add_argument("--detail", required=True, metavar="OUT2",
                     help="detail layer output, offset-encoded as (D+1)/2")
    dec.add_argument("--weights", metavar="OUT3",
                     help="also dump the base layer's local-range texture map as PGM")
    _add_diffusion_flags(dec)
    dec.add_argument("input", metavar="IN", help="input image")
    dec.set_defaults(func=_cmd_decompose)

    met = subs.add_parser("metrics", allow_abbrev=False,
                          help="print entropy_bits,relative_mse_pct,elapsed_ms as CSV")
    met.add_argument("--entropy", metavar="IN", help="image to measure entropy of")
    met.add_argument("--mse", nargs=2, metavar=("TEST", "REF"),
                     help="pair of images for relative MSE")
    met.set_defaults(func=_cmd_metrics)

    rep = subs.add_parser("report", allow_abbrev=False,
                          help="sweep diffusion iterations; write CSV and trend figures")
    rep.add_argument("-o", "--output-dir", required=True, metavar="DIR",
                     help="directory for sweep.csv and PNG figures")
    _add_fusion_flags(rep)
    rep.add_argument("--t-values", type=_parse_int_list,
                     default=DEFAULT_ITERATION_VALUES, metavar="N,N,...",
                     help="iteration counts to sweep (default 1,2,3,4,5,8)")
    rep.add_argument("--timing-runs", type=int, default=3, metavar="N",
                     help="timed repetitions per sweep point, median reported (default 3)")
    rep.add_argument("inputs", nargs="+", metavar="IN", help="input exposures")
    rep.set_defaults(func=_cmd_report)

    return parser


def _diffusion_from_args(args) -> DiffusionParams:
    if args.t < 0:
        raise ConfigError(f"--t must be >= 0, got {args.t}")
    if not 0.0 < args.rate <= 1.0:
        raise ConfigError(f"--lambda must lie in (0, 1], got {args.rate}")
    if not args.kappa > 0.0:
        raise ConfigError(f"--kappa must be positive, got {args.kappa}")
    # the flag is on the 0-255 scale of 8-bit files; internal planes are [0,1]
    return DiffusionParams(iterations=args.t, rate=args.rate,
                           kappa=args.kappa / 255.0, variant=args.conduction)


def _config_from_args(args) -> FusionConfig:
    diffusion = _diffusion_from_args(args)
    if args.alpha1 <= 0.0:
        raise ConfigError(f"--alpha1 must be positive, got {args.alpha1}")
    if args.alpha2 <= 0.0:
        raise ConfigError(f"--alpha2 must be positive, got {args.alpha2}")
    if args.a <= 0.0:
        raise ConfigError(f"--a must be positive, got {args.a}")
    if args.theta < 0.0:
        raise ConfigError(f"--theta must be >= 0, got {args.theta}")
    if args.levels is not None and args.levels < 1:
        raise ConfigError(f"--levels must be >= 1 or 'auto', got {args.levels}")
    return FusionConfig(diffusion=diffusion, depth=args.levels,
                        detail_mode=args.detail_mode, alpha1=args.alpha1,
                        alpha2=args.alpha2, steepness=args.a, threshold=args.theta)


def _read_image(path: str) -> MultiChannelImage:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return read_pnm(data)
    except PnmError as exc:
        raise PnmError(f"{path}: {exc.message}", exc.offset) from exc


def _read_stack(paths: list[str]) -> ExposureStack:
    images = [_read_image(p) for p in paths]
    first = images[0]
    for path, img in zip(paths, images):
        if (img.width, img.height) != (first.width, first.height):
            raise ConfigError(
                f"{path}: dimensions {img.width}x{img.height} do not match "
                f"{paths[0]} ({first.width}x{first.height})"
            )
        if len(img.channels) != len(first.channels):
            raise ConfigError(
                f"{path}: channel count {len(img.channels)} does not match "
                f"{paths[0]} ({len(first.channels)})"
            )
    return ExposureStack(images=tuple(images))


def _write_atomic(path: str, data: bytes) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=target.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _cmd_fuse(args) -> int:
    config = _config_from_args(args)
    stack = _read_stack(args.inputs)
    result = fuse_exposures(stack, config)
    _write_atomic(args.output, write_pnm(result.image))
    return EXIT_OK


def _cmd_decompose(args) -> int:
    params = _diffusion_from_args(args)
    image = _read_image(args.input)
    layers = [decompose(c, params) for c in image.channels]
    base = MultiChannelImage(channels=tuple(np.clip(tl.base, 0.0, 1.0) for tl in layers))
    detail = MultiChannelImage(
        channels=tuple(np.clip((tl.detail + 1.0) / 2.0, 0.0, 1.0) for tl in layers)
    )
    _write_atomic(args.base, write_pnm(base))
    _write_atomic(args.detail, write_pnm(detail))
    if args.weights:
        texture = local_range(to_luminance(base))
        _write_atomic(args.weights, write_pnm(MultiChannelImage(channels=(texture,))))
    return EXIT_OK


def _cmd_metrics(args) -> int:
    report = MetricReport(
        entropy_bits=entropy(_read_image(args.entropy)) if args.entropy else None,
        relative_mse_pct=(
            relative_mse(_read_image(args.mse[0]), _read_image(args.mse[1]))
            if args.mse else None
        ),
    )
    print(report.csv_line())
    return EXIT_OK


def _cmd_report(args) -> int:
    config = _config_from_args(args)
    if not args.t_values:
        raise ConfigError("--t-values must list at least one iteration count")
    if any(v < 0 for v in args.t_values):
        raise ConfigError(f"--t-values entries must be >= 0, got {list(args.t_values)}")
    if args.timing_runs < 1:
        raise ConfigError(f"--timing-runs must be >= 1, got {args.timing_runs}")
    stack = _read_stack(args.inputs)
    rows = iteration_sweep(stack, config, args.t_values, args.timing_runs)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(rows, out / "sweep.csv")
    figures = render_figures(rows, out)
    print(f"wrote {out / 'sweep.csv'} and {len(figures)} figures", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PnmError as exc:
        print(f"expofuse: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"expofuse: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, DepthError, ValueError) as exc:
        print(f"expofuse: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
