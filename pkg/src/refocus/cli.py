"""Command line front end.

Verbs: blur an image, restore a blurred image with one filter setting,
sweep a filter parameter against a reference, and run a full
experiment from a config file. Exit codes: 0 on success, 2 for
configuration or file format problems, 3 for numeric failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .color import (
    ColorMixing,
    color_tikhonov,
    color_truncated_sd,
    color_truncated_svd,
    cross_channel_blur,
    identity_mixing,
)
from .errors import ConfigError
from .experiment import (
    _color_mu_sweep,
    _color_tsd_sweep,
    _color_tsvd_sweep,
    _parse_float,
    load_config,
    parse_psf_spec,
    run_experiment,
)
from .filtering import (
    Tikhonov,
    TruncateByCount,
    TruncateByThreshold,
    mu_sweep,
    rre_sweep,
    save_curve_csv,
    svd_rre_sweep,
    tikhonov_restore,
    truncated_sd_restore,
    truncated_svd_restore,
)
from .imageio import read_image, read_matrix, write_image, write_matrix
from .metrics import NoiseSpec, add_noise
from .operators import BlurOperator, BoundaryCondition, apply_blur

_BC_NAMES = tuple(bc.value for bc in BoundaryCondition)
_IMAGE_SUFFIXES = (".pgm", ".ppm")


def _load_image(path):
    suffix = Path(path).suffix.lower()
    if suffix in _IMAGE_SUFFIXES:
        return read_image(path)
    if suffix == ".txt":
        return read_matrix(path)
    raise ConfigError(f"unsupported image file type {suffix!r} for {path}")


def _save_image(path, image, maxval):
    suffix = Path(path).suffix.lower()
    if suffix in _IMAGE_SUFFIXES:
        write_image(path, image, maxval)
    elif suffix == ".txt":
        if image.ndim != 2:
            raise ConfigError("text output holds a single 2-D matrix")
        write_matrix(path, image)
    else:
        raise ConfigError(f"unsupported output file type {suffix!r} for {path}")


def _parse_mix(text):
    if text is None:
        return None
    entries = [_parse_float(tok.strip(), "mix entry") for tok in text.split(",")]
    if len(entries) != 9:
        raise ConfigError("mix must hold 9 comma separated row-major entries")
    try:
        return ColorMixing(np.array(entries).reshape(3, 3))
    except ValueError as exc:
        raise ConfigError(f"invalid mixing matrix: {exc}") from exc


def _prepare(args):
    """Shared setup: load the image, build the operator and the mixing."""
    image = _load_image(args.image)
    mask = parse_psf_spec(args.psf)
    op = BlurOperator(mask, BoundaryCondition(args.bc), image.shape[-2:])
    mixing = _parse_mix(args.mix)
    if image.ndim == 3 and mixing is None:
        mixing = identity_mixing()
    if image.ndim == 2 and mixing is not None:
        raise ConfigError("--mix was given but the image is grayscale")
    return image, op, mixing


def _cmd_blur(args):
    image, op, mixing = _prepare(args)
    if image.ndim == 3:
        blurred = cross_channel_blur(image, mixing, op)
    else:
        blurred = apply_blur(op, image)
    if args.rho > 0:
        blurred, _snr = add_noise(blurred, NoiseSpec(args.rho, args.seed))
    _save_image(args.out, blurred, args.maxval)
    print(f"wrote {args.out}")
    return 0


def _filter_spec(args):
    chosen = [
        name
        for name, value in (
            ("--count", args.count),
            ("--threshold", args.threshold),
            ("--mu", args.mu),
        )
        if value is not None
    ]
    if len(chosen) != 1:
        raise ConfigError("set exactly one of --count, --threshold, --mu")
    if args.method == "tikhonov":
        if args.mu is None:
            raise ConfigError("method tikhonov requires --mu")
        return Tikhonov(args.mu)
    if args.mu is not None:
        raise ConfigError(f"method {args.method} takes --count or --threshold")
    if args.count is not None:
        return TruncateByCount(args.count)
    return TruncateByThreshold(args.threshold)


def _cmd_restore(args):
    image, op, mixing = _prepare(args)
    spec = _filter_spec(args)
    color = image.ndim == 3
    if args.method == "tsd":
        func = color_truncated_sd if color else truncated_sd_restore
    elif args.method == "tsvd":
        func = color_truncated_svd if color else truncated_svd_restore
    else:
        func = color_tikhonov if color else tikhonov_restore
    if color:
        result = func(image, mixing, op, spec)
    else:
        result = func(image, op, spec)
    _save_image(args.out, result.image, args.maxval)
    print(
        f"wrote {args.out} method={result.method} parameter={result.parameter:g} "
        f"kept={result.count_kept} skipped_zero={result.skipped_zero}"
    )
    return 0


def _cmd_sweep(args):
    image, op, mixing = _prepare(args)
    reference = _load_image(args.reference)
    color = image.ndim == 3
    if args.method == "tikhonov":
        grid = np.logspace(np.log10(args.mu_lo), np.log10(args.mu_hi), args.mu_count)
        if color:
            curve = _color_mu_sweep(image, mixing, op, reference, grid)
        else:
            curve = mu_sweep(image, op, reference, grid)
    elif args.method == "tsd":
        if color:
            curve = _color_tsd_sweep(image, mixing, op, reference, args.max_terms)
        else:
            curve = rre_sweep(image, op, reference, args.max_terms)
    else:
        if color:
            curve = _color_tsvd_sweep(image, mixing, op, reference, args.max_terms)
        else:
            curve = svd_rre_sweep(image, op, reference, args.max_terms)
    save_curve_csv(curve, args.out)
    if args.method == "tikhonov":
        best = f"{curve.best_param:.6e}"
    else:
        best = str(int(curve.best_param))
    print(f"wrote {args.out} best_param={best} best_rre={curve.best_rre:.6e}")
    return 0


def _cmd_experiment(args):
    overrides = list(args.set)
    if args.out is not None:
        overrides.append(f"out={args.out}")
    config = load_config(args.config, overrides)
    out = run_experiment(config)
    print(f"wrote {out / 'summary.csv'}")
    return 0


def _add_common(parser, with_method):
    parser.add_argument("--image", required=True, help="input image (.pgm/.ppm/.txt)")
    parser.add_argument("--psf", required=True,
                        help="identity | gaussian:q:sigma | disk:q:radius | file:path")
    parser.add_argument("--bc", required=True, choices=_BC_NAMES,
                        help="boundary rule")
    parser.add_argument("--mix", default=None,
                        help="9 comma separated mixing entries for color images")
    parser.add_argument("--out", required=True, help="output file")
    if with_method:
        parser.add_argument("--method", required=True,
                            choices=("tsd", "tsvd", "tikhonov"))


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="refocus",
        description="Matrix-free image deblurring with boundary-aware spectra.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    blur = sub.add_parser("blur", help="blur an image, optionally adding noise")
    _add_common(blur, with_method=False)
    blur.add_argument("--rho", type=float, default=0.0,
                      help="relative noise level (default 0)")
    blur.add_argument("--seed", type=int, default=0, help="noise seed")
    blur.add_argument("--maxval", type=int, default=255, choices=(255, 65535))
    blur.set_defaults(func=_cmd_blur)

    restore = sub.add_parser("restore", help="restore with one filter setting")
    _add_common(restore, with_method=True)
    restore.add_argument("--count", type=int, default=None,
                         help="keep the k spectrally largest coefficients")
    restore.add_argument("--threshold", type=float, default=None,
                         help="keep coefficients with spectral magnitude >= delta")
    restore.add_argument("--mu", type=float, default=None,
                         help="Tikhonov regularization weight")
    restore.add_argument("--maxval", type=int, default=255, choices=(255, 65535))
    restore.set_defaults(func=_cmd_restore)

    sweep = sub.add_parser("sweep", help="error curve against a reference image")
    _add_common(sweep, with_method=True)
    sweep.add_argument("--reference", required=True,
                       help="ground truth image the error is measured against")
    sweep.add_argument("--max-terms", type=int, default=None,
                       help="cap the number of truncation steps")
    sweep.add_argument("--mu-lo", type=float, default=1e-8)
    sweep.add_argument("--mu-hi", type=float, default=1.0)
    sweep.add_argument("--mu-count", type=int, default=40)
    sweep.set_defaults(func=_cmd_sweep)

    experiment = sub.add_parser("experiment", help="run a config-driven experiment")
    experiment.add_argument("--config", default=None, help="flat key=value file")
    experiment.add_argument("--set", action="append", default=[],
                            metavar="KEY=VALUE", help="override a config key")
    experiment.add_argument("--out", default=None, help="output directory override")
    experiment.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except np.linalg.LinAlgError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except FloatingPointError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
