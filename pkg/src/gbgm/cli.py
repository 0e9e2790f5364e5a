"""Command-line interface: ``gbgm {mask,batch,bench,viz}``.

Exit codes: 0 success, 1 usage error (bad flags, bad config file, invalid
parameters), 2 runtime error (unreadable input, incompatible image size,
write failure).  Messages go to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .bench import (
    DEFAULT_BATCHES,
    DEFAULT_RESOLUTIONS,
    describe,
    emit_csv,
    fit_pixel_scaling,
    fit_scaling,
    run_bench,
    run_pixel_bench,
)
from .imageio import ingest_dir, load_image, resize_image, save_image
from .methods import METHODS, make_masker, mask_dataset
from .pipeline import DIRECTIONS, FILLS, INTERPOLATIONS, GbgmConfig, apply_mask, gbgm_trace
from .rng import derive_stream

SEED_ENV = "GBGM_SEED"

# config-file key -> parser; keys equal the long flag names with '-' -> '_'
CONFIG_KEYS = {
    "method": str,
    "s1": int,
    "ratio": float,
    "ratio2": float,
    "eps": float,
    "interp": str,
    "direction": str,
    "seed": int,
    "fill": str,
    "workers": int,
}

DEFAULTS = {
    "method": "gbgm",
    "s1": 32,
    "ratio": 0.10,
    "ratio2": 0.10,
    "eps": 1e-6,
    "interp": "nearest",
    "direction": DIRECTIONS[0],
    "fill": "zero",
    "workers": 1,
}


class UsageError(Exception):
    pass


class ConfigFileError(ValueError):
    pass


def parse_config_file(path) -> dict:
    """Typed overlay from ``key = value`` lines; ``#`` starts a comment."""
    overlay = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = (p.strip() for p in line.partition("="))
            if not sep or not key:
                raise ConfigFileError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            if key not in CONFIG_KEYS:
                raise ConfigFileError(f"{path}:{lineno}: unknown key {key!r}; known keys: {', '.join(CONFIG_KEYS)}")
            try:
                overlay[key] = CONFIG_KEYS[key](value)
            except ValueError:
                kind = CONFIG_KEYS[key].__name__
                raise ConfigFileError(f"{path}:{lineno}: malformed value {value!r} for {key} (expected {kind})") from None
    return overlay


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _size(text: str) -> tuple[int, int]:
    h, sep, w = text.lower().partition("x")
    try:
        size = (int(h), int(w)) if sep else (int(h), int(h))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected HxW or N, got {text!r}") from None
    if min(size) < 1:
        raise argparse.ArgumentTypeError(f"size must be positive, got {text!r}")
    return size


def _loader(size):
    if size is None:
        return load_image
    return lambda path: resize_image(load_image(path), *size)


def _mask_flags(p: argparse.ArgumentParser, with_method: bool = True) -> None:
    g = p.add_argument_group("masking parameters (override --config)")
    if with_method:
        g.add_argument("--method", choices=METHODS, help="masker (default gbgm)")
    g.add_argument("--s1", type=int, help="coarse block size; patch size of single/random (default 32)")
    g.add_argument("--ratio", type=float, help="stage-1 / single-stage mask ratio (default 0.10)")
    g.add_argument("--ratio2", type=float, help="stage-2 mask ratio (default 0.10)")
    g.add_argument("--eps", type=float, help="stabiliser of the importance map (default 1e-6)")
    g.add_argument("--interp", choices=INTERPOLATIONS, help="upsampling of the low-res mask (default nearest)")
    g.add_argument("--direction", choices=DIRECTIONS, help="which purity extreme is targeted (default mask_lowest)")
    g.add_argument("--seed", type=int, help=f"master seed (default ${SEED_ENV} or 0)")
    g.add_argument("--config", type=Path, help="file of 'key = value' lines")
    if p.prog.split()[-1] != "bench":
        g.add_argument("--resize", type=_size, metavar="HxW", help="bilinear pre-resize of inputs (default: none)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gbgm", description="Granular-ball guided masking and baseline maskers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="{mask,batch,bench,viz}")

    p = sub.add_parser("mask", help="mask one image")
    p.add_argument("input", type=Path)
    p.add_argument("--out", type=Path, required=True, help="keep-mask output (.pgm/.png; 0 = masked)")
    p.add_argument("--masked", type=Path, help="also write the masked image here")
    p.add_argument("--index", type=int, default=0, help="stream index; matches batch index (default 0)")
    p.add_argument("--fill", choices=FILLS, help="fill of masked pixels (default zero)")
    _mask_flags(p)

    p = sub.add_parser("batch", help="mask every image of a directory")
    p.add_argument("input_dir", type=Path)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--glob", default="*", help="file pattern; ** recurses (default *)")
    p.add_argument("--workers", type=int, help="worker threads (default 1)")
    p.add_argument("--masked", action="store_true", help="also write masked images")
    p.add_argument("--fill", choices=FILLS, help="fill of masked pixels (default zero)")
    _mask_flags(p)

    p = sub.add_parser("bench", help="time maskers and fit scaling factors")
    p.add_argument("--methods", default="gbgm", help="comma-separated methods (default gbgm)")
    p.add_argument("--batches", type=_int_list, default=list(DEFAULT_BATCHES), help="comma-separated batch sizes")
    p.add_argument("--resolution", type=int, default=224, help="square image side (default 224)")
    p.add_argument("--repeats", type=int, default=15)
    p.add_argument("--workers", type=int, help="threads per batch (default 1)")
    p.add_argument("--pixel-scaling", action="store_true", help="sweep resolutions instead of batch sizes")
    p.add_argument("--resolutions", type=_int_list, default=list(DEFAULT_RESOLUTIONS))
    p.add_argument("--out", type=Path, help="samples CSV")
    p.add_argument("--fits-out", type=Path, help="fits CSV")
    _mask_flags(p, with_method=False)

    p = sub.add_parser("viz", help="write the intermediate maps of one gbgm run")
    p.add_argument("input", type=Path)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--ball-radius", type=float, default=0.05, help="radius threshold of the ball panel")
    _mask_flags(p, with_method=False)
    return parser


def _env_seed() -> int:
    text = os.environ.get(SEED_ENV)
    if text is None or not text.strip():
        return 0
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={text!r} is not an integer") from None


def resolve_settings(args) -> dict:
    """Defaults < config file < flags."""
    settings = dict(DEFAULTS, seed=_env_seed())
    if getattr(args, "config", None) is not None:
        try:
            settings.update(parse_config_file(args.config))
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        except ConfigFileError as exc:
            raise UsageError(str(exc)) from None
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if settings["method"] not in METHODS:
        raise UsageError(f"unknown method {settings['method']!r}; choose from {', '.join(METHODS)}")
    if settings["fill"] not in FILLS:
        raise UsageError(f"fill must be one of {FILLS}, got {settings['fill']!r}")
    if settings["workers"] < 1:
        raise UsageError("workers must be positive")
    if settings["s1"] < 1:
        raise UsageError(f"s1 must be positive, got {settings['s1']}")
    return settings


def make_config(settings: dict) -> tuple[GbgmConfig, int | None]:
    """GbgmConfig plus the patch-size override for single-scale methods."""
    gbgm = settings["method"] == "gbgm"
    try:
        config = GbgmConfig(
            settings["s1"] if gbgm else DEFAULTS["s1"],
            settings["ratio"],
            settings["ratio2"],
            settings["eps"],
            settings["interp"],
            settings["direction"],
            settings["seed"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return config, None if gbgm else settings["s1"]


def _cmd_mask(args) -> int:
    settings = resolve_settings(args)
    config, single_s = make_config(settings)
    masker = make_masker(settings["method"], config, single_s)
    image = _loader(args.resize)(args.input)
    mask = masker(image, derive_stream(settings["seed"], args.index).generator())
    save_image(mask, args.out)
    if args.masked is not None:
        save_image(apply_mask(image, mask, settings["fill"]), args.masked)
    return 0


def _output_name(root: Path, path: Path, suffix: str) -> Path:
    rel = path.relative_to(root)
    return rel.with_name(rel.name + suffix)


def _cmd_batch(args) -> int:
    settings = resolve_settings(args)
    config, single_s = make_config(settings)
    masker = make_masker(settings["method"], config, single_s)
    entries = ingest_dir(args.input_dir, args.glob)
    if not entries:
        raise RuntimeError(f"no files matching {args.glob!r} under {args.input_dir}")
    load = _loader(args.resize)
    masks = mask_dataset(entries, masker, settings["seed"], settings["workers"], load)
    for entry, mask in zip(entries, masks):
        target = args.out_dir / _output_name(args.input_dir, entry.path, ".mask.pgm")
        target.parent.mkdir(parents=True, exist_ok=True)
        save_image(mask, target)
        if args.masked:
            masked = apply_mask(load(entry.path), mask, settings["fill"])
            save_image(masked, args.out_dir / _output_name(args.input_dir, entry.path, ".masked.png"))
    print(f"masked {len(entries)} images into {args.out_dir}")
    return 0


def _cmd_bench(args) -> int:
    settings = resolve_settings(args)
    config, _ = make_config(dict(settings, method="gbgm"))
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if not methods or unknown:
        raise UsageError(f"--methods must list names from {', '.join(METHODS)}; got {args.methods!r}")
    if args.repeats < 1:
        raise UsageError("--repeats must be positive")
    samples, fits = [], []
    for method in methods:
        if args.pixel_scaling:
            run = run_pixel_bench(method, args.resolutions, settings["seed"], args.repeats, config=config)
            fit = fit_pixel_scaling(run) if len(set(args.resolutions)) > 1 else None
        else:
            run = run_bench(
                method, args.batches, args.resolution, args.repeats, settings["seed"], config,
                workers=settings["workers"],
            )
            fit = fit_scaling(run) if len(set(args.batches)) > 1 else None
        samples += run
        if fit is not None:
            fits.append(fit)
            print(describe(fit))
    if args.out is not None:
        emit_csv(samples, args.out, kind="samples")
    if args.fits_out is not None:
        emit_csv(fits, args.fits_out, kind="fits")
    return 0


def _cmd_viz(args) -> int:
    from .viz import write_panels

    settings = resolve_settings(args)
    config, _ = make_config(dict(settings, method="gbgm"))
    image = _loader(args.resize)(args.input)
    trace = gbgm_trace(image, config, derive_stream(settings["seed"], args.index).generator())
    for path in write_panels(image, trace, args.out_dir, args.ball_radius).values():
        print(path)
    return 0


COMMANDS = {"mask": _cmd_mask, "batch": _cmd_batch, "bench": _cmd_bench, "viz": _cmd_viz}


def run(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        if not argv:
            parser.print_help(sys.stderr)
            return 1
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"gbgm: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
