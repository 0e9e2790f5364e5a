"""Image panels of a two-stage run.

``write_panels`` dumps the original image, the coarse grid overlay, a
granular-ball partition, purity heatmaps, ``M1``, ``M2``, the importance
maps and both final masks.  Scalar maps are stored as 16-bit PGM with these
scale factors:

============================  ===========================
file                          stored value
============================  ===========================
``purity1.pgm``/``purity2``   ``round(purity * 65535)``
``importance.pgm``            ``round(I / 9 * 65535)``
``importance_norm.pgm``       ``round(I_hat * 65535)``
============================  ===========================

Binary masks are 8-bit PGM with 0/255.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .balls import cover, cover_labels
from .imageio import save_image
from .pipeline import GbgmTrace, apply_mask, check_image

WIDE = {"maxval": 65535}


def _rgb(image) -> np.ndarray:
    img = check_image(image)
    if img.ndim == 2:
        img = img[:, :, None]
    return np.repeat(img, 3, axis=2) if img.shape[2] == 1 else img.copy()


def grid_overlay(image, block_size: int, color=(1.0, 0.0, 0.0)) -> np.ndarray:
    """RGB copy of ``image`` with one-pixel block boundaries drawn in ``color``."""
    out = _rgb(image)
    out[::block_size, :, :] = color
    out[:, ::block_size, :] = color
    out[-1, :, :] = color
    out[:, -1, :] = color
    return out


def heat_colors(values) -> np.ndarray:
    """Black-red-yellow-white ramp for values in [0, 1]."""
    v = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    return np.stack([np.clip(3 * v, 0, 1), np.clip(3 * v - 1, 0, 1), np.clip(3 * v - 2, 0, 1)], axis=-1)


def block_heatmap(scores, h: int, w: int) -> np.ndarray:
    """Block scores scaled by their maximum, coloured and blown up to ``h x w``."""
    s = np.asarray(scores, dtype=np.float64)
    top = s.max()
    norm = s / top if top > 0 else np.zeros_like(s)
    full = np.repeat(np.repeat(norm, h // s.shape[0], axis=0), w // s.shape[1], axis=1)
    return heat_colors(full)


def ball_partition(trace: GbgmTrace, max_radius: float = 0.05) -> tuple[np.ndarray, int]:
    """Granular-ball cover of the fine blocks in (mean intensity, purity) space.

    Returns an ``(H, W)`` image where each block shows the mean intensity of
    its ball, and the number of balls.
    """
    fine = trace.fine
    s = fine.block_size
    means = trace.intensity.reshape(fine.rows, s, fine.cols, s).mean(axis=(1, 3))
    feats = np.column_stack([means.ravel(), trace.purity2.ravel()])
    balls = cover(feats, max_radius)
    labels = cover_labels(balls, feats.shape[0])
    shade = np.array([b.center[0] for b in balls])[labels].reshape(fine.shape)
    return np.repeat(np.repeat(shade, s, axis=0), s, axis=1), len(balls)


def write_panels(image, trace: GbgmTrace, out_dir, ball_radius: float = 0.05) -> dict[str, Path]:
    """Write every panel into ``out_dir``; returns file name -> path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    h, w = trace.intensity.shape
    balls, _ = ball_partition(trace, ball_radius)
    panels = {
        "original.png": (_rgb(image), {}),
        "grid.png": (grid_overlay(image, trace.coarse.block_size), {}),
        "balls.png": (balls, {}),
        "heatmap.png": (block_heatmap(trace.purity1, h, w), {}),
        "purity1.pgm": (trace.purity1, WIDE),
        "purity2.pgm": (trace.purity2, WIDE),
        "m1.pgm": (trace.m1, {}),
        "m2.pgm": (trace.m2, {}),
        # counts run 0..9
        "importance.pgm": (trace.importance / 9, WIDE),
        "importance_norm.pgm": (trace.norm_importance, WIDE),
        "lowres.pgm": (trace.lowres, {}),
        "mask.pgm": (trace.mask, {}),
        "masked.png": (apply_mask(image, trace.mask), {}),
    }
    written = {}
    for name, (arr, kw) in panels.items():
        path = out / name
        save_image(arr, path, **kw)
        written[name] = path
    return written
