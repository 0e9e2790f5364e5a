"""Baseline information-dropping augmentations.

Each method comes as a ``*_keep(shape, rng, ...)`` function returning an
``(H, W)`` uint8 keep-mask (0 = erased) and an image-level wrapper that
zero-fills the erased pixels.  Default parameters follow the published
settings of the original methods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pipeline import apply_mask, check_image, mask_budget, partition_grid
from .rng import RngLike, as_generator


def _check_range(name, lo, hi, low_bound=0.0, high_bound=math.inf):
    if not (low_bound <= lo <= hi <= high_bound):
        raise ValueError(f"{name} range must satisfy {low_bound} <= lo <= hi <= {high_bound}, got ({lo}, {hi})")


def _check_prob(name, p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")


@dataclass(frozen=True)
class RandomErasingParams:
    p: float = 0.5
    area: tuple[float, float] = (0.02, 0.33)
    aspect: tuple[float, float] = (0.3, 3.33)
    max_tries: int = 100

    def __post_init__(self):
        _check_prob("p", self.p)
        _check_range("area", *self.area, low_bound=0.0, high_bound=1.0)
        if self.area[1] <= 0:
            raise ValueError("area range must contain positive values")
        _check_range("aspect", *self.aspect)
        if self.aspect[0] <= 0:
            raise ValueError("aspect ratios must be positive")


@dataclass(frozen=True)
class GridMaskParams:
    d: tuple[int, int] = (96, 224)
    keep_ratio: float = 0.6

    def __post_init__(self):
        _check_range("d", *self.d, low_bound=1)
        if not 0.0 < self.keep_ratio <= 1.0:
            raise ValueError(f"keep_ratio must lie in (0, 1], got {self.keep_ratio}")


@dataclass(frozen=True)
class HideAndSeekParams:
    patch: int = 16
    hide_prob: float = 0.5

    def __post_init__(self):
        if self.patch < 1:
            raise ValueError(f"patch must be positive, got {self.patch}")
        _check_prob("hide_prob", self.hide_prob)


def random_erasing_keep(shape, rng: RngLike = None, params: RandomErasingParams | None = None) -> np.ndarray:
    """At most one rectangle erased, with probability ``params.p``.

    Area fraction is uniform in ``params.area`` and aspect ratio log-uniform
    in ``params.aspect``.  Rectangles that do not fit are redrawn up to
    ``max_tries`` times, after which nothing is erased.
    """
    params = params or RandomErasingParams()
    rng = as_generator(rng)
    h, w = shape[:2]
    mask = np.ones((h, w), dtype=np.uint8)
    if rng.random() >= params.p:
        return mask
    log_lo, log_hi = math.log(params.aspect[0]), math.log(params.aspect[1])
    for _ in range(params.max_tries):
        target = rng.uniform(*params.area) * h * w
        aspect = math.exp(rng.uniform(log_lo, log_hi))
        eh = int(round(math.sqrt(target * aspect)))
        ew = int(round(math.sqrt(target / aspect)))
        if 0 < eh <= h and 0 < ew <= w:
            top = int(rng.integers(0, h - eh + 1))
            left = int(rng.integers(0, w - ew + 1))
            mask[top:top + eh, left:left + ew] = 0
            return mask
    return mask


def gridmask_pattern(shape, d: int, keep_ratio: float, offset=(0, 0)) -> np.ndarray:
    """Deterministic grid of square holes: side ``round(d * (1 - r))``, period ``d``."""
    h, w = shape[:2]
    hole = int(round(d * (1.0 - keep_ratio)))
    ys = (np.arange(h) - offset[0]) % d < hole
    xs = (np.arange(w) - offset[1]) % d < hole
    return (~(ys[:, None] & xs[None, :])).astype(np.uint8)


def gridmask_keep(shape, rng: RngLike = None, params: GridMaskParams | None = None) -> np.ndarray:
    """Unit ``d`` drawn uniformly from ``params.d``, phase uniform in ``[0, d)``."""
    params = params or GridMaskParams()
    rng = as_generator(rng)
    d = int(rng.integers(params.d[0], params.d[1] + 1))
    oy, ox = (int(v) for v in rng.integers(0, d, size=2))
    return gridmask_pattern(shape, d, params.keep_ratio, (oy, ox))


def hide_and_seek_keep(shape, rng: RngLike = None, params: HideAndSeekParams | None = None) -> np.ndarray:
    params = params or HideAndSeekParams()
    rng = as_generator(rng)
    h, w = shape[:2]
    grid = partition_grid(h, w, params.patch)
    keep = (rng.random(grid.shape) >= params.hide_prob).astype(np.uint8)
    return np.repeat(np.repeat(keep, params.patch, axis=0), params.patch, axis=1)


def random_patch_keep(shape, s: int = 4, ratio: float = 0.10, rng: RngLike = None) -> np.ndarray:
    """Erase ``mask_budget(ratio, n)`` patches chosen uniformly without replacement."""
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must lie in (0, 1), got {ratio}")
    rng = as_generator(rng)
    h, w = shape[:2]
    grid = partition_grid(h, w, s)
    k = mask_budget(ratio, grid.n_blocks)
    keep = np.ones(grid.n_blocks, dtype=np.uint8)
    keep[rng.choice(grid.n_blocks, size=k, replace=False)] = 0
    keep = keep.reshape(grid.shape)
    return np.repeat(np.repeat(keep, s, axis=0), s, axis=1)


def random_erasing(image, rng: RngLike = None, params: RandomErasingParams | None = None) -> np.ndarray:
    img = check_image(image)
    return apply_mask(img, random_erasing_keep(img.shape, rng, params))


def gridmask(image, rng: RngLike = None, params: GridMaskParams | None = None) -> np.ndarray:
    img = check_image(image)
    return apply_mask(img, gridmask_keep(img.shape, rng, params))


def hide_and_seek(image, rng: RngLike = None, params: HideAndSeekParams | None = None) -> np.ndarray:
    img = check_image(image)
    return apply_mask(img, hide_and_seek_keep(img.shape, rng, params))


def random_patch_mask(image, s: int = 4, ratio: float = 0.10, rng: RngLike = None) -> np.ndarray:
    img = check_image(image)
    return apply_mask(img, random_patch_keep(img.shape, s, ratio, rng))
