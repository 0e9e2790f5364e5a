"""Granular-ball guided masking.

The two-stage generator works on an intensity image split into ``s1 x s1``
blocks:

1. every block gets a purity score (mean absolute deviation of its central
   patch from the whole-block mean) and ``k1`` blocks are selected into the
   coarse mask ``M1``;
2. blocks *not* selected in ``M1`` are split into 2x2 sub-blocks of side
   ``s1 / 2``, scored the same way, and ``k2`` of those candidates form the
   fine mask ``M2``;
3. a 3x3 all-ones convolution counts marked neighbours, the counts are
   min-max normalised and compared against uniform noise to give a
   low-resolution mask, which is finally upsampled to ``H x W``.

In the output mask 1 keeps a pixel and 0 removes it.

Block counts follow ``k = max(1, round_half_up(ratio * n))`` and ties are
broken by row-major block index, so every stage is deterministic apart from
the single noise draw in stage 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .rng import RngLike, as_generator, uniform_open

MASK_LOWEST = "mask_lowest"
MASK_HIGHEST = "mask_highest"
DIRECTIONS = (MASK_LOWEST, MASK_HIGHEST)
INTERPOLATIONS = ("nearest", "bilinear")
FILLS = ("zero", "mean")

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def check_image(image) -> np.ndarray:
    """Validate an image array and return it as float64.

    Accepted layouts are ``(H, W)`` and ``(H, W, C)`` with ``C`` in {1, 3};
    values must be finite and lie in [0, 1].
    """
    img = np.asarray(image, dtype=np.float64)
    if img.ndim == 3:
        if img.shape[2] not in (1, 3):
            raise ValueError(f"images need 1 or 3 channels, got {img.shape[2]}")
    elif img.ndim != 2:
        raise ValueError(f"expected an (H, W) or (H, W, C) image, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"image has an empty dimension: {img.shape}")
    # NaN fails both comparisons, so this also rejects non-finite values
    if not (img.min() >= 0.0 and img.max() <= 1.0):
        raise ValueError("image values must be finite and lie in [0, 1]")
    return img


def to_intensity(image) -> np.ndarray:
    """Single-channel intensity in [0, 1]; RGB is reduced with Rec. 601 luma.

    Gray pixels (r == g == b) keep their value exactly.
    """
    img = check_image(image)
    if img.ndim == 2:
        return img.copy()
    if img.shape[2] == 1:
        return img[:, :, 0].copy()
    wr, wg, wb = LUMA_WEIGHTS
    # elementwise in a fixed order: a BLAS dot may fuse or reorder and change the last bit
    out = wr * img[:, :, 0]
    out += wg * img[:, :, 1]
    out += wb * img[:, :, 2]
    # weights are positive and sum to 1, so only rounding can overshoot 1
    np.minimum(out, 1.0, out=out)
    # rounding also moves gray pixels (white gives 0.9999999999999999); pin them
    r, g, b = img[:, :, 0], img[:, :, 1], img[:, :, 2]
    np.copyto(out, r, where=(r == g) & (g == b))
    return out


@dataclass(frozen=True)
class GridSpec:
    block_size: int
    rows: int
    cols: int

    @property
    def n_blocks(self) -> int:
        return self.rows * self.cols

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def height(self) -> int:
        return self.rows * self.block_size

    @property
    def width(self) -> int:
        return self.cols * self.block_size


def partition_grid(h: int, w: int, s: int) -> GridSpec:
    if s < 1 or h < 1 or w < 1:
        raise ValueError(f"sizes must be positive, got h={h}, w={w}, s={s}")
    bad = [f"{name}={v}" for name, v in (("h", h), ("w", w)) if v % s]
    if bad:
        raise ValueError(
            f"block size must divide image dimensions: s={s} does not divide {', '.join(bad)}"
        )
    return GridSpec(s, h // s, w // s)


def central_patch_side(block_size: int) -> int:
    """Central patch used for a block: half the block side, even, at least 2."""
    c = max(2, block_size // 2)
    return c - (c % 2)


def block_purity(intensity, grid: GridSpec, central_patch: int) -> np.ndarray:
    """Purity score of every block, shape ``grid.shape``.

    score = mean over the centred ``c x c`` patch of |pixel - block mean|,
    where the mean is taken over the whole block.  Constant blocks score 0
    and the score grows with local heterogeneity.

    Pixels are taken as offsets from the block's top-left pixel and summed
    one by one in row-major order, so every implementation (including the
    compiled kernel) produces the same bits and breaks ties identically.
    """
    x = np.asarray(intensity, dtype=np.float64)
    s, c = grid.block_size, central_patch
    if x.shape != (grid.height, grid.width):
        raise ValueError(f"intensity shape {x.shape} does not match grid {grid}")
    if c < 1 or c % 2:
        raise ValueError(f"central patch side must be a positive even integer, got {c}")
    if c > s:
        raise ValueError(f"central patch side {c} exceeds block size {s}")
    if (s - c) % 2:
        raise ValueError(f"central patch side {c} cannot be centred in a block of side {s}")
    return _purity(x, s, c)


def _row_major_sum(blocks: np.ndarray) -> np.ndarray:
    """Sum of each ``(R, a, C, b)`` block, adding pixels one by one in row-major order.

    ``np.sum`` may use pairwise or vectorised orders, so equal-in-theory
    scores could differ in the last bit and break ties differently from the
    compiled kernel.  ``cumsum`` is sequential by definition.
    """
    r, a, c, b = blocks.shape
    flat = blocks.transpose(0, 2, 1, 3).reshape(r, c, a * b)
    return np.cumsum(flat, axis=2)[:, :, -1]


def _purity(x: np.ndarray, s: int, c: int) -> np.ndarray:
    blocks = x.reshape(x.shape[0] // s, s, x.shape[1] // s, s)
    # offsets from the block's top-left pixel: constant blocks give exact zeros
    d = blocks - blocks[:, :1, :, :1]
    mu = _row_major_sum(d)
    mu /= s * s
    o = (s - c) // 2
    dev = d[:, o:o + c, :, o:o + c] - mu[:, None, :, None]
    np.abs(dev, out=dev)
    out = _row_major_sum(dev)
    out /= c * c
    return out


def mask_budget(ratio: float, n: int) -> int:
    """``max(1, round_half_up(ratio * n))`` capped at ``n``; zero when ``n == 0``."""
    if n <= 0:
        return 0
    return min(n, max(1, math.floor(ratio * n + 0.5)))


def select_blocks(scores, ratio: float, direction: str = MASK_LOWEST, candidates=None) -> np.ndarray:
    """Mark ``mask_budget(ratio, n)`` blocks with 1.

    ``mask_lowest`` picks the lowest scores, ``mask_highest`` the highest;
    equal scores are taken in ascending row-major order.  When ``candidates``
    (a boolean array shaped like ``scores``) is given, only those blocks are
    eligible and ``n`` is their count.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must lie in (0, 1), got {ratio}")
    scores = np.asarray(scores, dtype=np.float64)
    flat = scores.ravel()
    if candidates is None:
        idx = np.arange(flat.size)
    else:
        cand = np.asarray(candidates, dtype=bool)
        if cand.shape != scores.shape:
            raise ValueError("candidates must have the same shape as scores")
        idx = np.flatnonzero(cand.ravel())
    return _select(flat, idx, mask_budget(ratio, idx.size), direction == MASK_LOWEST).reshape(scores.shape)


def _select(flat: np.ndarray, idx: np.ndarray, k: int, lowest: bool) -> np.ndarray:
    key = flat[idx] if lowest else -flat[idx]
    # stable sort keeps row-major order among ties
    chosen = idx[np.argsort(key, kind="stable")[:k]]
    bits = np.zeros(flat.size, dtype=np.uint8)
    bits[chosen] = 1
    return bits


@dataclass(frozen=True)
class GbgmConfig:
    """Parameters of the two-stage generator.

    Defaults reproduce the 224 x 224 setting: 32-pixel coarse blocks (7x7),
    16-pixel fine blocks (14x14), 10% budgets at both stages.
    """

    s1: int = 32
    ratio1: float = 0.10
    ratio2: float = 0.10
    eps: float = 1e-6
    interpolation: str = "nearest"
    direction: str = MASK_LOWEST
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.s1, (int, np.integer)) or self.s1 < 4 or self.s1 % 4:
            # s2 = s1/2 must itself be even to host a centred even patch
            raise ValueError(f"s1 must be a positive multiple of 4, got {self.s1}")
        for name in ("ratio1", "ratio2"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if not 0.0 < self.eps < 0.5:
            raise ValueError(f"eps must lie in (0, 0.5), got {self.eps}")
        if self.interpolation not in INTERPOLATIONS:
            raise ValueError(f"interpolation must be one of {INTERPOLATIONS}, got {self.interpolation!r}")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def s2(self) -> int:
        return self.s1 // 2


def refine_mask(intensity, m1, config: GbgmConfig) -> np.ndarray:
    """Fine mask over the ``s1 / 2`` grid.

    Only fine blocks lying inside coarse blocks with ``m1 == 0`` are
    candidates; ``mask_budget(config.ratio2, n_candidates)`` of them are
    selected with ``config.direction``.  All other cells are 0.
    """
    x = np.asarray(intensity, dtype=np.float64)
    m1 = np.asarray(m1)
    coarse = partition_grid(x.shape[0], x.shape[1], config.s1)
    if m1.shape != coarse.shape:
        raise ValueError(f"m1 shape {m1.shape} does not match the {coarse.rows}x{coarse.cols} coarse grid")
    return _refine(x, m1, config)


def _refine(x: np.ndarray, m1: np.ndarray, config: GbgmConfig) -> np.ndarray:
    s2 = config.s2
    rows, cols = x.shape[0] // s2, x.shape[1] // s2
    rejected = np.broadcast_to((m1 == 0)[:, None, :, None], (m1.shape[0], 2, m1.shape[1], 2))
    idx = np.flatnonzero(rejected)
    if idx.size == 0:
        return np.zeros((rows, cols), dtype=np.uint8)
    scores = _purity(x, s2, central_patch_side(s2)).ravel()
    k = mask_budget(config.ratio2, idx.size)
    return _select(scores, idx, k, config.direction == MASK_LOWEST).reshape(rows, cols)


def importance_conv(m2) -> np.ndarray:
    """3x3 all-ones convolution with zero padding; values are counts in 0..9."""
    m = np.asarray(m2)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D mask, got shape {m.shape}")
    p = np.zeros((m.shape[0] + 2, m.shape[1] + 2), dtype=np.int64)
    p[1:-1, 1:-1] = m
    # separable box sum: rows then columns
    r = p[:-2] + p[1:-1] + p[2:]
    return r[:, :-2] + r[:, 1:-1] + r[:, 2:]


def normalize_importance(importance, eps: float) -> np.ndarray:
    """Min-max normalisation into [0, 1); constant maps become all zeros."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return _normalize(np.asarray(importance, dtype=np.float64), eps)


def _normalize(i: np.ndarray, eps: float) -> np.ndarray:
    lo = i.min()
    out = i - lo
    out /= i.max() - lo + eps
    return out


def stochastic_threshold(norm_importance, eps: float, rng: RngLike = None) -> np.ndarray:
    """Bit 1 where ``norm_importance < R`` with ``R ~ U(eps, 1 - eps)``.

    One uniform is drawn per cell in row-major order.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 0.5), got {eps}")
    imp = np.asarray(norm_importance, dtype=np.float64)
    return _threshold(imp, eps, as_generator(rng))


def _threshold(imp: np.ndarray, eps: float, gen: np.random.Generator) -> np.ndarray:
    r = uniform_open(gen, eps, 1.0 - eps, imp.shape)
    return (imp < r).view(np.uint8)


def _linear_weights(n_out: int, n_in: int) -> np.ndarray:
    """Half-pixel-centre linear interpolation matrix, in units of ``1 / (2 * n_out / n_in)``.

    With ``n_out = a * n_in`` every source coordinate is a multiple of
    ``1 / (2a)``, so integer weights make the interpolation exact and the
    0.5 threshold is decided without rounding.
    """
    unit = 2 * (n_out // n_in)
    # source coordinate times `unit`: (k + 0.5) / a - 0.5
    src = np.clip(2 * np.arange(n_out) + 1 - n_out // n_in, 0, unit * (n_in - 1))
    i0 = src // unit
    i1 = np.minimum(i0 + 1, n_in - 1)
    frac = src - i0 * unit
    w = np.zeros((n_out, n_in), dtype=np.int64)
    rows = np.arange(n_out)
    np.add.at(w, (rows, i0), unit - frac)
    np.add.at(w, (rows, i1), frac)
    return w


def upsample_mask(lowres, h: int, w: int, mode: str = "nearest") -> np.ndarray:
    """Resize a low-resolution binary mask to ``h x w``.

    ``nearest`` replicates each cell into a constant block.  ``bilinear``
    interpolates with half-pixel centres (edge-clamped) and binarises at 0.5,
    ties going to 1.
    """
    m = np.asarray(lowres)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D mask, got shape {m.shape}")
    rows, cols = m.shape
    if h % rows or w % cols:
        raise ValueError(f"cannot upsample a {rows}x{cols} mask to {h}x{w}: sizes must be multiples")
    if mode == "nearest":
        a, b = h // rows, w // cols
        return np.broadcast_to(m.astype(np.uint8)[:, None, :, None], (rows, a, cols, b)).reshape(h, w)
    if mode == "bilinear":
        vals = _linear_weights(h, rows) @ (m != 0).astype(np.int64) @ _linear_weights(w, cols).T
        # vals is the interpolated value times (2h/rows) * (2w/cols)
        return (2 * vals >= (2 * h // rows) * (2 * w // cols)).astype(np.uint8)
    raise ValueError(f"mode must be one of {INTERPOLATIONS}, got {mode!r}")


@dataclass
class GbgmTrace:
    """Every intermediate of one two-stage run."""

    intensity: np.ndarray
    coarse: GridSpec
    fine: GridSpec
    purity1: np.ndarray
    m1: np.ndarray
    purity2: np.ndarray
    m2: np.ndarray
    importance: np.ndarray
    norm_importance: np.ndarray
    lowres: np.ndarray
    mask: np.ndarray
    config: GbgmConfig = field(repr=False)


def gbgm_trace(image, config: GbgmConfig | None = None, rng: RngLike = None) -> GbgmTrace:
    """Run the full pipeline, keeping the intermediates.

    ``rng`` defaults to stream 0 of ``config.seed``.
    """
    config = config or GbgmConfig()
    gen = as_generator(config.seed if rng is None else rng)
    x = to_intensity(image)
    h, w = x.shape
    coarse = partition_grid(h, w, config.s1)
    fine = partition_grid(h, w, config.s2)
    p1 = block_purity(x, coarse, central_patch_side(config.s1))
    m1 = select_blocks(p1, config.ratio1, config.direction)
    m2 = refine_mask(x, m1, config)
    # purity over the whole fine grid is kept for visualisation only
    p2 = block_purity(x, fine, central_patch_side(config.s2))
    imp = importance_conv(m2)
    norm = normalize_importance(imp, config.eps)
    low = stochastic_threshold(norm, config.eps, gen)
    mask = upsample_mask(low, h, w, config.interpolation)
    return GbgmTrace(x, coarse, fine, p1, m1, p2, m2, imp, norm, low, mask, config)


def _stage_masks_numpy(x: np.ndarray, config: GbgmConfig) -> tuple[np.ndarray, np.ndarray]:
    h, w = x.shape
    p1 = _purity(x, config.s1, central_patch_side(config.s1)).ravel()
    k1 = mask_budget(config.ratio1, p1.size)
    m1 = _select(p1, np.arange(p1.size), k1, config.direction == MASK_LOWEST).reshape(h // config.s1, w // config.s1)
    return m1, _refine(x, m1, config)


def gbgm_mask(image, config: GbgmConfig | None = None, rng: RngLike = None) -> np.ndarray:
    """Full-resolution ``(H, W)`` uint8 mask; 1 keeps a pixel, 0 removes it.

    Same result as ``gbgm_trace(...).mask`` without keeping intermediates;
    stages 1-2 run through compiled kernels when numba is installed.
    """
    config = config or GbgmConfig()
    gen = as_generator(config.seed if rng is None else rng)
    x = to_intensity(image)
    h, w = x.shape
    partition_grid(h, w, config.s1)
    if _kernels.AVAILABLE:
        _, m2 = _kernels.stage_masks(
            x, config.s1, central_patch_side(config.s1), config.s2, central_patch_side(config.s2),
            config.ratio1, config.ratio2, config.direction == MASK_LOWEST,
        )
        norm = _kernels.normalized_importance(m2, config.eps)
    else:
        _, m2 = _stage_masks_numpy(x, config)
        norm = _normalize(importance_conv(m2).astype(np.float64), config.eps)
    return upsample_mask(_threshold(norm, config.eps, gen), h, w, config.interpolation)


def single_stage_mask(image, s: int = 4, ratio: float = 0.10) -> np.ndarray:
    """Small-image variant: zero the lowest-purity ``s x s`` patches.

    Exactly ``mask_budget(ratio, n_patches)`` patches are removed; there is
    no stochastic stage.
    """
    x = to_intensity(image)
    grid = partition_grid(x.shape[0], x.shape[1], s)
    scores = block_purity(x, grid, central_patch_side(s))
    keep = 1 - select_blocks(scores, ratio, MASK_LOWEST)
    return upsample_mask(keep, x.shape[0], x.shape[1], "nearest")


def apply_mask(image, mask, fill: str = "zero") -> np.ndarray:
    """Apply a full-resolution mask to every channel.

    ``zero`` multiplies by the mask; ``mean`` replaces removed pixels with the
    per-channel mean of the input image.
    """
    img = check_image(image)
    m = np.asarray(mask)
    if m.shape != img.shape[:2]:
        raise ValueError(f"mask shape {m.shape} does not match image shape {img.shape[:2]}")
    keep = m != 0
    if img.ndim == 3:
        # materialise per channel; a broadcast over a length-3 axis is slow
        keep = np.repeat(keep.ravel(), img.shape[2]).reshape(img.shape)
    if fill == "zero":
        return img * keep
    if fill == "mean":
        means = img.mean(axis=(0, 1))
        return np.where(keep, img, means)
    raise ValueError(f"fill must be one of {FILLS}, got {fill!r}")
