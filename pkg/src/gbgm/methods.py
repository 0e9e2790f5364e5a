"""Name-based dispatch over all maskers, and dataset-level batch masking.

Every masker maps ``(image, generator) -> (H, W)`` uint8 keep-mask.  The
GBGM-style settings (``s1``, ``ratio1``) double as the patch size and
ratio of the ``single`` and ``random`` methods so they are directly
comparable.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from . import baselines
from .imageio import DatasetEntry, load_image
from .pipeline import GbgmConfig, apply_mask, gbgm_mask, single_stage_mask
from .rng import derive_stream

METHODS = ("gbgm", "single", "erasing", "gridmask", "has", "random")

Masker = Callable[[np.ndarray, np.random.Generator], np.ndarray]


def make_masker(method: str, config: GbgmConfig | None = None, single_s: int | None = None) -> Masker:
    """Bind ``method`` to its parameters.

    ``single_s`` overrides the patch size of ``single``/``random`` (defaults
    to ``config.s1``), since those variants do not need the multiple-of-4
    constraint of the two-stage pipeline.
    """
    config = config or GbgmConfig()
    s = single_s if single_s is not None else config.s1
    if method == "gbgm":
        return lambda img, rng: gbgm_mask(img, config, rng)
    if method == "single":
        return lambda img, rng: single_stage_mask(img, s, config.ratio1)
    if method == "erasing":
        return lambda img, rng: baselines.random_erasing_keep(np.shape(img), rng)
    if method == "gridmask":
        return lambda img, rng: baselines.gridmask_keep(np.shape(img), rng)
    if method == "has":
        return lambda img, rng: baselines.hide_and_seek_keep(np.shape(img), rng)
    if method == "random":
        return lambda img, rng: baselines.random_patch_keep(np.shape(img), s, config.ratio1, rng)
    raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def augment(image, masker: Masker, rng: np.random.Generator, fill: str = "zero") -> np.ndarray:
    """Generate a mask and apply it; what the benchmark times per image."""
    return apply_mask(image, masker(image, rng), fill)


def mask_dataset(
    entries: Sequence[DatasetEntry],
    masker: Masker,
    seed: int,
    workers: int = 1,
    loader=load_image,
) -> list[np.ndarray]:
    """Masks for every entry, in entry order.

    Entry ``i`` always uses stream ``derive_stream(seed, entry.index)``, so
    the result does not depend on ``workers``.
    """

    def one(entry: DatasetEntry) -> np.ndarray:
        return masker(loader(entry.path), derive_stream(seed, entry.index).generator())

    if workers <= 1:
        return [one(e) for e in entries]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, entries))
