"""
Baseline maskers
================

Random Erasing, GridMask, Hide-and-Seek and random patch dropping, each with
its published default parameters.  Every baseline takes a seed (or stream)
and returns a keep-mask; the image-level wrappers zero-fill the rest.
"""

import numpy as np

from gbgm import (
    GridMaskParams,
    HideAndSeekParams,
    RandomErasingParams,
    derive_stream,
    gridmask_keep,
    gridmask_pattern,
    hide_and_seek_keep,
    random_erasing_keep,
    random_patch_keep,
)

shape = (224, 224)
n = 2000
makers = {
    "random erasing": lambda g: random_erasing_keep(shape, g, RandomErasingParams()),
    "gridmask": lambda g: gridmask_keep(shape, g, GridMaskParams()),
    "hide-and-seek": lambda g: hide_and_seek_keep(shape, g, HideAndSeekParams()),
    "random patch 10%": lambda g: random_patch_keep(shape, 32, 0.10, g),
}
for name, make in makers.items():
    dropped = np.mean([(make(derive_stream(s, 0)) == 0).mean() for s in range(n)])
    print(f"{name:18s} mean dropped fraction {dropped:.3f}")

# GridMask is a deterministic pattern once unit and phase are drawn
pattern = gridmask_pattern((16, 16), d=8, keep_ratio=0.5)
print(pattern)
print("dropped:", (pattern == 0).mean())   # (4/8)^2 = 0.25
