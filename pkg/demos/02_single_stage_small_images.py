"""
Single-stage masking for small images
=====================================

On 32 x 32 inputs the generator skips the second stage: the image is split
into 4 x 4 patches (an 8 x 8 grid) and the lowest-purity 10% of them are
removed.  Compare against random patch dropping with the same budget.
"""

import numpy as np

from gbgm import apply_mask, random_patch_keep, single_stage_mask

rng = np.random.default_rng(3)
image = np.zeros((32, 32, 3))
image[:, :16] = 0.8                           # flat left half
image[:, 16:] = rng.random((32, 16, 3))       # textured right half

keep = single_stage_mask(image, s=4, ratio=0.10)
patches = keep[::4, ::4]
print("patches removed:", int((patches == 0).sum()))    # round(6.4) = 6
print(patches)
# removed patches sit in the flat half: they carry the least structure

keep20 = single_stage_mask(image, s=4, ratio=0.20)
print("with ratio 0.20:", int((keep20[::4, ::4] == 0).sum()), "patches")   # round(12.8) = 13

baseline = random_patch_keep(image.shape, s=4, ratio=0.10, rng=0)
print("random baseline\n", baseline[::4, ::4])

masked = apply_mask(image, keep, fill="mean")
print("masked pixels now hold the channel means:", masked[keep == 0][0])
