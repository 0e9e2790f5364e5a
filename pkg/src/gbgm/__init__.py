"""Granular-ball guided masking (GBGM).

Structure-aware two-stage mask generation for image augmentation, the
single-stage variant, baseline maskers, image I/O and a scaling benchmark.
"""

__version__ = "0.1.0"

from .balls import GranularBall, SplitThreshold, ball_center, ball_radius, cover, cover_labels, split_ball
from .baselines import (
    GridMaskParams,
    HideAndSeekParams,
    RandomErasingParams,
    gridmask,
    gridmask_keep,
    gridmask_pattern,
    hide_and_seek,
    hide_and_seek_keep,
    random_erasing,
    random_erasing_keep,
    random_patch_keep,
    random_patch_mask,
)
from .bench import (
    BenchSample,
    ScalingFit,
    emit_csv,
    fit_pixel_scaling,
    fit_scaling,
    loglog_fit,
    pixel_scaling,
    read_fits_csv,
    read_samples_csv,
    run_bench,
    run_pixel_bench,
)
from .imageio import CorruptImageError, DatasetEntry, ImageFormatError, ingest_dir, load_image, save_image
from .methods import METHODS, augment, make_masker, mask_dataset
from .pipeline import (
    MASK_HIGHEST,
    MASK_LOWEST,
    GbgmConfig,
    GbgmTrace,
    GridSpec,
    apply_mask,
    block_purity,
    central_patch_side,
    gbgm_mask,
    gbgm_trace,
    importance_conv,
    mask_budget,
    normalize_importance,
    partition_grid,
    refine_mask,
    select_blocks,
    single_stage_mask,
    stochastic_threshold,
    to_intensity,
    upsample_mask,
)
from .rng import RngStream, as_generator, derive_stream
