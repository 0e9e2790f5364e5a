"""Wall-clock benchmarking and log-log scaling fits.

``run_bench`` times one masker over a sweep of batch sizes; ``fit_scaling``
regresses log(median time) on log(batch size) to obtain the scaling factor
``beta``.  ``pixel_scaling`` does the same against the pixel count, scaling
the coarse block size with the image side so the block grids stay fixed.
"""

from __future__ import annotations

import csv
import math
import time
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .methods import METHODS, augment, make_masker
from .pipeline import GbgmConfig
from .rng import as_generator, derive_stream

DEFAULT_BATCHES = (1, 2, 4, 8, 16, 32)
DEFAULT_RESOLUTIONS = (64, 128, 256, 512)
SUBLINEAR_BELOW = 0.9

SAMPLE_COLUMNS = ("method", "batch", "h", "w", "repeat", "elapsed_s")
FIT_COLUMNS = ("method", "beta", "r2", "trend")


@dataclass(frozen=True)
class BenchSample:
    method: str
    batch_size: int
    h: int
    w: int
    repeat_index: int
    elapsed: float

    def __post_init__(self):
        if not self.elapsed > 0:
            raise ValueError(f"elapsed time must be positive, got {self.elapsed}")

    @property
    def resolution(self) -> tuple[int, int]:
        return (self.h, self.w)


@dataclass(frozen=True)
class ScalingFit:
    method: str
    beta: float
    r2: float
    trend: str

    def __post_init__(self):
        if not 0.0 <= self.r2 <= 1.0:
            raise ValueError(f"r2 must lie in [0, 1], got {self.r2}")


def _resolution(resolution) -> tuple[int, int]:
    if isinstance(resolution, (int, np.integer)):
        return int(resolution), int(resolution)
    h, w = resolution
    return int(h), int(w)


def scaled_config(h: int, base: GbgmConfig | None = None) -> GbgmConfig:
    """Copy of ``base`` with ``s1 = h / 8``; ``h`` must be a multiple of 32."""
    base = base or GbgmConfig()
    if h % 32:
        raise ValueError(f"resolution {h} is not a multiple of 32; cannot scale s1 = h/8 to a multiple of 4")
    return GbgmConfig(h // 8, base.ratio1, base.ratio2, base.eps, base.interpolation, base.direction, base.seed)


def run_bench(
    method: str,
    batch_sizes: Sequence[int] = DEFAULT_BATCHES,
    resolution=224,
    repeats: int = 15,
    seed: int = 0,
    config: GbgmConfig | None = None,
    warmup: int = 2,
    workers: int = 1,
) -> list[BenchSample]:
    """Time mask generation plus application on whole batches.

    Input images are synthetic uniform noise drawn from ``seed``; image ``i``
    of every batch is augmented with ``derive_stream(seed, i)``.  Each
    ``(batch, repeat)`` yields one sample, preceded per batch size by
    ``warmup`` untimed runs.  With ``workers > 1`` images within a batch are
    processed by a thread pool and the method is labelled ``name[threads=N]``.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    batch_sizes = [int(b) for b in batch_sizes]
    if not batch_sizes or min(batch_sizes) < 1:
        raise ValueError("batch sizes must be positive")
    if repeats < 1:
        raise ValueError("repeats must be positive")
    h, w = _resolution(resolution)
    masker = make_masker(method, config)
    images = as_generator(seed).random((max(batch_sizes), h, w, 3))
    label = method if workers <= 1 else f"{method}[threads={workers}]"
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def run_batch(b: int) -> float:
        gens = [derive_stream(seed, i).generator() for i in range(b)]
        t0 = time.perf_counter()
        if pool is None:
            for i in range(b):
                augment(images[i], masker, gens[i])
        else:
            list(pool.map(lambda i: augment(images[i], masker, gens[i]), range(b)))
        return time.perf_counter() - t0

    samples = []
    try:
        for b in batch_sizes:
            for _ in range(warmup):
                run_batch(b)
            for r in range(repeats):
                samples.append(BenchSample(label, b, h, w, r, run_batch(b)))
    finally:
        if pool is not None:
            pool.shutdown()
    return samples


def loglog_fit(x: Sequence[float], t: Sequence[float], method: str = "") -> ScalingFit:
    """OLS of ``ln t`` on ``ln x``: slope is ``beta``, ``r2`` from residuals."""
    lx = np.log(np.asarray(x, dtype=np.float64))
    lt = np.log(np.asarray(t, dtype=np.float64))
    if np.unique(lx).size < 2:
        raise ValueError("need at least 2 distinct x values to fit a scaling law")
    res = stats.linregress(lx, lt)
    beta = float(res.slope)
    resid = lt - (res.intercept + res.slope * lx)
    ss_tot = float(np.sum((lt - lt.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    trend = "Sublinear" if beta < SUBLINEAR_BELOW else "Linear"
    return ScalingFit(method, beta, r2, trend)


def _median_by(samples: Iterable[BenchSample], key) -> tuple[str, list[float], list[float]]:
    groups = defaultdict(list)
    methods = set()
    for s in samples:
        groups[key(s)].append(s.elapsed)
        methods.add(s.method)
    if len(methods) > 1:
        raise ValueError(f"samples mix several methods: {sorted(methods)}")
    xs = sorted(groups)
    if len(xs) < 2:
        raise ValueError("need at least 2 distinct settings to fit a scaling law")
    return methods.pop(), xs, [float(np.median(groups[x])) for x in xs]


def fit_scaling(samples: Iterable[BenchSample]) -> ScalingFit:
    """Scaling of median batch time with batch size."""
    method, xs, ts = _median_by(samples, lambda s: s.batch_size)
    return loglog_fit(xs, ts, method)


def fit_pixel_scaling(samples: Iterable[BenchSample]) -> ScalingFit:
    """Scaling of median time with pixel count ``h * w``."""
    method, xs, ts = _median_by(samples, lambda s: s.h * s.w)
    return loglog_fit(xs, ts, method)


def run_pixel_bench(
    method: str,
    resolutions: Sequence[int] = DEFAULT_RESOLUTIONS,
    seed: int = 0,
    repeats: int = 15,
    batch_size: int = 1,
    config: GbgmConfig | None = None,
) -> list[BenchSample]:
    """``run_bench`` at each square resolution with ``s1`` scaled to ``h / 8``."""
    if len(resolutions) < 3:
        raise ValueError("pixel scaling needs at least 3 resolutions")
    samples = []
    for r in resolutions:
        samples += run_bench(method, [batch_size], r, repeats, seed, scaled_config(int(r), config))
    return samples


def pixel_scaling(
    method: str,
    resolutions: Sequence[int] = DEFAULT_RESOLUTIONS,
    seed: int = 0,
    repeats: int = 15,
    batch_size: int = 1,
) -> ScalingFit:
    return fit_pixel_scaling(run_pixel_bench(method, resolutions, seed, repeats, batch_size))


def emit_csv(records: Sequence, path, kind: str | None = None) -> None:
    """Write samples or fits as CSV.

    Columns are ``method,batch,h,w,repeat,elapsed_s`` for samples and
    ``method,beta,r2,trend`` for fits.  Floats use Python's shortest
    round-trip repr, so re-reading reproduces them bit for bit.  ``kind``
    ("samples" or "fits") is only needed for an empty list.
    """
    records = list(records)
    if kind is None:
        kind = "fits" if records and isinstance(records[0], ScalingFit) else "samples"
    if kind == "samples":
        rows = [(s.method, s.batch_size, s.h, s.w, s.repeat_index, repr(s.elapsed)) for s in records]
        header = SAMPLE_COLUMNS
    elif kind == "fits":
        rows = [(f.method, repr(f.beta), repr(f.r2), f.trend) for f in records]
        header = FIT_COLUMNS
    else:
        raise ValueError(f"kind must be 'samples' or 'fits', got {kind!r}")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _read_rows(path, columns):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != columns:
            raise ValueError(f"{path}: expected header {','.join(columns)}, got {header}")
        return list(reader)


def read_samples_csv(path) -> list[BenchSample]:
    return [
        BenchSample(m, int(b), int(h), int(w), int(r), float(e))
        for m, b, h, w, r, e in _read_rows(path, SAMPLE_COLUMNS)
    ]


def read_fits_csv(path) -> list[ScalingFit]:
    return [ScalingFit(m, float(b), float(r2), t) for m, b, r2, t in _read_rows(path, FIT_COLUMNS)]


def describe(fit: ScalingFit) -> str:
    return f"{fit.method}: beta={fit.beta:.3f} (R^2={fit.r2:.3f}) {fit.trend}"


def throughput(samples: Iterable[BenchSample]) -> float:
    """Images per second summed over all samples."""
    samples = list(samples)
    total = math.fsum(s.elapsed for s in samples)
    return sum(s.batch_size for s in samples) / total if total else float("nan")
