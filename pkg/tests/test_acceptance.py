"""Acceptance criteria, one test per criterion.

Each test records its outcome and wall time; ``conftest.py`` prints one
PASS/FAIL line per criterion at the end of the run.  Time limits are the
stated budgets and are asserted too.
"""

import functools
import time

import numpy as np
import pytest

import reference as ref
from gbgm.baselines import (
    GridMaskParams,
    HideAndSeekParams,
    RandomErasingParams,
    gridmask_keep,
    hide_and_seek_keep,
    random_erasing_keep,
    random_patch_keep,
)
from gbgm.bench import BenchSample, emit_csv, fit_scaling, pixel_scaling, read_samples_csv
from gbgm.imageio import ingest_dir, load_image, save_image
from gbgm.methods import make_masker, mask_dataset
from gbgm.pipeline import (
    GbgmConfig,
    block_purity,
    gbgm_mask,
    importance_conv,
    partition_grid,
    select_blocks,
    single_stage_mask,
    stochastic_threshold,
)
from gbgm.rng import derive_stream

RESULTS = {}


def criterion(number, title, budget_s=None):
    """Record pass/fail and elapsed time of an acceptance test."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                detail = fn(*args, **kwargs)
                elapsed = time.perf_counter() - t0
                if budget_s is not None:
                    assert elapsed < budget_s, f"took {elapsed:.1f} s, budget {budget_s} s"
            except BaseException as exc:
                RESULTS[number] = (False, title, time.perf_counter() - t0, f"{type(exc).__name__}: {exc}")
                raise
            RESULTS[number] = (True, title, elapsed, detail or "")

        return run

    return wrap


@criterion(1, "grid arithmetic", budget_s=1)
def test_grid_arithmetic():
    assert partition_grid(224, 224, 32).shape == (7, 7)
    assert partition_grid(224, 224, 16).shape == (14, 14)
    assert partition_grid(32, 32, 4).shape == (8, 8)
    rng = np.random.default_rng(1)
    for _ in range(20):
        cfg = GbgmConfig(s1=4 * int(rng.integers(1, 17)))
        h, w = cfg.s1 * rng.integers(1, 12, size=2)
        n1 = partition_grid(int(h), int(w), cfg.s1).n_blocks
        n2 = partition_grid(int(h), int(w), cfg.s2).n_blocks
        assert n2 == 4 * n1
    return "7x7, 14x14, 8x8; N2 = 4 N1 on 20 configs"


@criterion(2, "purity properties", budget_s=5)
def test_purity_properties():
    rng = np.random.default_rng(2)
    worst = 0.0
    for k in range(1000):
        s = int(rng.choice([2, 4, 8, 16]))
        grid = partition_grid(s, s, s)
        c = max(2, s // 2)
        const = np.full((s, s), rng.random())
        assert block_purity(const, grid, c)[0, 0] == 0.0
        # dyadic pixels and shifts keep x + shift exact, so purity must not move at all
        block = rng.integers(0, 512, (s, s)) / 1024
        shift = int(rng.integers(0, 512)) / 1024
        assert block_purity(block + shift, grid, c)[0, 0] == block_purity(block, grid, c)[0, 0]
        x = rng.random((s, s))
        alpha = rng.random()
        p, q = block_purity(x, grid, c)[0, 0], block_purity(alpha * x, grid, c)[0, 0]
        assert p >= 0.0
        if p > 0:
            worst = max(worst, abs(q - alpha * p) / (alpha * p))
    assert worst <= 1e-12
    return f"1000 blocks; worst scale error {worst:.1e}"


@criterion(3, "oracle equivalence", budget_s=30)
def test_oracle_equivalence():
    cfg = GbgmConfig(s1=8)
    for k in range(100):
        img = np.random.default_rng(3000 + k).random((64, 64, 3))
        want = ref.two_stage(img, 8, cfg.ratio1, cfg.ratio2, cfg.eps, derive_stream(3, k).generator())
        np.testing.assert_array_equal(gbgm_mask(img, cfg, derive_stream(3, k)), want)
        np.testing.assert_array_equal(single_stage_mask(img, 4, 0.1), ref.single_stage(img, 4, 0.1))
    return "100 images, both maskers bit-identical"


@criterion(4, "stochastic-threshold law", budget_s=30)
def test_stochastic_threshold_law():
    eps = 1e-6
    levels = np.array([[0.1, 0.5, 0.9]])
    hits = np.zeros(3)
    n = 10_000
    for seed in range(n):
        hits += stochastic_threshold(levels, eps, derive_stream(seed, 0))[0]
    expect = (1 - eps - levels[0]) / (1 - 2 * eps)
    np.testing.assert_allclose(hits / n, expect, atol=0.02)
    return "P(bit=1) = " + ", ".join(f"{p:.4f}" for p in hits / n)


@criterion(5, "convolution vs brute force")
def test_convolution():
    rng = np.random.default_rng(5)
    for _ in range(200):
        m = rng.integers(0, 2, size=rng.integers(1, 21, size=2)).astype(np.uint8)
        np.testing.assert_array_equal(importance_conv(m), ref.box_count(m.tolist()))
    return "200 masks up to 20x20"


@criterion(6, "determinism across runs and threads")
def test_determinism(tmp_path):
    rng = np.random.default_rng(6)
    for i in range(50):
        save_image(rng.random((64, 64, 3)), tmp_path / f"img_{i:03d}.ppm")
    entries = ingest_dir(tmp_path)
    masker = make_masker("gbgm", GbgmConfig(s1=16))
    first = mask_dataset(entries, masker, seed=42, workers=1)
    second = mask_dataset(entries, masker, seed=42, workers=1)
    threaded = mask_dataset(entries, masker, seed=42, workers=8)
    assert len(first) == 50
    for a, b, c in zip(first, second, threaded):
        np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(a, c)
    return "50 images; 1 thread x2 and 8 threads identical"


@criterion(7, "regression recovery", budget_s=1)
def test_regression_recovery():
    out = []
    for beta in (0.5, 0.601, 1.0):
        samples = [BenchSample("synthetic", b, 224, 224, r, 0.0042 * b**beta)
                   for b in (1, 2, 4, 8, 16, 32) for r in range(15)]
        fit = fit_scaling(samples)
        assert abs(fit.beta - beta) < 1e-9
        assert fit.r2 == 1.0
        out.append(f"{fit.beta:.9f}")
    return "recovered " + ", ".join(out)


@pytest.mark.slow
@criterion(8, "linear in pixels", budget_s=120)
def test_linear_in_pixels():
    fit = pixel_scaling("gbgm", (64, 128, 256, 512), seed=0, repeats=15)
    assert 0.7 <= fit.beta <= 1.3, f"beta = {fit.beta:.3f}"
    return f"beta = {fit.beta:.3f}, R^2 = {fit.r2:.3f}"


@criterion(9, "mask-budget exactness")
def test_mask_budget():
    rng = np.random.default_rng(9)
    cases = {(8, 0.10): 6, (8, 0.20): 13, (7, 0.10): 5, (7, 0.20): 10}
    for (n, ratio), k in cases.items():
        assert select_blocks(rng.random((n, n)), ratio).sum() == k
        assert select_blocks(np.zeros((n, n)), ratio).sum() == k
    for ratio, k in ((0.10, 6), (0.20, 13)):
        assert (single_stage_mask(rng.random((32, 32)), 4, ratio)[::4, ::4] == 0).sum() == k
    return "6, 13, 5, 10"


@criterion(10, "baseline sanity")
def test_baselines():
    n = 10_000
    erase = RandomErasingParams(p=0.5, area=(0.25, 0.25), aspect=(1.0, 1.0))
    grid = GridMaskParams()
    has = HideAndSeekParams(patch=4, hide_prob=0.5)
    zeroed = {"erasing": 0.0, "gridmask": 0.0, "has": 0.0, "random": 0.0}
    for seed in range(n):
        g = derive_stream(seed, 0)
        zeroed["erasing"] += (random_erasing_keep((32, 32), g, erase) == 0).mean()
        zeroed["gridmask"] += (gridmask_keep((224, 224), g, grid) == 0).mean()
        zeroed["has"] += (hide_and_seek_keep((32, 32), g, has) == 0).mean()
        zeroed["random"] += (random_patch_keep((32, 32), 4, 0.1, g) == 0).mean()
    # with a uniform phase, each axis is covered hole/d of the time on average
    ds = np.arange(grid.d[0], grid.d[1] + 1)
    holes = np.round(ds * (1 - grid.keep_ratio))
    expect = {
        "erasing": 0.5 * 256 / 1024,
        "gridmask": float(np.mean((holes / ds) ** 2)),
        "has": 0.5,
        "random": 6 / 64,
    }
    for name, total in zeroed.items():
        assert abs(total / n - expect[name]) <= 0.02, (name, total / n, expect[name])
    for seed in range(20):
        keep = gridmask_keep((300, 300), seed, GridMaskParams(d=(20, 60)))
        d = next(d for d in range(20, 61) if np.array_equal(keep[d:], keep[:-d]))
        np.testing.assert_array_equal(keep[:, d:], keep[:, :-d])
    return ", ".join(f"{k} {zeroed[k] / n:.4f}/{v:.4f}" for k, v in expect.items())


@criterion(11, "I/O round trips")
def test_io_round_trips(tmp_path):
    x = np.random.default_rng(11).random((17, 23))
    save_image(x, tmp_path / "x.pgm")
    err = np.abs(load_image(tmp_path / "x.pgm")[:, :, 0] - x).max()
    assert err <= 1 / 255
    rng = np.random.default_rng(12)
    samples = [BenchSample("gbgm[threads=2]", b, 224, 224, r, float(rng.exponential(1e-3)))
               for b in (1, 2, 4) for r in range(5)]
    emit_csv(samples, tmp_path / "b.csv")
    back = read_samples_csv(tmp_path / "b.csv")
    assert back == samples
    assert all(a.elapsed.hex() == b.elapsed.hex() for a, b in zip(samples, back))
    return f"PGM max error {err * 255:.3f}/255; CSV bit-exact"
