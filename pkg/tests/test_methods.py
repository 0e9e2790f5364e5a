import numpy as np
import pytest

from gbgm.imageio import ingest_dir, save_image
from gbgm.methods import METHODS, augment, make_masker, mask_dataset
from gbgm.pipeline import GbgmConfig, gbgm_mask
from gbgm.rng import derive_stream


@pytest.fixture
def dataset(tmp_path):
    rng = np.random.default_rng(0)
    for i in range(12):
        save_image(rng.random((32, 32, 3)), tmp_path / f"img_{i:02d}.ppm")
    return ingest_dir(tmp_path)


class TestMakeMasker:
    @pytest.mark.parametrize("method", METHODS)
    def test_every_method_gives_binary_mask(self, method):
        img = np.random.default_rng(1).random((64, 64, 3))
        mask = make_masker(method, GbgmConfig(s1=8))(img, np.random.default_rng(2))
        assert mask.shape == (64, 64) and set(np.unique(mask)) <= {0, 1}

    def test_unknown(self):
        with pytest.raises(ValueError, match="unknown method"):
            make_masker("cutmix")

    def test_single_patch_override(self):
        img = np.random.default_rng(1).random((30, 30))
        mask = make_masker("single", GbgmConfig(ratio1=0.1), single_s=6)(img, None)
        assert (mask == 0).sum() == 36 * 3  # round(0.1 * 25) = 3 patches of 6x6

    def test_augment_applies_mask(self):
        img = np.random.default_rng(3).random((16, 16, 3))
        out = augment(img, make_masker("gbgm", GbgmConfig(s1=4)), np.random.default_rng(0))
        assert out.shape == img.shape and np.all((out == img) | (out == 0))


class TestMaskDataset:
    def test_thread_count_does_not_matter(self, dataset):
        masker = make_masker("gbgm", GbgmConfig(s1=8))
        one = mask_dataset(dataset, masker, seed=9, workers=1)
        many = mask_dataset(dataset, masker, seed=9, workers=4)
        assert len(one) == 12
        for a, b in zip(one, many):
            np.testing.assert_array_equal(a, b)

    def test_entry_uses_its_own_stream(self, dataset):
        from gbgm.imageio import load_image

        cfg = GbgmConfig(s1=8)
        masks = mask_dataset(dataset, make_masker("gbgm", cfg), seed=4)
        e = dataset[7]
        np.testing.assert_array_equal(masks[7], gbgm_mask(load_image(e.path), cfg, derive_stream(4, 7)))

    def test_subset_keeps_masks(self, dataset):
        masker = make_masker("has", GbgmConfig())
        full = mask_dataset(dataset, masker, seed=1)
        part = mask_dataset(dataset[5:], masker, seed=1)
        for a, b in zip(full[5:], part):
            np.testing.assert_array_equal(a, b)
