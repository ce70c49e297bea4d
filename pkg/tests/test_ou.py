import numpy as np
import pytest

from rdhsort import GrayImage, TauConfig
from rdhsort.errors import ExtractionError
from rdhsort.ou import ClampDirection, OuClass, classify_pixel, fix_red, restore_red, yellow_mask


class TestClassify:
    def test_fig4(self):
        tau = TauConfig(2, 2)
        assert classify_pixel(253, 254, tau) is OuClass.GREEN
        assert classify_pixel(1, 0, tau) is OuClass.GREEN
        assert classify_pixel(255, 254, tau) is OuClass.YELLOW

    def test_zero_tau_all_green(self):
        h, hp = np.meshgrid(np.arange(256), np.arange(256))
        assert not yellow_mask(h, hp, TauConfig()).any()

    def test_mask_agrees(self):
        tau = TauConfig(13, 5)
        h, hp = np.meshgrid(np.arange(256), np.arange(256))
        mask = yellow_mask(h, hp, tau)
        for a, b in [(0, 3), (20, 12), (255, 251), (200, 252), (10, 10)]:
            assert mask[b, a] == (classify_pixel(a, b, tau) is OuClass.YELLOW)

    def test_green_stays_green_after_shift(self):
        tau = TauConfig(3, 4)
        for hp in range(256):
            for h in range(256):
                if classify_pixel(h, hp, tau) is OuClass.GREEN:
                    moved = h + 1 if h >= hp else h - 1
                    if 0 <= moved <= 255:
                        assert classify_pixel(moved, hp, tau) is OuClass.GREEN

    def test_tau_range(self):
        with pytest.raises(ValueError):
            TauConfig(-1, 0)
        with pytest.raises(ValueError):
            TauConfig(0, 256)


class TestFixRestore:
    def test_identity(self):
        a = np.arange(64).reshape(8, 8)
        fixed, entries = fix_red(a, 0)
        assert entries == [] and np.array_equal(fixed.pixels, a)

    def test_clamps(self):
        a = np.full((8, 8), 100)
        a[1, 2], a[5, 5] = 256, -1
        fixed, entries = fix_red(a, 3)
        assert fixed.pixels[1, 2] == 255 and fixed.pixels[5, 5] == 0
        assert [(e.pass_index, e.raster_index, e.direction) for e in entries] == [
            (3, 10, ClampDirection.FROM_256), (3, 45, ClampDirection.FROM_MINUS_1)]

    def test_round_trip(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            a = rng.integers(-1, 257, (8, 8))
            fixed, entries = fix_red(a, 1)
            assert np.array_equal(restore_red(fixed, entries), a)

    def test_restore_empty(self):
        img = GrayImage(np.zeros((8, 8), np.uint8))
        assert np.array_equal(restore_red(img, []), img.pixels)

    def test_restore_mismatch(self):
        a = np.full((8, 8), 100)
        a[0, 0] = 256
        _, entries = fix_red(a, 0)
        with pytest.raises(ExtractionError):
            restore_red(np.full((8, 8), 100), entries)

    def test_out_of_contract(self):
        with pytest.raises(ValueError):
            fix_red(np.full((8, 8), 257), 0)
