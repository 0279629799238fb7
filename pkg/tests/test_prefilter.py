"""Noise-reduction filters against naive oracles."""

import numpy as np
import pytest

from depthmatte.errors import BadKernel
from depthmatte.frames import ColorFrame
from depthmatte.prefilter import (PrefilterConfig, bilateral, gaussian_blur,
                                  gaussian_kernel, median_blur)

from oracles import conv2d_reference, median_reference


def _constant_frame(value=(0.3, 0.6, 0.9, 1.0), w=9, h=7):
    px = np.empty((h, w, 4), dtype=np.float32)
    px[:] = value
    return ColorFrame(px)


def _random_frame(rng, w, h):
    return ColorFrame(rng.random((h, w, 4)).astype(np.float32))


class TestGaussian:
    def test_constant_unchanged_exactly(self):
        frame = _constant_frame()
        out = gaussian_blur(frame, sigma=1.3, ksize=5)
        assert np.array_equal(out.pixels, frame.pixels)

    def test_ksize_1_identity(self):
        rng = np.random.default_rng(0)
        frame = _random_frame(rng, 6, 5)
        out = gaussian_blur(frame, sigma=2.0, ksize=1)
        assert np.array_equal(out.pixels, frame.pixels)

    def test_matches_naive_2d_oracle(self):
        rng = np.random.default_rng(1)
        frame = _random_frame(rng, 7, 7)
        out = gaussian_blur(frame, sigma=1.2, ksize=5)
        k1 = gaussian_kernel(1.2, 5)
        k2 = np.outer(k1, k1)
        for c in range(3):
            ref = conv2d_reference(frame.pixels[..., c], k2)
            np.testing.assert_allclose(out.pixels[..., c], ref, atol=1e-6)

    def test_alpha_untouched(self):
        rng = np.random.default_rng(2)
        frame = _random_frame(rng, 8, 8)
        out = gaussian_blur(frame, sigma=1.0, ksize=3)
        assert np.array_equal(out.alpha, frame.alpha)

    def test_bad_kernel(self):
        frame = _constant_frame()
        with pytest.raises(BadKernel):
            gaussian_blur(frame, sigma=1.0, ksize=4)
        with pytest.raises(BadKernel):
            gaussian_blur(frame, sigma=1.0, ksize=0)
        with pytest.raises(ValueError):
            gaussian_blur(frame, sigma=0.0, ksize=3)

    def test_output_in_range(self):
        rng = np.random.default_rng(3)
        frame = _random_frame(rng, 12, 9)
        out = gaussian_blur(frame, sigma=0.8, ksize=7)
        assert out.pixels.min() >= 0.0 and out.pixels.max() <= 1.0


class TestMedian:
    def test_salt_pixel_removed(self):
        px = np.zeros((7, 7, 4), dtype=np.float32)
        px[..., 3] = 1.0
        px[3, 3, :3] = 1.0
        out = median_blur(ColorFrame(px), ksize=3)
        assert np.all(out.pixels[3, 3, :3] == 0.0)

    def test_constant_unchanged_exactly(self):
        frame = _constant_frame()
        out = median_blur(frame, ksize=5)
        assert np.array_equal(out.pixels, frame.pixels)

    def test_matches_sort_oracle_exactly(self):
        rng = np.random.default_rng(4)
        frame = _random_frame(rng, 9, 9)
        out = median_blur(frame, ksize=3)
        for c in range(3):
            ref = median_reference(frame.pixels[..., c], 3)
            np.testing.assert_array_equal(out.pixels[..., c], ref)

    def test_bad_kernel(self):
        with pytest.raises(BadKernel):
            median_blur(_constant_frame(), ksize=2)


class TestBilateral:
    def test_constant_unchanged_exactly(self):
        frame = _constant_frame()
        out = bilateral(frame, radius=3, sigma_color=0.1, sigma_space=1.5)
        assert np.array_equal(out.pixels, frame.pixels)

    def test_radius_0_identity(self):
        rng = np.random.default_rng(5)
        frame = _random_frame(rng, 6, 6)
        out = bilateral(frame, radius=0, sigma_color=0.1, sigma_space=1.0)
        assert np.array_equal(out.pixels, frame.pixels)

    def test_edge_preserved_flats_smoothed(self):
        # step edge much taller than sigma_color: position of the max
        # gradient must not move while flat-region noise shrinks
        rng = np.random.default_rng(6)
        h, w = 16, 24
        px = np.empty((h, w, 4), dtype=np.float32)
        base = np.where(np.arange(w) < w // 2, 0.15, 0.85).astype(np.float32)
        noise = rng.normal(0, 0.02, size=(h, w)).astype(np.float32)
        for c in range(3):
            px[..., c] = np.clip(base[None, :] + noise, 0, 1)
        px[..., 3] = 1.0
        frame = ColorFrame(px)
        out = bilateral(frame, radius=3, sigma_color=0.05, sigma_space=2.0)

        def grad_argmax(plane):
            return int(np.abs(np.diff(plane.mean(axis=0))).argmax())

        assert grad_argmax(out.pixels[..., 0]) == grad_argmax(px[..., 0])
        left_before = px[:, :w // 2 - 2, 0].std()
        left_after = out.pixels[:, :w // 2 - 2, 0].std()
        assert left_after < left_before

    def test_bad_parameters(self):
        frame = _constant_frame()
        with pytest.raises(BadKernel):
            bilateral(frame, radius=-1, sigma_color=0.1, sigma_space=1.0)
        with pytest.raises(BadKernel):
            bilateral(frame, radius=2, sigma_color=0.0, sigma_space=1.0)
        with pytest.raises(BadKernel):
            bilateral(frame, radius=2, sigma_color=0.1, sigma_space=-2.0)

    def test_output_in_range(self):
        rng = np.random.default_rng(7)
        frame = _random_frame(rng, 10, 8)
        out = bilateral(frame, radius=2, sigma_color=0.2, sigma_space=1.0)
        assert out.pixels.min() >= 0.0 and out.pixels.max() <= 1.0


class TestConfig:
    def test_none_is_passthrough(self):
        frame = _constant_frame()
        assert PrefilterConfig().apply(frame) is frame

    def test_dispatch(self):
        rng = np.random.default_rng(8)
        frame = _random_frame(rng, 8, 8)
        for kind in ("gaussian", "median", "bilateral"):
            out = PrefilterConfig(kind=kind).apply(frame)
            assert out.pixels.shape == frame.pixels.shape

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            PrefilterConfig(kind="boxcar")

    def test_dict_round_trip(self):
        cfg = PrefilterConfig(kind="median", median_ksize=5)
        assert PrefilterConfig.from_dict(cfg.to_dict()) == cfg
