"""Coverage from depth, color adjustment, and the matte pass."""


import numpy as np
import pytest
from hypothesis import given, strategies as st

from depthmatte.errors import DimensionMismatch, ValidationError
from depthmatte.frames import ColorFrame, DepthFrame
from depthmatte.matte import (MatteParams, alpha_map, apply_gain, apply_gamma,
                              compute_alpha, matte_pass)
from depthmatte.rgbd_io import SceneSpec, silhouette_mask, synth_scene

from oracles import smoothstep_reference


class TestComputeAlpha:
    def test_below_threshold_opaque(self):
        assert compute_alpha(1.0, 1.5, 0.0) == 1.0

    def test_at_threshold_inclusive(self):
        assert compute_alpha(1.5, 1.5, 0.0) == 1.0

    def test_beyond_threshold_transparent(self):
        assert compute_alpha(1.51, 1.5, 0.0) == 0.0

    def test_midpoint(self):
        assert compute_alpha(1.2, 1.0, 0.4) == pytest.approx(0.5, abs=1e-9)

    def test_quarter_point_direct_evaluation(self):
        # t = 0.25: 1 - (3*0.0625 - 2*0.015625) = 0.84375
        assert compute_alpha(1.1, 1.0, 0.4) == pytest.approx(0.84375, abs=1e-12)

    def test_invalid_depth_default_transparent(self):
        assert compute_alpha(float("nan"), 1.0, 0.5) == 0.0
        assert compute_alpha(float("inf"), 1.0, 0.5) == 0.0
        assert compute_alpha(-0.5, 1.0, 0.5) == 0.0
        assert compute_alpha(0.0, 1.0, 0.5) == 0.0

    def test_invalid_depth_alpha_configurable(self):
        assert compute_alpha(float("nan"), 1.0, 0.5, invalid_alpha=0.25) == 0.25

    def test_endpoint_anchoring(self):
        for rolloff in (0.1, 0.25, 0.4, 1.0):
            assert compute_alpha(1.0, 1.0, rolloff) == pytest.approx(1.0, abs=1e-9)
            assert compute_alpha(1.0 + rolloff, 1.0, rolloff) == pytest.approx(0.0, abs=1e-9)

    def test_matches_smoothstep_reference(self):
        for t in np.linspace(0, 1, 21):
            d = 1.0 + t * 0.5
            expected = 1.0 - smoothstep_reference(t)
            assert compute_alpha(d, 1.0, 0.5) == pytest.approx(expected, abs=1e-12)

    @given(st.floats(0.01, 5.0), st.floats(0.0, 5.0), st.floats(0.0, 1.0))
    def test_range(self, d, threshold, rolloff):
        a = compute_alpha(d, threshold, rolloff)
        assert 0.0 <= a <= 1.0

    @given(st.floats(0.0, 5.0), st.floats(0.001, 1.0),
           st.floats(0.01, 5.0), st.floats(0.01, 5.0))
    def test_monotone_non_increasing(self, threshold, rolloff, d1, d2):
        lo, hi = sorted((d1, d2))
        assert compute_alpha(lo, threshold, rolloff) >= compute_alpha(hi, threshold, rolloff)

    def test_hard_threshold_binary(self):
        for d in np.linspace(0.1, 5.0, 50):
            assert compute_alpha(float(d), 2.0, 0.0) in (0.0, 1.0)

    def test_rolloff_limit_converges_to_hard_threshold(self):
        for d in (1.0, 1.9999, 2.0001, 3.0):
            hard = compute_alpha(d, 2.0, 0.0)
            soft = compute_alpha(d, 2.0, 1e-9)
            if d != 2.0:
                assert soft == pytest.approx(hard, abs=1e-12)

    def test_continuity_in_d(self):
        samples = [compute_alpha(d, 1.0, 0.3) for d in np.linspace(0.5, 2.0, 3001)]
        jumps = np.abs(np.diff(samples)).max()
        assert jumps < 0.01

    def test_negative_parameters_rejected(self):
        with pytest.raises(ValueError):
            compute_alpha(1.0, -0.1, 0.0)
        with pytest.raises(ValueError):
            compute_alpha(1.0, 1.0, -0.1)


class TestAlphaMap:
    def test_matches_scalar(self):
        rng = np.random.default_rng(0)
        depths = rng.uniform(0.2, 4.0, size=(5, 6)).astype(np.float64)
        depths[0, 0] = np.nan
        depths[1, 1] = -1.0
        out = alpha_map(depths, 1.5, 0.4, invalid_alpha=0.1)
        for (y, x), d in np.ndenumerate(depths):
            assert out[y, x] == pytest.approx(
                compute_alpha(float(d), 1.5, 0.4, invalid_alpha=0.1), abs=1e-12)

    def test_hard_threshold_vectorized(self):
        depths = np.array([[1.0, 2.0, 3.0]], dtype=np.float32)
        out = alpha_map(depths, 2.0, 0.0)
        np.testing.assert_array_equal(out, [[1.0, 1.0, 0.0]])


class TestColorOps:
    def test_gamma_identity(self):
        v = np.array([0.1, 0.5, 0.9])
        np.testing.assert_array_equal(apply_gamma(v, 1.0), v)

    def test_gamma_sqrt(self):
        np.testing.assert_allclose(apply_gamma(np.array([0.25]), 0.5), [0.5], atol=1e-12)

    def test_gamma_below_one_brightens(self):
        out = apply_gamma(np.array([0.5]), 0.5)
        assert out[0] == pytest.approx(0.70710678, abs=1e-8)
        assert out[0] > 0.5

    def test_gamma_above_one_darkens(self):
        assert apply_gamma(np.array([0.5]), 2.0)[0] < 0.5

    def test_gamma_fixed_points(self):
        for gamma in (0.3, 1.0, 2.4):
            out = apply_gamma(np.array([0.0, 1.0]), gamma)
            np.testing.assert_array_equal(out, [0.0, 1.0])

    def test_gamma_strictly_monotone(self):
        v = np.linspace(0.01, 0.99, 50)
        out = apply_gamma(v, 0.7)
        assert np.all(np.diff(out) > 0)

    def test_gamma_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            apply_gamma(np.array([0.5]), 0.0)

    def test_gain_identity(self):
        v = np.array([0.2, 0.4, 0.6])
        np.testing.assert_array_equal(apply_gain(v, (1, 1, 1), 1.0), v)

    def test_exposure_3x(self):
        np.testing.assert_allclose(apply_gain(np.array([0.2, 0.2, 0.2]), (1, 1, 1), 3.0),
                                   [0.6, 0.6, 0.6], atol=1e-12)

    def test_gain_clamps(self):
        np.testing.assert_array_equal(apply_gain(np.array([0.5, 0.5, 0.5]), (1, 1, 1), 3.0),
                                      [1.0, 1.0, 1.0])

    def test_per_channel_gain(self):
        out = apply_gain(np.array([0.5, 0.5, 0.5]), (0.5, 1.0, 1.5), 1.0)
        np.testing.assert_allclose(out, [0.25, 0.5, 0.75], atol=1e-12)

    def test_negative_gain_rejected(self):
        with pytest.raises(ValueError):
            apply_gain(np.array([0.5, 0.5, 0.5]), (-1, 1, 1), 1.0)


class TestMatteParams:
    def test_defaults_valid(self):
        p = MatteParams()
        assert p.color_identity()

    def test_exposure_range(self):
        with pytest.raises(ValidationError) as exc:
            MatteParams(exposure_gain=5.0)
        assert "exposure_gain" in exc.value.fields

    def test_depth_range(self):
        with pytest.raises(ValidationError):
            MatteParams(depth_m=7.0)
        with pytest.raises(ValidationError):
            MatteParams(depth_m=-0.1)

    def test_rolloff_range(self):
        with pytest.raises(ValidationError):
            MatteParams(rolloff_m=1.5)

    def test_adjust_target(self):
        with pytest.raises(ValidationError):
            MatteParams(adjust_target="both")

    def test_dict_round_trip(self):
        p = MatteParams(depth_m=2.0, rolloff_m=0.19, gain_rgb=(1.1, 1.0, 0.9),
                        adjust_target="bg")
        assert MatteParams.from_dict(p.to_dict()) == p


class TestMattePass:
    def _scene(self, **kw):
        spec = SceneSpec(subject_depth_m=1.0, background_depth_m=3.0,
                         color_width=48, color_height=40,
                         depth_width=48, depth_height=40, **kw)
        return spec, *synth_scene(spec, 0)

    def test_all_foreground(self):
        color = ColorFrame(np.full((4, 5, 4), 0.5, dtype=np.float32))
        depth = DepthFrame(np.full((4, 5), 0.8, dtype=np.float32))
        out = matte_pass(color, depth, MatteParams(depth_m=1.5))
        assert np.all(out.alpha == 1.0)
        np.testing.assert_array_equal(out.rgb, color.rgb)

    def test_all_background(self):
        color = ColorFrame(np.full((4, 5, 4), 0.5, dtype=np.float32))
        depth = DepthFrame(np.full((4, 5), 4.0, dtype=np.float32))
        out = matte_pass(color, depth, MatteParams(depth_m=1.5))
        assert np.all(out.alpha == 0.0)

    def test_silhouette_exact(self):
        spec, color, depth = self._scene()
        out = matte_pass(color, depth, MatteParams(depth_m=2.0, rolloff_m=0.0))
        expected = silhouette_mask(spec, 0, 48, 40).astype(np.float32)
        np.testing.assert_array_equal(out.alpha, expected)

    def test_alpha_plane_equals_alpha_map(self):
        # no cross-pixel coupling in the first pass
        spec, color, depth = self._scene()
        params = MatteParams(depth_m=1.8, rolloff_m=0.3)
        out = matte_pass(color, depth, params)
        expected = alpha_map(depth.depths, 1.8, 0.3)
        np.testing.assert_array_equal(out.alpha, expected.astype(np.float32))

    def test_fg_adjustment_applied(self):
        spec, color, depth = self._scene()
        params = MatteParams(depth_m=2.0, gamma=0.5, exposure_gain=1.5,
                             adjust_target="fg")
        out = matte_pass(color, depth, params)
        expected = apply_gain(apply_gamma(color.rgb, 0.5), (1, 1, 1), 1.5)
        np.testing.assert_allclose(out.rgb, expected, atol=1e-7)

    def test_bg_target_leaves_fg_untouched(self):
        spec, color, depth = self._scene()
        params = MatteParams(depth_m=2.0, gamma=0.5, adjust_target="bg")
        out = matte_pass(color, depth, params)
        np.testing.assert_array_equal(out.rgb, color.rgb)

    def test_dimension_mismatch(self):
        color = ColorFrame(np.full((4, 5, 4), 0.5, dtype=np.float32))
        depth = DepthFrame(np.full((4, 6), 1.0, dtype=np.float32))
        with pytest.raises(DimensionMismatch):
            matte_pass(color, depth, MatteParams())

    def test_straight_alpha_not_premultiplied(self):
        color = ColorFrame(np.full((2, 2, 4), 0.8, dtype=np.float32))
        depth = DepthFrame(np.full((2, 2), 4.0, dtype=np.float32))
        out = matte_pass(color, depth, MatteParams(depth_m=1.0))
        # rgb survives even where alpha is zero
        assert np.all(out.rgb == np.float32(0.8))
        assert np.all(out.alpha == 0.0)
