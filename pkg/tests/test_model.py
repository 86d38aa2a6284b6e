"""Rectifier, opponent tables, layer operators, and the full pipeline."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from huenet.config import ModelConfig, RectifierParams
from huenet.imaging import STANDARD_SIZE, convolve, make_gaussian
from huenet.model import (
    HUE_ANGLES,
    HUE_TYPES,
    LGN_CONE_WEIGHTS,
    OPPONENT_TYPES,
    V4_HUE_WEIGHTS,
    LayerActivations,
    derive_v4_weights,
    gaussian_layer,
    hue_distance,
    lgn_layer,
    rectify,
    run_pipeline,
    v4_layer,
)

EXPECTED_LGN = {
    "L+M-": (1.0, -1.0, 0.0),
    "L-M+": (-1.0, 1.0, 0.0),
    "S+(L+M)-": (-0.5, -0.5, 1.0),
    "S-(L+M)+": (0.5, 0.5, -1.0),
}

EXPECTED_V4 = {
    "red": (0.85636, 0.00028984, 0.041238, 0.10211),
    "yellow": (0.38019, 0.022312, 0.0005716, 0.59692),
    "green": (0.031002, 0.31546, 0.012604, 0.64093),
    "cyan": (0.00038727, 0.68329, 0.2109, 0.10543),
    "blue": (0.014012, 0.29034, 0.69225, 0.0034021),
    "magenta": (0.37948, 0.031779, 0.58531, 0.0034362),
}


class TestRectify:
    def test_below_threshold_clamps(self):
        r = RectifierParams(slope=1.0, base=0.0, lower=0.0, saturation=1.0)
        assert rectify(r, -0.5) == 0.0

    def test_interior_is_linear(self):
        r = RectifierParams(slope=1.0, base=0.0, lower=-1.0, saturation=1.0)
        assert rectify(r, 0.3) == 0.3

    def test_above_saturation_returns_one(self):
        r = RectifierParams(slope=1.0, base=0.0, lower=0.0, saturation=1.0)
        assert rectify(r, 2.5) == 1.0

    def test_saturation_jump_below_one(self):
        # With saturation below 1 the output jumps to exactly 1, not to
        # the saturation value itself.
        r = RectifierParams(slope=1.0, base=0.0, lower=0.0, saturation=0.5)
        assert rectify(r, 0.49) == 0.49
        assert rectify(r, 0.51) == 1.0

    def test_slope_and_base_applied(self):
        r = RectifierParams(slope=2.0, base=0.1, lower=0.0, saturation=1.0)
        assert rectify(r, 0.2) == pytest.approx(0.5)

    def test_vectorized(self):
        r = RectifierParams(lower=0.0)
        out = rectify(r, np.array([-1.0, 0.25, 3.0]))
        assert np.array_equal(out, [0.0, 0.25, 1.0])

    @given(
        st.floats(min_value=0.0, max_value=3.0),
        st.floats(min_value=-2.0, max_value=2.0),
        st.floats(min_value=-2.0, max_value=1.0),
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=-5.0, max_value=5.0),
        st.floats(min_value=0.0, max_value=1.0),
    )
    @settings(max_examples=300, deadline=None)
    def test_range_and_monotonicity(self, m, b, tau, s_frac, p, dp_frac):
        s = min(tau + (1.0 - tau) * s_frac, 1.0)
        r = RectifierParams(slope=m, base=b, lower=tau, saturation=s)
        y1 = rectify(r, p)
        y2 = rectify(r, p + 5.0 * dp_frac)
        assert tau - 1e-12 <= y1 <= 1.0 + 1e-12
        assert y2 >= y1 - 1e-12

    def test_invalid_thresholds(self):
        with pytest.raises(ValueError):
            RectifierParams(lower=0.5, saturation=0.4)
        with pytest.raises(ValueError):
            RectifierParams(saturation=1.5)


class TestTables:
    def test_lgn_weights_exact(self):
        assert LGN_CONE_WEIGHTS == EXPECTED_LGN

    def test_v4_weights_exact(self):
        assert V4_HUE_WEIGHTS == EXPECTED_V4

    def test_v4_rows_sum_to_one(self):
        for name, row in V4_HUE_WEIGHTS.items():
            assert abs(sum(row) - 1.0) < 1e-3, name

    def test_lgn_rows_are_zero_sum(self):
        for name, row in LGN_CONE_WEIGHTS.items():
            assert sum(row) == 0.0, name

    def test_type_orderings(self):
        assert OPPONENT_TYPES == ("L+M-", "L-M+", "S+(L+M)-", "S-(L+M)+")
        assert HUE_TYPES == ("red", "yellow", "green", "cyan", "blue", "magenta")
        assert HUE_ANGLES == {
            "red": 0.0, "yellow": 60.0, "green": 120.0,
            "cyan": 180.0, "blue": 240.0, "magenta": 300.0,
        }


class TestHueDistance:
    @pytest.mark.parametrize("a,b,expect", [(0, 60, 60), (350, 10, 20),
                                            (60, 240, 180), (0, 0, 0)])
    def test_examples(self, a, b, expect):
        assert hue_distance(a, b) == expect

    @given(st.floats(0, 360), st.floats(0, 360))
    @settings(max_examples=200, deadline=None)
    def test_metric_properties(self, a, b):
        d = hue_distance(a, b)
        assert 0.0 <= d <= 180.0
        assert d == pytest.approx(hue_distance(b, a))


class TestDeriveV4Weights:
    PEAKS = {"L+M-": 20.0, "L-M+": 160.0, "S+(L+M)-": 250.0, "S-(L+M)+": 80.0}

    def test_delta_limit_picks_coincident_peak(self):
        w = derive_v4_weights(160.0, self.PEAKS, sigma_deg=1e-6)
        assert w["L-M+"] == pytest.approx(1.0)
        for name in ("L+M-", "S+(L+M)-", "S-(L+M)+"):
            assert w[name] == pytest.approx(0.0, abs=1e-12)

    def test_flat_limit_is_uniform(self):
        w = derive_v4_weights(0.0, self.PEAKS, sigma_deg=1e9)
        for v in w.values():
            assert v == pytest.approx(0.25, abs=1e-9)

    @given(st.floats(0, 359.99), st.floats(min_value=3.0, max_value=200.0))
    @settings(max_examples=100, deadline=None)
    def test_probability_vector(self, target, sigma):
        w = derive_v4_weights(target, self.PEAKS, sigma_deg=sigma)
        vals = np.array(list(w.values()))
        assert np.all(vals >= 0.0)
        assert abs(vals.sum() - 1.0) < 1e-12

    def test_closer_peak_gets_more_weight(self):
        w = derive_v4_weights(30.0, self.PEAKS, sigma_deg=40.0)
        assert w["L+M-"] > w["S-(L+M)+"] > w["L-M+"]

    def test_invalid_sigma(self):
        with pytest.raises(ValueError):
            derive_v4_weights(0.0, self.PEAKS, sigma_deg=0.0)

    def test_all_densities_underflow_is_an_error(self):
        # Tiny sigma with every peak far away cannot be normalized.
        with pytest.raises(ValueError):
            derive_v4_weights(120.0, self.PEAKS, sigma_deg=1e-6)


def _constant_cones(l, m, s, size=32):
    return (np.full((size, size), float(l)),
            np.full((size, size), float(m)),
            np.full((size, size), float(s)))


class TestLgnLayer:
    def test_achromatic_input_cancels(self):
        acts = lgn_layer(*_constant_cones(0.4, 0.4, 0.4))
        for name in OPPONENT_TYPES:
            assert np.allclose(acts.planes[name], 0.0, atol=1e-12), name

    def test_l_rich_input_drives_l_plus(self):
        acts = lgn_layer(*_constant_cones(0.8, 0.2, 0.1))
        assert np.all(acts.planes["L+M-"] > 0.5)
        assert np.all(acts.planes["L-M+"] == 0.0) or np.all(acts.planes["L-M+"] <= 0.0 + 1e-12)

    def test_output_within_lgn_range(self):
        acts = lgn_layer(*_constant_cones(1.0, 0.0, 1.0))
        for plane in acts.planes.values():
            assert plane.min() >= -1.0 and plane.max() <= 1.0

    def test_mismatched_sizes_rejected(self):
        l, m, s = _constant_cones(0.5, 0.5, 0.5)
        with pytest.raises(ValueError):
            lgn_layer(l, m[:16], s)

    def test_per_cone_sigma_override_used(self):
        # A huge sigma flattens an impulse far more than the default.
        l = np.zeros((33, 33)); l[16, 16] = 1.0
        m, s = np.zeros_like(l), np.zeros_like(l)
        base = lgn_layer(l, m, s)
        cfg = ModelConfig(lgn_cone_sigmas={"L+M-": {"L": 50.0}})
        wide = lgn_layer(l, m, s, cfg)
        assert wide.planes["L+M-"][16, 16] < base.planes["L+M-"][16, 16]


class TestGaussianLayer:
    def _acts(self, planes):
        return LayerActivations("LGN", planes)

    def test_zero_input_gives_zero_output(self):
        planes = {n: np.zeros((24, 24)) for n in OPPONENT_TYPES}
        out = gaussian_layer(self._acts(planes), "v1")
        assert out.layer == "V1"
        for plane in out.planes.values():
            assert np.array_equal(plane, np.zeros((24, 24)))

    def test_nonnegative_input_is_plain_smoothing(self):
        # With slope 1 and base 0 the rectifier is inert on [0,1].
        rng = np.random.default_rng(8)
        planes = {n: rng.uniform(0, 1, size=(24, 24)) for n in OPPONENT_TYPES}
        cfg = ModelConfig()
        out = gaussian_layer(self._acts(planes), "v2", cfg)
        k = make_gaussian(cfg.kernels["v2"].size, cfg.kernels["v2"].sigma)
        for n in OPPONENT_TYPES:
            assert np.allclose(out.planes[n], convolve(planes[n], k), atol=1e-12)

    def test_type_names_preserved(self):
        planes = {n: np.zeros((16, 16)) for n in OPPONENT_TYPES}
        out = gaussian_layer(self._acts(planes), "v1")
        assert set(out.planes) == set(OPPONENT_TYPES)


class TestV4Layer:
    def _v2(self, size=24, seed=9):
        rng = np.random.default_rng(seed)
        return LayerActivations(
            "V2", {n: rng.uniform(0, 1, size=(size, size)) for n in OPPONENT_TYPES}
        )

    def test_single_term_weights_reduce_to_smoothing(self):
        v2 = self._v2()
        cfg = ModelConfig(
            v4_weights={name: tuple(1.0 if i == 0 else 0.0 for i in range(4))
                        for name in HUE_TYPES},
            rectifiers={
                "lgn": RectifierParams(lower=-1.0),
                "v1": RectifierParams(slope=1.7),
                "v2": RectifierParams(),
                "v4": RectifierParams(),
            },
        )
        out = v4_layer(v2, cfg)
        k = make_gaussian(cfg.kernels["v4"].size, cfg.kernels["v4"].sigma)
        expect = np.clip(convolve(v2.planes["L+M-"], k), 0.0, None)
        for name in HUE_TYPES:
            assert np.allclose(out.planes[name], expect, atol=1e-12)

    def test_six_planes_produced(self):
        out = v4_layer(self._v2())
        assert tuple(out.planes) == HUE_TYPES

    def test_missing_plane_rejected(self):
        v2 = self._v2()
        planes = dict(v2.planes)
        del planes["L-M+"]
        with pytest.raises(ValueError):
            v4_layer(LayerActivations("V2", planes))


class TestRunPipeline:
    def test_layer_shapes_and_ranges(self):
        img = np.full((64, 64, 3), 0.5)
        result = run_pipeline(img)
        for acts, count in zip(result.layers, (4, 4, 4, 6)):
            assert len(acts.planes) == count
            for plane in acts.planes.values():
                assert plane.shape == (STANDARD_SIZE, STANDARD_SIZE)
        assert np.all(result.lgn.planes["L+M-"] >= -1.0)
        for name in HUE_TYPES:
            plane = result.v4.planes[name]
            assert plane.min() >= 0.0 and plane.max() <= 1.0

    def test_achromatic_image_silences_lgn(self):
        result = run_pipeline(np.full((32, 32, 3), 0.7))
        for name, plane in result.lgn.planes.items():
            assert np.allclose(plane, 0.0, atol=1e-9), name

    def test_quadrant_image_drives_magenta_in_red_and_blue(self):
        img = np.zeros((128, 128, 3))
        img[:64, :64] = [1.0, 0.0, 0.0]       # red
        img[:64, 64:] = [0.0, 1.0, 0.0]       # green
        img[64:, :64] = [0.0, 0.0, 1.0]       # blue
        img[64:, 64:] = [1.0, 1.0, 0.0]       # yellow
        result = run_pipeline(img)
        magenta = result.v4.planes["magenta"]
        q = STANDARD_SIZE // 4
        red_q = magenta[:2 * q, :2 * q].mean()
        green_q = magenta[:2 * q, 2 * q:].mean()
        blue_q = magenta[2 * q:, :2 * q].mean()
        yellow_q = magenta[2 * q:, 2 * q:].mean()
        assert red_q > 0.01 and blue_q > 0.01
        assert red_q > green_q and blue_q > yellow_q

    @pytest.mark.parametrize(
        "bad",
        [np.zeros((32, 32)), np.zeros((32, 32, 4)),
         np.full((8, 8, 3), 1.5), np.full((8, 8, 3), np.nan)],
    )
    def test_rejects_malformed_images(self, bad):
        with pytest.raises(ValueError):
            run_pipeline(bad)

    def test_layer_lookup(self):
        result = run_pipeline(np.full((16, 16, 3), 0.5))
        assert result.layer("V4") is result.v4
        with pytest.raises(KeyError):
            result.layer("V9")
