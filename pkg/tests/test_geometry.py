"""Angle arithmetic, arcs, and hemisphere sampling."""

import math

import numpy as np
import pytest
from scipy import stats as scipy_stats

from ghzsim.geometry import (
    TWO_PI,
    Arc,
    angular_distance,
    arc_contains,
    dot,
    embed_equatorial,
    hemisphere_point,
    hemisphere_points,
    norm3,
    sgn,
    wrap_angle,
)


class TestWrapAngle:
    def test_output_in_canonical_range(self):
        rng = np.random.default_rng(7)
        for x in rng.uniform(-50.0, 50.0, size=5000):
            w = wrap_angle(float(x))
            assert 0.0 <= w < TWO_PI

    def test_known_values(self):
        assert wrap_angle(0.0) == 0.0
        assert wrap_angle(TWO_PI) == 0.0
        assert wrap_angle(-math.pi / 2) == pytest.approx(3 * math.pi / 2, abs=1e-15)
        assert wrap_angle(7.0) == pytest.approx(7.0 - TWO_PI, abs=1e-15)

    def test_periodicity(self):
        rng = np.random.default_rng(11)
        for x in rng.uniform(0.0, TWO_PI, size=300):
            for m in (-3, -1, 1, 2):
                assert wrap_angle(float(x) + TWO_PI * m) == pytest.approx(
                    wrap_angle(float(x)), abs=1e-12
                )

    def test_idempotent(self):
        rng = np.random.default_rng(13)
        for x in rng.uniform(-20.0, 20.0, size=500):
            w = wrap_angle(float(x))
            assert wrap_angle(w) == w

    @pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValueError):
            wrap_angle(bad)


class TestAngularDistance:
    def test_symmetric_and_bounded(self):
        rng = np.random.default_rng(3)
        for a, b in rng.uniform(0.0, TWO_PI, size=(500, 2)):
            d1 = angular_distance(float(a), float(b))
            d2 = angular_distance(float(b), float(a))
            assert d1 == pytest.approx(d2, abs=1e-15)
            assert 0.0 <= d1 <= math.pi

    def test_wraps_across_zero(self):
        assert angular_distance(0.1, TWO_PI - 0.1) == pytest.approx(0.2, abs=1e-12)
        assert angular_distance(0.0, math.pi) == pytest.approx(math.pi, abs=1e-15)
        assert angular_distance(1.5, 1.5) == 0.0


class TestArc:
    def test_contains_interior_and_excludes_antipode(self):
        a = Arc(center=0.0, half_width=math.pi / 2)
        assert a.contains(0.3)
        assert not a.contains(math.pi)

    def test_contains_is_wrap_aware(self):
        a = Arc(center=0.1, half_width=0.5)
        assert a.contains(TWO_PI - 0.1)
        assert arc_contains(a, TWO_PI - 0.1)

    def test_boundary_is_closed(self):
        a = Arc(center=1.0, half_width=0.25)
        assert a.contains(1.25)
        assert a.contains(0.75)
        assert not a.contains(1.2500001)

    def test_width_and_rel_position(self):
        a = Arc(center=2.0, half_width=0.5)
        assert a.width == pytest.approx(1.0, abs=1e-15)
        assert a.rel_position(2.0) == pytest.approx(0.5, abs=1e-12)
        assert a.rel_position(1.5) == pytest.approx(0.0, abs=1e-12)
        assert a.rel_position(2.5) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_bad_half_width(self):
        with pytest.raises(ValueError):
            Arc(center=0.0, half_width=0.0)
        with pytest.raises(ValueError):
            Arc(center=0.0, half_width=-1.0)
        with pytest.raises(ValueError):
            Arc(center=0.0, half_width=4.0)


class TestSgn:
    def test_values(self):
        assert sgn(-3.2) == -1
        assert sgn(0.0) == 1
        assert sgn(1e-300) == 1
        assert sgn(2.5) == 1
        assert sgn(-1e-300) == -1

    def test_range_is_pm1(self):
        rng = np.random.default_rng(5)
        for x in rng.normal(size=200):
            assert sgn(float(x)) in (-1, 1)


class TestEmbedEquatorial:
    def test_axis_values(self):
        np.testing.assert_allclose(embed_equatorial(0.0), [1.0, 0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(embed_equatorial(math.pi / 2), [0.0, 1.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(
            embed_equatorial(math.pi / 4, negate_second=True),
            [math.sqrt(2) / 2, -math.sqrt(2) / 2, 0.0],
            atol=1e-15,
        )

    def test_unit_norm(self):
        rng = np.random.default_rng(17)
        for t in rng.uniform(0.0, TWO_PI, size=300):
            v = embed_equatorial(float(t))
            assert abs(norm3(v) - 1.0) <= 1e-12
            assert v[2] == 0.0

    def test_negate_second_reflects_y(self):
        for t in (0.3, 1.7, 5.9):
            v = embed_equatorial(t)
            w = embed_equatorial(t, negate_second=True)
            assert w[0] == v[0]
            assert w[1] == -v[1]


class TestHemispherePoint:
    def test_pole_and_equator(self):
        np.testing.assert_allclose(hemisphere_point(0.0, 1.0), [0.0, 0.0, 1.0], atol=1e-15)
        np.testing.assert_allclose(hemisphere_point(0.0, 0.0), [1.0, 0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(hemisphere_point(math.pi / 2, 0.0), [0.0, 1.0, 0.0], atol=1e-15)

    def test_unit_norm_and_z_is_u(self):
        rng = np.random.default_rng(19)
        for theta, u in zip(rng.uniform(0, TWO_PI, 400), rng.uniform(-1, 1, 400)):
            v = hemisphere_point(float(theta), float(u))
            assert abs(norm3(v) - 1.0) <= 1e-12
            assert v[2] == float(u)

    @pytest.mark.parametrize("u", [-1.0000001, 1.1, 2.0])
    def test_rejects_out_of_range_latitude(self, u):
        with pytest.raises(ValueError):
            hemisphere_point(0.0, u)

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(23)
        thetas = rng.uniform(0, TWO_PI, 50)
        us = rng.uniform(-1, 1, 50)
        batch = hemisphere_points(thetas, us)
        for i in range(50):
            np.testing.assert_array_equal(batch[i], hemisphere_point(thetas[i], us[i]))

    def test_stays_on_positive_side_of_arc_axis(self):
        # theta within a quarter turn of c forces a nonnegative projection
        # onto the equatorial axis at c, for every latitude
        rng = np.random.default_rng(29)
        n = 10**5
        c = 0.8
        thetas = c - math.pi / 2 + math.pi * rng.random(n)
        us = 2.0 * rng.random(n) - 1.0
        lam = hemisphere_points(thetas, us)
        d = embed_equatorial(c)
        assert float((lam @ d).min()) >= 0.0

    def test_centroid_of_uniform_hemisphere(self):
        rng = np.random.default_rng(31)
        n = 10**5
        c = 2.4
        thetas = c - math.pi / 2 + math.pi * rng.random(n)
        us = 2.0 * rng.random(n) - 1.0
        lam = hemisphere_points(thetas, us)
        d = embed_equatorial(c)
        dev = np.abs(lam.mean(axis=0) - 0.5 * d)
        assert np.all(dev <= 5.0 / math.sqrt(n))

    def test_matches_rejection_sampler(self):
        # independent construction of the same law: uniform on the sphere,
        # keep the points on the axis side; the axis projections of both
        # samplers must share one distribution, and so must the z coordinate
        rng = np.random.default_rng(37)
        n = 4 * 10**4
        c = 1.2
        d = embed_equatorial(c)

        thetas = c - math.pi / 2 + math.pi * rng.random(n)
        us = 2.0 * rng.random(n) - 1.0
        constructed = hemisphere_points(thetas, us)

        raw = rng.normal(size=(3 * n, 3))
        raw /= np.linalg.norm(raw, axis=1, keepdims=True)
        rejected = raw[raw @ d >= 0.0][:n]
        assert rejected.shape[0] == n

        p1 = scipy_stats.ks_2samp(constructed @ d, rejected @ d).pvalue
        p2 = scipy_stats.ks_2samp(constructed[:, 2], rejected[:, 2]).pvalue
        assert p1 >= 1e-3
        assert p2 >= 1e-3


class TestDot:
    def test_known_values(self):
        assert dot(np.array([1.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0])) == 1.0
        assert dot(np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0])) == 0.0

    def test_matches_numpy(self):
        rng = np.random.default_rng(41)
        for _ in range(200):
            a = rng.normal(size=3)
            b = rng.normal(size=3)
            assert dot(a, b) == pytest.approx(float(np.dot(a, b)), abs=1e-12)

    def test_equatorial_projection_is_cosine_of_sum(self):
        rng = np.random.default_rng(43)
        for s, a in rng.uniform(0, TWO_PI, size=(300, 2)):
            lhs = dot(embed_equatorial(float(s)), embed_equatorial(float(a), negate_second=True))
            assert lhs == pytest.approx(math.cos(s + a), abs=1e-12)
