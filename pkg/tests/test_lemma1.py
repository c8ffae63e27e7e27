"""The two-point mixture sampler and its closed-form densities.

The densities are cross-checked against numerical quadrature, and the
conditional sample law against the closed-form CDF via scipy's KS test, so
sampler and formulas are validated independently of each other.
"""

import math

import numpy as np
import pytest
from scipy import integrate
from scipy import stats as scipy_stats

from ghzsim.lemma1 import (
    MixtureIndex,
    component_cdf,
    component_density,
    density_grid_rows,
    lemma1_sample,
    mixture_density,
    sample_component_pair,
    sample_mixture_index,
)
from ghzsim.randomness import make_stream
from ghzsim.stats import ks_uniform01


class TestMixtureIndex:
    def test_valid(self):
        idx = MixtureIndex(i=3, r=-1)
        assert idx.i == 3 and idx.r == -1

    def test_rejects_negative_index(self):
        with pytest.raises(ValueError):
            MixtureIndex(i=-1, r=1)

    @pytest.mark.parametrize("r", [0, 2, -2])
    def test_rejects_bad_side(self, r):
        with pytest.raises(ValueError):
            MixtureIndex(i=0, r=r)


class TestSampleMixtureIndex:
    def test_index_law_and_side_balance(self):
        s = make_stream(12, 9, 0)
        n = 2 * 10**5
        idx = [sample_mixture_index(s) for _ in range(n)]
        js = np.array([x.i for x in idx])
        rs = np.array([x.r for x in idx])
        assert abs(float(np.mean(js == 0)) - 0.5) <= 0.006
        assert abs(float(np.mean(js == 3)) - 0.0625) <= 0.003
        assert abs(float(js.mean()) - 1.0) <= 0.016
        assert abs(float(rs.mean())) <= 5.0 / math.sqrt(n)

    def test_side_independent_of_index(self):
        s = make_stream(12, 9, 1)
        idx = [sample_mixture_index(s) for _ in range(10**5)]
        mean_r_given_0 = np.mean([x.r for x in idx if x.i == 0])
        mean_r_given_pos = np.mean([x.r for x in idx if x.i > 0])
        assert abs(mean_r_given_0) <= 0.03
        assert abs(mean_r_given_pos) <= 0.03


class TestSampleComponentPair:
    @pytest.mark.parametrize(
        "i,r,lo,hi",
        [(0, -1, 0.0, 1.0), (2, -1, 0.0, 0.25), (2, 1, 0.75, 1.0), (5, -1, 0.0, 2.0**-5)],
    )
    def test_interval(self, i, r, lo, hi):
        s = make_stream(13, 9, i, r % 3)
        for _ in range(2000):
            t1, t2 = sample_component_pair(MixtureIndex(i=i, r=r), s)
            assert lo <= t1 <= hi
            assert lo <= t2 <= hi

    def test_pair_entries_independent_uniform(self):
        s = make_stream(13, 9, 7)
        pairs = np.array([sample_component_pair(MixtureIndex(1, -1), s) for _ in range(20000)])
        # both coordinates uniform on [0, 1/2]; correlation compatible with 0
        assert ks_uniform01(pairs[:, 0] * 2.0).p_value >= 1e-3
        assert ks_uniform01(pairs[:, 1] * 2.0).p_value >= 1e-3
        corr = float(np.corrcoef(pairs[:, 0], pairs[:, 1])[0, 1])
        assert abs(corr) <= 5.0 / math.sqrt(pairs.shape[0])


class TestComponentDensity:
    def test_known_values(self):
        assert component_density(1, -1, 0.125) == pytest.approx(2.0, abs=1e-15)
        assert component_density(0, -1, 0.25) == pytest.approx(1.0, abs=1e-15)
        assert component_density(2, 1, 0.9) == pytest.approx(6.4, abs=1e-12)

    def test_mirror_symmetry(self):
        for i in range(4):
            for x in np.linspace(0.0, 1.0, 17):
                lhs = component_density(i, 1, float(x))
                rhs = component_density(i, -1, 1.0 - float(x))
                assert lhs == pytest.approx(rhs, abs=1e-14)

    def test_support(self):
        assert component_density(3, -1, 0.5) == 0.0
        assert component_density(3, 1, 0.5) == 0.0
        assert component_density(0, -1, 0.5) == 2.0  # the peak

    def test_integrates_to_one(self):
        # piecewise linear, so the trapezoid rule on the knots is exact
        for i in range(21):
            w = math.ldexp(1.0, -i)
            xs = [0.0, 0.5 * w, w]
            ys = [component_density(i, -1, x) for x in xs]
            area = np.trapezoid(ys, xs)
            assert abs(area - 1.0) <= 1e-9

    def test_quadrature_cross_check(self):
        for i in range(5):
            area, err = integrate.quad(
                lambda x: component_density(i, -1, x), 0.0, math.ldexp(1.0, -i), limit=200
            )
            assert abs(area - 1.0) <= max(1e-9, 10 * err)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            component_density(-1, -1, 0.5)
        with pytest.raises(ValueError):
            component_density(0, 0, 0.5)
        with pytest.raises(ValueError):
            component_density(0, -1, 1.5)


class TestComponentCdf:
    @pytest.mark.parametrize("i", [0, 1, 3])
    @pytest.mark.parametrize("r", [-1, 1])
    def test_matches_integrated_density(self, i, r):
        for x in np.linspace(0.0, 1.0, 21):
            ref, err = integrate.quad(
                lambda t: component_density(i, r, t), 0.0, float(x), limit=200
            )
            assert component_cdf(i, r, float(x)) == pytest.approx(ref, abs=max(1e-10, 10 * err))

    def test_endpoints_and_monotonicity(self):
        for i in range(4):
            for r in (-1, 1):
                assert component_cdf(i, r, 0.0) == 0.0
                assert component_cdf(i, r, 1.0) == 1.0
                vals = [component_cdf(i, r, float(x)) for x in np.linspace(0, 1, 101)]
                assert all(b >= a for a, b in zip(vals, vals[1:]))


class TestConditionalLaw:
    @pytest.mark.parametrize("i", [0, 1, 2, 3])
    @pytest.mark.parametrize("r", [-1, 1])
    def test_fixed_component_matches_cdf(self, i, r):
        s = make_stream(14, 9, i, r % 3)
        idx = MixtureIndex(i=i, r=r)
        vals = np.array(
            [0.5 * sum(sample_component_pair(idx, s)) for _ in range(20000)]
        )
        cdf = np.vectorize(lambda x: component_cdf(i, r, float(x)))
        res = scipy_stats.kstest(vals, cdf)
        assert res.pvalue >= 1e-3


class TestLemma1Sample:
    def test_range_and_mean(self):
        s = make_stream(15, 9, 0)
        vals = np.array([lemma1_sample(s) for _ in range(30000)])
        assert float(vals.min()) >= 0.0
        assert float(vals.max()) <= 1.0
        assert abs(float(vals.mean()) - 0.5) <= 5.0 * (1.0 / math.sqrt(12 * vals.size))

    def test_uniform_on_unit_interval(self):
        s = make_stream(15, 9, 1)
        vals = np.array([lemma1_sample(s) for _ in range(30000)])
        assert ks_uniform01(vals).p_value >= 1e-3
        res = scipy_stats.kstest(vals, "uniform")
        assert res.pvalue >= 1e-3


class TestMixtureDensity:
    def test_known_values(self):
        assert mixture_density(0.5, 0) == pytest.approx(1.0, abs=1e-15)
        assert mixture_density(0.3, 10) == pytest.approx(1.0, abs=1e-12)
        assert mixture_density(0.75, 40) == pytest.approx(1.0, abs=1e-12)

    def test_flat_strictly_inside_truncation_window(self):
        i_max = 40
        lo = math.ldexp(1.0, -i_max)
        for x in np.linspace(lo, 1.0 - lo, 101)[1:-1]:
            assert abs(mixture_density(float(x), i_max) - 1.0) <= 1e-12

    def test_truncation_loses_mass_near_edges(self):
        # components above i_max carry all the density this close to 0
        assert mixture_density(math.ldexp(1.0, -8), 4) < 1.0
        assert mixture_density(1.0 - math.ldexp(1.0, -8), 4) < 1.0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            mixture_density(-0.1, 10)
        with pytest.raises(ValueError):
            mixture_density(0.5, -1)

    def test_grid_rows(self):
        rows = density_grid_rows(40, 9)
        assert len(rows) == 9
        assert all(0.0 < x < 1.0 for x, _, _ in rows)
        assert all(i == 40 for _, _, i in rows)
        assert all(abs(d - 1.0) <= 1e-12 for _, d, _ in rows)
