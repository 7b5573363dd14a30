"""Inverse Gaussian law and process checks against scipy and frozen values.

scipy.stats.invgauss provides the independent oracle: IG(mu, lam)
equals invgauss(mu/lam, scale=lam).
"""

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import quad

from hyperrough.errors import NumericalError
from hyperrough.ig import (IGParams, IGProcessParams, RngSeed, hitting_time_sample,
                           ig_cdf, ig_cf, ig_pdf, ig_process_sample, ig_sample,
                           levy_exponent, levy_measure_density, limit_pair)
from hyperrough.kernels import ModelParams, UniformGrid

PDF_AT_ONE = 0.39894228040143268            # IG(1,1) density at 1
CF_AT_ONE = 0.53829581831033704 + 0.5391073339895979j
PHI_AT_ONE = -0.00041318786593461268 + 0.099996585340851427j
LEVY_DENS_AT_ONE = 2.3307011788602889e-27   # process (0.1, 1.21) at x = 1
LIMIT_LAW = IGParams(0.1, 1.21)


def _scipy_law(p: IGParams):
    return stats.invgauss(p.mu / p.lam, scale=p.lam)


class TestParams:
    @pytest.mark.parametrize("mu,lam", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
    def test_rejects_nonpositive(self, mu, lam):
        with pytest.raises(ValueError):
            IGParams(mu, lam)

    def test_process_marginal(self):
        p = IGProcessParams(0.1, 1.21)
        law = p.marginal(2.0)
        assert law.mu == pytest.approx(0.2)
        assert law.lam == pytest.approx(4.84)


class TestRngSeed:
    def test_streams_differ(self):
        a = RngSeed(3, 0).generator().standard_normal(4)
        b = RngSeed(3, 1).generator().standard_normal(4)
        assert not np.allclose(a, b)

    def test_reproducible(self):
        a = RngSeed(3, 5).generator().standard_normal(4)
        b = RngSeed(3, 5).generator().standard_normal(4)
        np.testing.assert_array_equal(a, b)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            RngSeed(-1)
        with pytest.raises(ValueError):
            RngSeed(2 ** 64)


class TestPdf:
    def test_reference_value(self):
        assert ig_pdf(IGParams(1, 1), 1.0) == pytest.approx(PDF_AT_ONE, rel=1e-14)

    def test_matches_scipy(self):
        p = LIMIT_LAW
        xs = np.linspace(1e-3, 0.5, 40)
        np.testing.assert_allclose(ig_pdf(p, xs), _scipy_law(p).pdf(xs), rtol=1e-12)

    def test_zero_left_of_origin(self):
        assert ig_pdf(IGParams(1, 1), 0.0) == 0.0
        np.testing.assert_array_equal(ig_pdf(IGParams(1, 1), [-1.0, 0.0]), [0.0, 0.0])

    def test_normalization(self):
        val, _ = quad(lambda y: ig_pdf(LIMIT_LAW, y), 0, 2.0)
        assert val == pytest.approx(1.0, abs=1e-9)


class TestCdf:
    def test_matches_scipy(self):
        p = LIMIT_LAW
        xs = np.linspace(1e-4, 1.0, 101)
        np.testing.assert_allclose(ig_cdf(p, xs), _scipy_law(p).cdf(xs), atol=1e-10)

    def test_unsorted_input_restored(self):
        p = IGParams(1.0, 2.0)
        rng = np.random.default_rng(0)
        xs = rng.uniform(0.01, 5.0, 200)
        out = ig_cdf(p, xs)
        np.testing.assert_allclose(out, _scipy_law(p).cdf(xs), atol=1e-10)

    def test_edges(self):
        p = IGParams(1.0, 1.0)
        assert ig_cdf(p, 0.0) == 0.0
        assert ig_cdf(p, -2.0) == 0.0
        assert ig_cdf(p, 1e6) == pytest.approx(1.0, abs=1e-12)

    def test_monotone(self):
        out = ig_cdf(LIMIT_LAW, np.linspace(1e-4, 1.0, 500))
        assert np.all(np.diff(out) >= 0)


class TestCfAndExponent:
    def test_cf_reference(self):
        assert ig_cf(IGParams(1, 1), 1.0) == pytest.approx(CF_AT_ONE, rel=1e-13)

    def test_cf_basics(self):
        p = LIMIT_LAW
        assert ig_cf(p, 0.0) == pytest.approx(1.0)
        us = np.linspace(-20, 20, 41)
        assert np.all(np.abs(ig_cf(p, us)) <= 1.0 + 1e-12)

    def test_exponent_reference(self):
        p = IGProcessParams(0.1, 1.21)
        assert levy_exponent(p, 1.0) == pytest.approx(PHI_AT_ONE, rel=1e-13)

    def test_exponent_consistent_with_marginal_cf(self):
        p = IGProcessParams(0.1, 1.21)
        for t in (0.5, 1.0, 2.0):
            for u in (-3.0, 0.7, 2.0):
                lhs = np.exp(levy_exponent(p, u) * t)
                rhs = ig_cf(p.marginal(t), u)
                assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_exponent_nonpositive_real_part(self):
        p = IGProcessParams(0.1, 1.21)
        vals = levy_exponent(p, np.linspace(-50, 50, 101))
        assert np.all(vals.real <= 1e-15)


class TestLevyMeasure:
    def test_reference_value(self):
        p = IGProcessParams(0.1, 1.21)
        assert levy_measure_density(p, 1.0) == pytest.approx(
            LEVY_DENS_AT_ONE, rel=1e-12)

    def test_mean_identity(self):
        # int x nu(dx) equals the unit-time mean
        p = IGProcessParams(0.1, 1.21)
        val, _ = quad(lambda x: x * levy_measure_density(p, x), 0, 1.0,
                      points=[1e-6], limit=200)
        assert val == pytest.approx(p.mu, rel=1e-6)

    def test_rejects_nonpositive_x(self):
        with pytest.raises(ValueError):
            levy_measure_density(IGProcessParams(0.1, 1.21), 0.0)


class TestSampler:
    def test_moments(self):
        n = 200_000
        xs = ig_sample(LIMIT_LAW, RngSeed(11, 0), n)
        mu, lam = LIMIT_LAW.mu, LIMIT_LAW.lam
        var = mu ** 3 / lam
        assert xs.mean() == pytest.approx(mu, abs=4 * np.sqrt(var / n))
        assert xs.var() == pytest.approx(var, rel=0.05)

    def test_ks_against_cdf(self):
        n = 100_000
        xs = ig_sample(LIMIT_LAW, RngSeed(12, 0), n)
        stat = stats.kstest(xs, _scipy_law(LIMIT_LAW).cdf).statistic
        assert stat < 1.6276236115189503 / np.sqrt(n)

    def test_scalar_draw(self):
        x = ig_sample(LIMIT_LAW, RngSeed(1, 0))
        assert np.isscalar(x) and x > 0

    def test_all_positive(self):
        xs = ig_sample(IGParams(2.0, 0.5), RngSeed(2, 0), 10_000)
        assert np.all(xs > 0)


class TestProcessSample:
    def test_path_shape_and_monotone(self):
        p = IGProcessParams(0.1, 1.21)
        grid = UniformGrid(128)
        path = ig_process_sample(p, grid, RngSeed(5, 0))
        assert path.shape == (129,)
        assert path[0] == 0.0
        assert np.all(np.diff(path) > 0)

    def test_terminal_law(self):
        p = IGProcessParams(0.1, 1.21)
        grid = UniformGrid(16)
        ys = np.array([ig_process_sample(p, grid, RngSeed(6, i))[-1]
                       for i in range(4000)])
        stat = stats.kstest(ys, _scipy_law(p.marginal(1.0)).cdf).statistic
        assert stat < 1.6276236115189503 / np.sqrt(4000)


class TestHittingTime:
    def test_deterministic_without_noise(self):
        assert hitting_time_sample(11.0, 0.0, 1.1, 1.0, RngSeed(1, 0)) == \
            pytest.approx(0.1)

    def test_law_matches_ig(self):
        # a s + b W_s hitting c t is IG(ct/a, (ct/b)^2)
        taus = hitting_time_sample(11.0, 1.0, 1.1, 1.0, RngSeed(7, 0), size=2000)
        stat = stats.kstest(taus, _scipy_law(LIMIT_LAW).cdf).statistic
        # generous bound: the Euler oracle carries a small overshoot bias
        assert stat < 2.2 * 1.6276236115189503 / np.sqrt(2000)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            hitting_time_sample(0.0, 1.0, 1.0, 1.0, RngSeed(1, 0))
        with pytest.raises(ValueError):
            hitting_time_sample(1.0, -1.0, 1.0, 1.0, RngSeed(1, 0))
        with pytest.raises(ValueError):
            hitting_time_sample(1.0, 1.0, 0.0, 1.0, RngSeed(1, 0))


class TestLimitPair:
    def test_martingale_identity(self):
        m = ModelParams()
        p = IGProcessParams(m.g0 / (1 + m.lam), (m.g0 / m.nu) ** 2)
        grid = UniformGrid(64)
        y = ig_process_sample(p, grid, RngSeed(9, 0))
        Y, M = limit_pair(p, m, y, grid)
        np.testing.assert_array_equal(Y, y)
        np.testing.assert_allclose(
            (1 + m.lam) * Y - m.g0 * grid.points(), M, rtol=1e-14)

    def test_rejects_bad_paths(self):
        m = ModelParams()
        p = IGProcessParams(0.1, 1.21)
        grid = UniformGrid(8)
        with pytest.raises(ValueError):
            limit_pair(p, m, np.ones(9), grid)       # does not start at zero
        with pytest.raises(ValueError):
            limit_pair(p, m, np.zeros(5), grid)      # wrong length
        bad = np.concatenate([[0.0], np.linspace(1, 0.1, 8)])
        with pytest.raises(ValueError):
            limit_pair(p, m, bad, grid)              # decreasing
