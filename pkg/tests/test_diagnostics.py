"""Diagnostics checks against scipy oracles and hand-built paths."""

import numpy as np
import pytest
from scipy import special, stats

from hyperrough.diagnostics import (SampleBatch, empirical_cf,
                                    histogram_density, ks_critical,
                                    ks_distance, ks_two_sample, moment_checks,
                                    oscillation_moduli, up_crossings)
from hyperrough.ig import IGParams, ig_cdf, ig_sample, RngSeed
from hyperrough.kernels import ModelParams, UniformGrid, g0n_eval

M = ModelParams()


def _batch(x, m=None, **kw):
    x = np.asarray(x, float)
    m = np.zeros_like(x) if m is None else np.asarray(m, float)
    kw.setdefault("H", -0.3)
    kw.setdefault("N", 100)
    kw.setdefault("seed", 0)
    return SampleBatch(X_T=x, M_T=m, **kw)


class TestSampleBatch:
    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            SampleBatch(X_T=np.zeros(3), M_T=np.zeros(4), H=-0.3, N=10, seed=0)

    def test_rejects_negative_x(self):
        with pytest.raises(ValueError):
            _batch([0.1, -0.2, 0.3])

    def test_path_count(self):
        assert _batch([1.0, 2.0, 3.0]).n_paths == 3


class TestEmpiricalCf:
    def test_hand_value(self):
        b = _batch([0.0, 1.0], [1.0, -1.0])
        want = 0.5 * (np.exp(1j * 0.5) + np.exp(1j * (2.0 - 0.5)))
        assert empirical_cf(b, 2.0, 0.5) == pytest.approx(want, rel=1e-15)

    def test_unit_at_origin(self):
        b = _batch(np.abs(np.random.default_rng(0).normal(size=50)))
        assert empirical_cf(b, 0.0, 0.0) == pytest.approx(1.0 + 0j, abs=1e-15)

    def test_empty_batch_rejected(self):
        with pytest.raises(ValueError):
            empirical_cf(_batch([]), 1.0, 0.0)


class TestHistogram:
    def test_density_integrates_to_one(self):
        rng = np.random.default_rng(3)
        b = _batch(rng.gamma(2.0, size=5000), rng.normal(size=5000))
        for comp in ("X", "M"):
            centers, dens = histogram_density(b, comp, 40)
            width = centers[1] - centers[0]
            assert np.sum(dens) * width == pytest.approx(1.0, rel=1e-12)

    def test_rejects_few_bins(self):
        with pytest.raises(ValueError):
            histogram_density(_batch([1.0, 2.0]), "X", 9)

    def test_rejects_unknown_component(self):
        with pytest.raises(ValueError):
            histogram_density(_batch([1.0, 2.0]), "Z", 20)


class TestKs:
    def test_one_sample_matches_scipy(self):
        law = IGParams(0.1, 1.21)
        x = ig_sample(law, RngSeed(11, 0), 2000)
        ours = ks_distance(_batch(x), "X", lambda t: ig_cdf(law, t))
        ref = stats.kstest(x, lambda t: ig_cdf(law, t)).statistic
        assert ours == pytest.approx(ref, rel=1e-12)

    def test_two_sample_matches_scipy(self):
        rng = np.random.default_rng(5)
        x, y = rng.normal(size=800), rng.normal(0.2, size=500)
        assert ks_two_sample(x, y) == pytest.approx(
            stats.ks_2samp(x, y).statistic, rel=1e-12)

    def test_two_sample_rejects_empty(self):
        with pytest.raises(ValueError):
            ks_two_sample([], [1.0])

    def test_critical_matches_kolmogorov_inverse(self):
        n = 100_000
        assert ks_critical(n) == pytest.approx(
            special.kolmogi(0.01) / np.sqrt(n), rel=1e-9)
        assert ks_critical(2000, level=0.05) == pytest.approx(
            special.kolmogi(0.05) / np.sqrt(2000), rel=1e-9)

    def test_critical_two_sample_scaling(self):
        c1 = ks_critical(4000)
        c2 = ks_critical(8000, 8000)
        assert c2 == pytest.approx(c1, rel=1e-12)  # nm/(n+m) = 4000

    def test_critical_rejects_bad_level(self):
        with pytest.raises(ValueError):
            ks_critical(100, level=0.0)
        with pytest.raises(ValueError):
            ks_critical(100, level=1.0)


class TestOscillationModuli:
    def test_monotone_path_has_zero_interior_modulus(self):
        grid = UniformGrid(200)
        x = np.linspace(0.0, 2.0, 201) ** 2
        rep = oscillation_moduli(x, 0.05, grid)
        assert np.max(rep.wprime) == 0.0
        assert rep.v_start > 0 and rep.v_end > 0
        assert rep.w == max(rep.v_start, rep.v_end)

    def test_isolated_spike_scores_full_height(self):
        # one spike of height 1 in the middle: for delta > 2 dt every
        # window centered there holds a flat-spike-flat triple
        n = 500
        grid = UniformGrid(n)
        x = np.zeros(n + 1)
        x[n // 2] = 1.0
        rep = oscillation_moduli(x, 3.0 / n, grid)
        assert rep.wprime[n // 2] == 1.0
        assert rep.w == 1.0
        assert rep.v_start == 0.0 and rep.v_end == 0.0

    def test_matches_brute_force(self):
        n = 60
        grid = UniformGrid(n)
        rng = np.random.default_rng(9)
        x = np.cumsum(rng.normal(size=n + 1))
        delta = 0.12
        rep = oscillation_moduli(x, delta, grid)
        half = int(np.floor(delta / grid.dt + 1e-9))
        for i in (0, 17, n // 2, n):
            lo, hi = max(0, i - half), min(n, i + half)
            # distance of the middle point from the interval spanned by
            # the outer two, maximized over ordered grid triples
            best = 0.0
            for j1 in range(lo, hi + 1):
                for j2 in range(j1, hi + 1):
                    for j3 in range(j2, hi + 1):
                        lo_v = min(x[j1], x[j3])
                        hi_v = max(x[j1], x[j3])
                        best = max(best, x[j2] - hi_v, lo_v - x[j2])
            assert rep.wprime[i] == pytest.approx(best, rel=1e-12)

    def test_rejects_bad_delta_and_shape(self):
        grid = UniformGrid(50)
        x = np.zeros(51)
        with pytest.raises(ValueError):
            oscillation_moduli(x, 0.0, grid)
        with pytest.raises(ValueError):
            oscillation_moduli(x, 1.0, grid)
        with pytest.raises(ValueError):
            oscillation_moduli(np.zeros(50), 0.1, grid)


class TestUpCrossings:
    def test_square_wave_counts_periods(self):
        k = 7
        path = np.tile([0.0, 1.0], k)
        assert up_crossings(path, 0.25, 0.75) == k

    def test_monotone_ramp_crosses_once(self):
        assert up_crossings(np.linspace(0, 1, 100), 0.2, 0.8) == 1

    def test_band_never_left(self):
        assert up_crossings(np.full(10, 0.5), 0.2, 0.8) == 0

    def test_rejects_inverted_band(self):
        with pytest.raises(ValueError):
            up_crossings(np.zeros(5), 0.8, 0.2)


class TestMomentChecks:
    def test_limit_batch_passes(self):
        # exact limit law samples satisfy every verdict by construction
        law = IGParams(M.g0 / (1 + M.lam), (M.g0 / M.nu) ** 2)
        rng = RngSeed(7, 0).generator()
        times = np.linspace(0.1, 1.0, 4)
        n = 20_000
        y = np.empty((4, n))
        prev = np.zeros(n)
        for i, t in enumerate(times):
            dt = t - (0.0 if i == 0 else times[i - 1])
            prev = prev + ig_sample(IGParams(law.mu * dt, law.lam * dt * dt), rng, n)
            y[i] = prev
        m_at = (1 + M.lam) * y - M.g0 * times[:, None]
        b = SampleBatch(X_T=y[-1], M_T=m_at[-1], H=None, N=2000, seed=7,
                        times=times, X_at=y, M_at=m_at)
        recs = moment_checks([b], M)
        metrics = {r["metric"] for r in recs}
        assert metrics == {"martingale_mean_T", "second_moment_ratio",
                           "drift_upper_bound", "martingale_mean",
                           "increment_upper_bound"}
        assert all(r["passed"] for r in recs)

    def test_biased_batch_fails(self):
        rng = np.random.default_rng(2)
        x = np.abs(rng.normal(size=5000)) + 0.05
        b = _batch(x, x)  # M_T = X_T: mean far from 0
        recs = moment_checks([b], M)
        rec = next(r for r in recs if r["metric"] == "martingale_mean_T")
        assert not rec["passed"]

    def test_drift_bound_uses_envelope(self):
        times = np.array([0.5, 1.0])
        x_at = np.vstack([np.full(400, 5.0), np.full(400, 5.0)])
        b = SampleBatch(X_T=x_at[-1], M_T=np.zeros(400), H=-0.3, N=100,
                        seed=0, times=times, X_at=x_at)
        recs = moment_checks([b], M)
        rec = next(r for r in recs if r["metric"] == "drift_upper_bound")
        assert rec["bound"] == pytest.approx(float(g0n_eval(M, -0.3, 0.5)))
        assert not rec["passed"]  # constant 5 far above the envelope
