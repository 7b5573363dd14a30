"""Acceptance gate: one verdict per primary requirement.

Each test records a [PASS]/[FAIL] scorecard line (printed in the
terminal summary) and then asserts it. The two heavy Monte Carlo
runs are module-scoped fixtures shared across criteria; their wall
time is charged against the runtime budgets of the criteria that
consume them.
"""

import time

import numpy as np
import pytest
from conftest import record_verdict

from hyperrough.cli import DEFAULT_LADDER, DEFAULT_U_GRID, DEFAULT_V_GRID
from hyperrough.diagnostics import (empirical_cf, ks_critical, ks_distance,
                                    ks_two_sample, moment_checks,
                                    oscillation_moduli, up_crossings)
from hyperrough.ig import (IGParams, RngSeed, hitting_time_sample, ig_cdf,
                           ig_sample)
from hyperrough.kernels import (FractionalKernel, ModelParams, UniformGrid,
                                dirac_limit_gap, resolvent_residual)
from hyperrough.riccati import (char_functional, char_functional_limit,
                                joint_cf_limit)
from hyperrough.riccati import TestFunctionPair as FunctionPair
from hyperrough.scheme import mean_resolvent, simulate_coupled_batch, simulate_pair

SEED = 20260819
MODEL = ModelParams()
GRID = UniformGrid(2000)
PATHS = 100_000
LIMIT_LAW = IGParams(0.1, 1.21)


@pytest.fixture(scope="module")
def run_h49():
    t0 = time.perf_counter()
    batches, limit = simulate_coupled_batch(MODEL, [-0.49], GRID, SEED, PATHS)
    return batches[0], limit, time.perf_counter() - t0


@pytest.fixture(scope="module")
def run_ladder():
    t0 = time.perf_counter()
    batches, limit = simulate_coupled_batch(MODEL, list(DEFAULT_LADDER), GRID,
                                            SEED, PATHS)
    return batches, limit, time.perf_counter() - t0


def test_resolvent_identity():
    t0 = time.perf_counter()
    worst, ratios = 0.0, []
    for H in (-0.45, -0.3, 0.0, 0.5):
        kern = FractionalKernel(H)
        for alpha in (1.0, 4.0):
            r1 = resolvent_residual(kern, alpha, UniformGrid(2000))
            r2 = resolvent_residual(kern, alpha, UniformGrid(4000))
            worst = max(worst, r1)
            ratios.append(r1 / r2)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-3 and min(ratios) >= 1.5 and elapsed < 10
    record_verdict(ok, "resolvent identity",
                   f"max residual {worst:.3g} (<= 1e-3), min refinement "
                   f"ratio {min(ratios):.2f} (>= 1.5), {elapsed:.1f}s (< 10s)")
    assert ok


def test_sampler_vs_hitting_time_oracle():
    t0 = time.perf_counter()
    n = 10_000
    x = ig_sample(LIMIT_LAW, RngSeed(SEED, 0), n)
    y = hitting_time_sample(11.0, 1.0, 1.1, 1.0, RngSeed(SEED, 1), n)
    ks = ks_two_sample(x, y)
    crit = ks_critical(n, n)
    elapsed = time.perf_counter() - t0
    ok = ks < crit and elapsed < 60
    record_verdict(ok, "sampler vs hitting-time oracle",
                   f"two-sample KS {ks:.4f} < critical {crit:.4f} at 1%, "
                   f"{elapsed:.1f}s (< 60s)")
    assert ok


def test_martingale_moment_identities(run_h49):
    batch, _, elapsed = run_h49
    recs = moment_checks([batch], MODEL)
    mt = next(r for r in recs if r["metric"] == "martingale_mean_T")
    ratio = next(r for r in recs if r["metric"] == "second_moment_ratio")
    drift = [r for r in recs if r["metric"] == "drift_upper_bound"]
    ok = (mt["passed"] and ratio["passed"] and len(drift) == 10
          and all(r["passed"] for r in drift) and elapsed < 600)
    record_verdict(ok, "martingale moment identities",
                   f"E[M_T] {mt['value']:.2e} within 3 SE {3 * mt['stderr']:.2e}, "
                   f"moment ratio {ratio['value']:.4f} in [0.97, 1.03], "
                   f"drift bound holds at {len(drift)} times, "
                   f"{elapsed:.0f}s (< 600s)")
    assert ok


def test_mean_oracle_equivalence(run_h49):
    batch, _, _ = run_h49
    mc = float(np.mean(batch.X_T))
    exact = float(mean_resolvent(MODEL, -0.49, GRID)[-1])
    rel = abs(mc / exact - 1.0)
    ok = rel <= 0.02
    record_verdict(ok, "mean oracle equivalence",
                   f"Monte Carlo E[X_T] {mc:.5f} vs linear-equation solution "
                   f"{exact:.5f}, relative error {rel:.2%} (<= 2%)")
    assert ok


def test_characteristic_functional_ladder():
    t0 = time.perf_counter()
    pair = FunctionPair.constants(1.0, 0.5)
    lim = char_functional_limit(MODEL, pair)
    gaps = [abs(char_functional(MODEL, FractionalKernel(H), GRID, pair) - lim)
            for H in (-0.3, -0.4, -0.45, -0.49, -0.499)]
    elapsed = time.perf_counter() - t0
    ok = (all(a > b for a, b in zip(gaps, gaps[1:])) and gaps[-1] < 0.05
          and elapsed < 30)
    record_verdict(ok, "characteristic functional ladder",
                   "gap to limit " + " > ".join(f"{g:.2e}" for g in gaps)
                   + f", final < 0.05, {elapsed:.1f}s (< 30s)")
    assert ok


def test_limit_functional_identity():
    t0 = time.perf_counter()
    worst = 0.0
    for u in np.linspace(-3, 3, 5):
        for v in np.linspace(-3, 3, 5):
            a = char_functional_limit(MODEL, FunctionPair.constants(u, v))
            b = joint_cf_limit(MODEL, u, v)
            worst = max(worst, abs(a - b))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 5
    record_verdict(ok, "limit functional identity",
                   f"max gap {worst:.2e} (<= 1e-10) on the 5x5 grid, "
                   f"{elapsed:.1f}s (< 5s)")
    assert ok


def test_terminal_law_convergence(run_ladder, run_h49):
    batches, _, ladder_elapsed = run_ladder
    batch49, _, h49_elapsed = run_h49
    t0 = time.perf_counter()
    cf_err = max(abs(empirical_cf(batch49, u, v) - joint_cf_limit(MODEL, u, v))
                 for u in DEFAULT_U_GRID for v in DEFAULT_V_GRID)
    cdf = lambda x: ig_cdf(LIMIT_LAW, x)
    ks = [ks_distance(b, "X", cdf) for b in batches]
    elapsed = ladder_elapsed + h49_elapsed + time.perf_counter() - t0
    ok = (cf_err <= 0.05 and all(a > b for a, b in zip(ks, ks[1:]))
          and ks[-1] <= 0.05 and elapsed < 900)
    record_verdict(ok, "terminal law convergence",
                   f"max joint-CF error {cf_err:.4f} (<= 0.05), KS "
                   + " > ".join(f"{k:.4f}" for k in ks)
                   + f", final <= 0.05, {elapsed:.0f}s (< 900s)")
    assert ok


def test_residual_sup_norm_trend():
    t0 = time.perf_counter()
    batches, _ = simulate_coupled_batch(MODEL, [-0.05, -0.25, -0.45, -0.49],
                                        GRID, SEED, 1000)
    means = [float(np.mean(b.residual_sup)) for b in batches]
    elapsed = time.perf_counter() - t0
    ok = all(a > b for a, b in zip(means, means[1:])) and elapsed < 300
    record_verdict(ok, "residual sup-norm trend",
                   "mean sup-residual " + " > ".join(f"{v:.4f}" for v in means)
                   + f", {elapsed:.0f}s (< 300s)")
    assert ok


def test_dirac_approximation_trend():
    t0 = time.perf_counter()
    gaps = [dirac_limit_gap(FractionalKernel(H), np.cos, 1.0)
            for H in DEFAULT_LADDER]
    elapsed = time.perf_counter() - t0
    ok = (all(a > b for a, b in zip(gaps, gaps[1:])) and gaps[-1] <= 0.02
          and elapsed < 5)
    record_verdict(ok, "dirac approximation trend",
                   "gap " + " > ".join(f"{g:.2e}" for g in gaps)
                   + f", final <= 0.02, {elapsed:.1f}s (< 5s)")
    assert ok


def test_oscillation_moduli():
    t0 = time.perf_counter()
    # interior modulus vanishes on simulated nondecreasing X paths
    worst = 0.0
    for H in (-0.25, -0.49):
        for p in range(20):
            pair = simulate_pair(MODEL, H, GRID, RngSeed(SEED, p))
            rep = oscillation_moduli(pair.X, 0.01, GRID)
            worst = max(worst, float(np.max(rep.wprime)))
    # an isolated spike of height 1 at t = 1/2 scores exactly 1 once the
    # window can hold a flat-spike-flat triple (delta > 2/n)
    n = 500
    spike_grid = UniformGrid(n)
    spike = np.zeros(n + 1)
    spike[n // 2] = 1.0
    rep = oscillation_moduli(spike, 3.0 / n, spike_grid)
    spike_ok = rep.wprime[n // 2] == 1.0 and rep.w == 1.0
    # up-crossing counts are exact on sawtooth paths
    saw_ok = all(up_crossings(np.tile([0.0, 1.0], k), 0.25, 0.75) == k
                 for k in (1, 3, 8))
    elapsed = time.perf_counter() - t0
    ok = worst == 0.0 and spike_ok and saw_ok and elapsed < 10
    record_verdict(ok, "oscillation moduli",
                   f"interior modulus {worst:.1f} on 40 simulated paths, "
                   f"spike scores {rep.wprime[n // 2]:.1f}, sawtooth counts "
                   f"exact, {elapsed:.1f}s (< 10s)")
    assert ok
