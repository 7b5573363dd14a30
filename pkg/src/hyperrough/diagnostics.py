"""Statistical and pathwise diagnostics for simulated batches.

Empirical characteristic functions, normalized histograms, KS
distances with asymptotic critical values, moment verdicts, and the
cadlag oscillation and up-crossing moduli used as tightness
diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import ModelParams, UniformGrid, g0n_eval

__all__ = [
    "SampleBatch",
    "ModulusReport",
    "empirical_cf",
    "histogram_density",
    "ks_distance",
    "ks_two_sample",
    "ks_critical",
    "oscillation_moduli",
    "up_crossings",
    "moment_checks",
]


@dataclass
class SampleBatch:
    """Terminal samples (X_T, M_T) of one simulation run, plus metadata.

    Attributes
    ----------
    X_T, M_T : ndarray
        Per-path terminal values; X_T must be nonnegative.
    H : float or None
        Hurst index of the run, None for the limit sampler.
    N : int
        Step count of the generating grid.
    seed : int
        Root seed of the run.
    times : ndarray, optional
        Output times of the stored marginals.
    X_at, M_at : ndarray, optional
        Marginal samples at the output times, shape (len(times), paths).
    sup_abs_M : ndarray, optional
        Per-path running maximum of |M_t|.
    residual_sup : ndarray, optional
        Per-path sup-norm of the drift-martingale residual.
    sup_dist_limit : ndarray, optional
        Per-path sup-norm distance to the coupled limit path.
    n_clamped : int
        Number of clamped drift predictors across all paths and steps.
    """

    X_T: np.ndarray
    M_T: np.ndarray
    H: float | None
    N: int
    seed: int
    times: np.ndarray | None = None
    X_at: np.ndarray | None = None
    M_at: np.ndarray | None = None
    sup_abs_M: np.ndarray | None = None
    residual_sup: np.ndarray | None = None
    sup_dist_limit: np.ndarray | None = None
    n_clamped: int = 0

    def __post_init__(self) -> None:
        self.X_T = np.asarray(self.X_T, float)
        self.M_T = np.asarray(self.M_T, float)
        if self.X_T.shape != self.M_T.shape:
            raise ValueError("X_T and M_T must have matching shapes")
        if np.any(self.X_T < 0):
            raise ValueError("X_T samples must be nonnegative")

    @property
    def n_paths(self) -> int:
        return self.X_T.size


@dataclass
class ModulusReport:
    """Oscillation moduli of one grid path at window radius delta.

    w bounds the path's oscillation as max of the interior modulus
    profile and the two endpoint oscillations, so w >= v_start and
    w >= v_end always.
    """

    delta: float
    w: float
    centers: np.ndarray
    wprime: np.ndarray
    v_start: float
    v_end: float
    up_cross: dict | None = None


def empirical_cf(batch: SampleBatch, u: float, v: float) -> complex:
    """Empirical joint characteristic function mean(exp(i(u X_T + v M_T)))."""
    if batch.n_paths == 0:
        raise ValueError("empirical_cf requires a nonempty batch")
    return complex(np.mean(np.exp(1j * (u * batch.X_T + v * batch.M_T))))


def _component(batch: SampleBatch, component: str) -> np.ndarray:
    if component == "X":
        return batch.X_T
    if component == "M":
        return batch.M_T
    raise ValueError(f"component must be 'X' or 'M', got {component!r}")


def histogram_density(batch: SampleBatch, component: str, bins: int):
    """Normalized histogram of one terminal component.

    Returns (centers, densities) with the densities integrating to 1.
    """
    if bins < 10:
        raise ValueError(f"bins must be >= 10, got {bins}")
    samples = _component(batch, component)
    dens, edges = np.histogram(samples, bins=bins, density=True)
    return 0.5 * (edges[:-1] + edges[1:]), dens


def ks_distance(batch: SampleBatch, component: str, reference_cdf) -> float:
    """One-sample KS statistic of a terminal component against a cdf."""
    x = np.sort(_component(batch, component))
    n = x.size
    if n == 0:
        raise ValueError("ks_distance requires a nonempty batch")
    f = np.asarray(reference_cdf(x), float)
    steps = np.arange(1, n + 1) / n
    return float(max(np.max(steps - f), np.max(f - (steps - 1.0 / n))))


def ks_two_sample(x, y) -> float:
    """Two-sample KS statistic between two sample arrays."""
    x = np.sort(np.asarray(x, float))
    y = np.sort(np.asarray(y, float))
    if x.size == 0 or y.size == 0:
        raise ValueError("ks_two_sample requires nonempty samples")
    allv = np.concatenate([x, y])
    fx = np.searchsorted(x, allv, side="right") / x.size
    fy = np.searchsorted(y, allv, side="right") / y.size
    return float(np.max(np.abs(fx - fy)))


def ks_critical(n: int, m: int | None = None, level: float = 0.01) -> float:
    """Asymptotic Kolmogorov critical value at the given level.

    One-sample for m None, else two-sample with the effective size
    n*m/(n+m). Valid for large samples (n >= 10^3 in practice here).
    """
    if not 0 < level < 1:
        raise ValueError(f"level must be in (0,1), got {level}")

    def surv(c):
        return 2.0 * sum((-1) ** (k - 1) * math.exp(-2.0 * k * k * c * c)
                         for k in range(1, 101))

    lo, hi = 1e-6, 5.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if surv(mid) > level:
            lo = mid
        else:
            hi = mid
    c = 0.5 * (lo + hi)
    eff = n if m is None else n * m / (n + m)
    return c / math.sqrt(eff)


def oscillation_moduli(path, delta: float, grid: UniformGrid) -> ModulusReport:
    """Oscillation moduli of a grid path viewed as a cadlag step function.

    Computes the interior modulus profile w'(x, t, delta) exactly over
    grid triples t1 <= t2 <= t3 within [t - delta, t + delta], the
    endpoint oscillations v at 0 and T, and their maximum w. The
    per-center scan uses prefix and suffix extrema, linear in the
    window size. Grid restriction of the continuum suprema is exact
    for piecewise-constant paths.
    """
    x = np.asarray(path, float)
    if x.shape != (grid.N + 1,):
        raise ValueError(f"path must have {grid.N + 1} grid values, got shape {x.shape}")
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    if delta >= grid.T:
        raise ValueError(f"delta must be < T = {grid.T}, got {delta}")
    n = x.size
    # window radius in grid steps; tolerate rounding at exact multiples
    half = int(math.floor(delta / grid.dt + 1e-9))
    wprime = np.zeros(n)
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n - 1, i + half)
        seg = x[lo:hi + 1]
        pmin = np.minimum.accumulate(seg)
        pmax = np.maximum.accumulate(seg)
        smin = np.minimum.accumulate(seg[::-1])[::-1]
        smax = np.maximum.accumulate(seg[::-1])[::-1]
        over = seg - np.maximum(pmin, smin)
        under = np.minimum(pmax, smax) - seg
        wprime[i] = max(0.0, float(np.max(over)), float(np.max(under)))
    v_start = float(np.ptp(x[: half + 1]))
    v_end = float(np.ptp(x[n - 1 - half:]))
    w = max(float(np.max(wprime)), v_start, v_end)
    return ModulusReport(delta=delta, w=w, centers=grid.points(), wprime=wprime,
                         v_start=v_start, v_end=v_end)


def up_crossings(path, a: float, b: float) -> int:
    """Number of up-crossings of the path from below a to above b.

    Counts the largest k admitting times t_1 < ... < t_{2k} with the
    path strictly below a at odd indices and strictly above b at even
    ones. Greedy single pass, which attains the maximum.
    """
    if not b > a:
        raise ValueError(f"up_crossings requires a < b, got a={a}, b={b}")
    state = 0
    for v in np.asarray(path, float):
        if state % 2 == 0:
            if v < a:
                state += 1
        elif v > b:
            state += 1
    return state // 2


def _record(batch, metric, value, stderr, passed, time=None, bound=None):
    return {
        "H": batch.H, "N": batch.N, "seed": batch.seed, "metric": metric,
        "time": time, "value": float(value), "stderr": float(stderr),
        "bound": None if bound is None else float(bound), "passed": bool(passed),
    }


def moment_checks(batches, m: ModelParams) -> list[dict]:
    """Moment verdicts for a collection of sample batches.

    Per batch: terminal martingale mean within 3 SE of 0, second
    moment ratio E[M_T^2]/(nu^2 E[X_T]) within [0.97, 1.03], and at
    each stored output time the martingale mean test, the drift upper
    bound E[X_t] <= G(t) + 3 SE, and the increment upper bound
    E[X_t - X_s] <= G(t) - G(s) + 3 SE. Returns flat records with
    Monte Carlo standard errors.
    """
    out = []
    for batch in batches:
        n = batch.n_paths
        rt = math.sqrt(n)
        se_m = float(np.std(batch.M_T)) / rt
        mean_m = float(np.mean(batch.M_T))
        out.append(_record(batch, "martingale_mean_T", mean_m, se_m,
                           abs(mean_m) <= 3 * se_m))
        ex = float(np.mean(batch.X_T))
        m2 = batch.M_T ** 2
        ratio = float(np.mean(m2)) / (m.nu ** 2 * ex)
        # delta-method standard error of the moment ratio
        r = m2 / (m.nu ** 2 * ex) - ratio * batch.X_T / ex
        se_r = float(np.std(r)) / rt
        out.append(_record(batch, "second_moment_ratio", ratio, se_r,
                           0.97 <= ratio <= 1.03))
        hh = -0.5 if batch.H is None else batch.H
        if batch.times is not None and batch.X_at is not None:
            g_prev, x_prev = 0.0, np.zeros(n)
            for i, t in enumerate(batch.times):
                g = float(g0n_eval(m, hh, float(t)))
                xt = batch.X_at[i]
                mean_x, se_x = float(np.mean(xt)), float(np.std(xt)) / rt
                out.append(_record(batch, "drift_upper_bound", mean_x, se_x,
                                   mean_x <= g + 3 * se_x, time=float(t), bound=g))
                if batch.M_at is not None:
                    mt = batch.M_at[i]
                    mm, sm = float(np.mean(mt)), float(np.std(mt)) / rt
                    out.append(_record(batch, "martingale_mean", mm, sm,
                                       abs(mm) <= 3 * sm, time=float(t)))
                inc = xt - x_prev
                mi, si = float(np.mean(inc)), float(np.std(inc)) / rt
                out.append(_record(batch, "increment_upper_bound", mi, si,
                                   mi <= (g - g_prev) + 3 * si, time=float(t),
                                   bound=g - g_prev))
                g_prev, x_prev = g, xt
    return out
