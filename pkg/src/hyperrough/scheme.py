"""Simulation scheme for the hyper-rough square-root pair (X, M).

Discretizes the convolution equation

    X_t = G(t) + int_0^t (-lambda X_s + M_s) K(t - s) ds,
    d<M>_t = nu^2 dX_t,

on a uniform grid with exact kernel slab masses. Each step freezes
the drift integrand at the right endpoint of its slab, forms the
conditional predictor mu of the increment, and draws the increment
from an inverse Gaussian law whose mean and variance match the
implicit step equations; the martingale increment is then recovered
from the same linear relation. Increments of X are positive by
construction, so paths are nondecreasing. A coupled limit path is
driven by the same normal and uniform variates, which makes the
distance to the limit a per-path quantity.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .diagnostics import SampleBatch
from .ig import RngSeed, _ig_transform
from .kernels import (FractionalKernel, ModelParams, UniformGrid,
                      _damped_resolvent_family, g0n_eval)

__all__ = [
    "SchemeState",
    "PathPair",
    "simulate_pair",
    "simulate_coupled",
    "simulate_coupled_batch",
    "residual_path",
    "mean_recursion",
    "mean_volterra_solve",
    "mean_resolvent",
]

log = logging.getLogger(__name__)

# relative floor for the conditional increment predictor, in units
# of g0 * dt; keeps the IG parameters strictly positive
MU_FLOOR_REL = 1e-12


@dataclass(frozen=True)
class SchemeState:
    """Precomputed weight tables of the scheme for one (kernel, grid).

    Attributes
    ----------
    kernel : FractionalKernel
    grid : UniformGrid
    w : ndarray
        Slab masses w[m-1] = (m dt)^h - ((m-1) dt)^h for m = 1..N;
        positive, decreasing for h < 1, summing to T^h.
    dw : ndarray
        First differences w[1:] - w[:-1] used by the history update.
    dG : ndarray
        Increments of the drift envelope G over the grid slabs.
    """

    kernel: FractionalKernel
    grid: UniformGrid
    w: np.ndarray
    dw: np.ndarray
    dG: np.ndarray

    @classmethod
    def build(cls, m: ModelParams, kernel: FractionalKernel, grid: UniformGrid) -> "SchemeState":
        tg = grid.points()
        w = tg[1:] ** kernel.h - tg[:-1] ** kernel.h
        g = g0n_eval(m, kernel.H, tg)
        return cls(kernel=kernel, grid=grid, w=w, dw=np.diff(w), dG=np.diff(g))

    def __post_init__(self) -> None:
        if self.w.shape != (self.grid.N,):
            raise ValueError("weight table must have one entry per grid slab")
        if np.any(self.w <= 0):
            raise ValueError("kernel slab masses must be positive")


@dataclass(frozen=True)
class PathPair:
    """One simulated trajectory pair on a uniform grid.

    X is the nondecreasing integrated-variance path, M its driving
    martingale, both sampled at the grid points with X[0] = M[0] = 0.
    """

    grid: UniformGrid
    X: np.ndarray
    M: np.ndarray

    def __post_init__(self) -> None:
        n = self.grid.N + 1
        if self.X.shape != (n,) or self.M.shape != (n,):
            raise ValueError(f"paths must have {n} grid values")
        if self.X[0] != 0.0 or self.M[0] != 0.0:
            raise ValueError("paths must start at zero")
        if np.any(np.diff(self.X) < 0):
            raise ValueError("X must be nondecreasing")


def _resolve_mu_floor(m: ModelParams, grid: UniformGrid, mu_floor: float | None) -> float:
    if mu_floor is None:
        return MU_FLOOR_REL * m.g0 * grid.dt
    if not mu_floor > 0:
        raise ConfigError(f"mu_floor must be > 0, got {mu_floor}")
    return float(mu_floor)


def _draw_variates(seed: int, path_offset: int, n_paths: int, n_steps: int):
    """Per-path normal and uniform variates from counter-based streams.

    Path p draws from default_rng((seed, path_offset + p)): first its
    normal block, then its uniform block. The stream layout makes
    batch results independent of chunking and lets a single path be
    reproduced in isolation.
    """
    Z = np.empty((n_paths, n_steps))
    U = np.empty((n_paths, n_steps))
    for p in range(n_paths):
        g = RngSeed(seed, path_offset + p).generator()
        Z[p] = g.standard_normal(n_steps)
        U[p] = g.random(n_steps)
    return Z, U


def _run_rough_chunk(m, state, Z, U, mu_floor, Y=None, t_idx=(), keep_paths=False):
    """Advance one chunk of paths for a single Hurst index.

    Z, U have shape (paths, N). Y, when given, holds the coupled
    limit path values with shape (N+1, paths) for distance tracking.
    Returns per-path statistics and optionally full trajectories.
    """
    grid = state.grid
    N = grid.N
    P = Z.shape[0]
    w1 = state.w[0]
    a = 1.0 + m.lam * w1
    b = m.nu * w1
    g = np.cumsum(np.concatenate([[0.0], state.dG]))
    one_lam = 1.0 + m.lam

    X = np.zeros(P)
    M = np.zeros(P)
    D = np.zeros((N + 1, P))
    sup_abs_M = np.zeros(P)
    residual_sup = np.zeros(P)
    sup_dist = np.zeros(P) if Y is not None else None
    X_at = np.empty((len(t_idx), P))
    M_at = np.empty((len(t_idx), P))
    slot = {k: i for i, k in enumerate(t_idx)}
    Xp = np.empty((N + 1, P)) if keep_paths else None
    Mp = np.empty((N + 1, P)) if keep_paths else None
    if keep_paths:
        Xp[0] = 0.0
        Mp[0] = 0.0
    n_clamped = 0

    for k in range(N):
        mu_t = state.dG[k] + D[k] * w1
        if k:
            mu_t = mu_t + np.einsum("j,jp->p", state.dw[k - 1::-1], D[1:k + 1])
        low = mu_t < mu_floor
        if low.any():
            n_clamped += int(low.sum())
            np.maximum(mu_t, mu_floor, out=mu_t)
        dX = _ig_transform(mu_t / a, (mu_t / b) ** 2, Z[:, k] ** 2, U[:, k])
        M += (a * dX - mu_t) / w1
        X += dX
        D[k + 1] = M - m.lam * X
        np.maximum(sup_abs_M, np.abs(M), out=sup_abs_M)
        np.maximum(residual_sup, np.abs(g[k + 1] + M - one_lam * X), out=residual_sup)
        if sup_dist is not None:
            np.maximum(sup_dist, np.abs(X - Y[k + 1]), out=sup_dist)
        if keep_paths:
            Xp[k + 1] = X
            Mp[k + 1] = M
        i = slot.get(k + 1)
        if i is not None:
            X_at[i] = X
            M_at[i] = M

    if n_clamped:
        log.debug("clamped %d drift predictors below %g", n_clamped, mu_floor)
    return {
        "X_T": X, "M_T": M, "X_at": X_at, "M_at": M_at,
        "sup_abs_M": sup_abs_M, "residual_sup": residual_sup,
        "sup_dist": sup_dist, "n_clamped": n_clamped, "Xp": Xp, "Mp": Mp,
    }


def _run_limit_chunk(m, grid, Z, U, t_idx=(), keep_paths=False):
    """Advance one chunk of limit paths from the same variates.

    The limit pair is (Y, (1+lambda) Y - g0 t) with Y the inverse
    Gaussian Levy process of mean rate g0/(1+lambda) and shape rate
    g0^2/nu^2. Returns the full Y trajectory for coupling.
    """
    N = grid.N
    P = Z.shape[0]
    dt = grid.dt
    mu_s = m.g0 / (1.0 + m.lam) * dt
    lam_s = (m.g0 / m.nu) ** 2 * dt * dt
    one_lam = 1.0 + m.lam
    tg = grid.points()

    Y = np.empty((N + 1, P))
    Y[0] = 0.0
    for k in range(N):
        Y[k + 1] = Y[k] + _ig_transform(
            np.full(P, mu_s), np.full(P, lam_s), Z[:, k] ** 2, U[:, k])
    Mhat = one_lam * Y - m.g0 * tg[:, None]
    X_at = np.stack([Y[k] for k in t_idx]) if t_idx else np.empty((0, P))
    M_at = np.stack([Mhat[k] for k in t_idx]) if t_idx else np.empty((0, P))
    g = g0n_eval(m, -0.5, tg)
    resid = np.max(np.abs(g[:, None] + Mhat - one_lam * Y), axis=0)
    return {
        "X_T": Y[N], "M_T": Mhat[N], "X_at": X_at, "M_at": M_at,
        "sup_abs_M": np.max(np.abs(Mhat), axis=0), "residual_sup": resid,
        "Y": Y, "Mhat": Mhat if keep_paths else None,
    }


def simulate_pair(m: ModelParams, H: float, grid: UniformGrid, rng,
                  mu_floor: float | None = None) -> PathPair:
    """Simulate one (X, M) trajectory at Hurst index H.

    rng is an RngSeed or a numpy Generator; with RngSeed(seed, p) the
    path matches path p of a batch run with root seed `seed`. H at
    the boundary -1/2 produces the limit pair directly.
    """
    floor = _resolve_mu_floor(m, grid, mu_floor)
    if isinstance(rng, RngSeed):
        gen = rng.generator()
    else:
        gen = rng
    Z = gen.standard_normal(grid.N)[None, :]
    U = gen.random(grid.N)[None, :]
    if H == -0.5:
        res = _run_limit_chunk(m, grid, Z, U, keep_paths=True)
        Y = res["Y"][:, 0]
        return PathPair(grid=grid, X=Y, M=res["Mhat"][:, 0])
    if m.nu == 0:
        raise ValueError("nu must be nonzero to simulate the stochastic pair")
    state = SchemeState.build(m, FractionalKernel(H), grid)
    res = _run_rough_chunk(m, state, Z, U, floor, keep_paths=True)
    return PathPair(grid=grid, X=res["Xp"][:, 0], M=res["Mp"][:, 0])


def simulate_coupled(m: ModelParams, H_list, grid: UniformGrid, rng,
                     mu_floor: float | None = None):
    """Simulate one coupled trajectory per Hurst index plus the limit.

    All trajectories, including the limit pair, consume the same
    normal and uniform variates, so pathwise distances across H are
    meaningful. Returns (pairs, limit_pair) with pairs ordered as
    H_list. Repeating an H yields bit-identical paths.
    """
    if len(H_list) == 0:
        raise ValueError("H_list must not be empty")
    if m.nu == 0:
        raise ValueError("nu must be nonzero to simulate the stochastic pair")
    floor = _resolve_mu_floor(m, grid, mu_floor)
    if isinstance(rng, RngSeed):
        gen = rng.generator()
    else:
        gen = rng
    Z = gen.standard_normal(grid.N)[None, :]
    U = gen.random(grid.N)[None, :]
    lim = _run_limit_chunk(m, grid, Z, U, keep_paths=True)
    limit_pair = PathPair(grid=grid, X=lim["Y"][:, 0], M=lim["Mhat"][:, 0])
    pairs = []
    for H in H_list:
        state = SchemeState.build(m, FractionalKernel(H), grid)
        res = _run_rough_chunk(m, state, Z, U, floor, keep_paths=True)
        pairs.append(PathPair(grid=grid, X=res["Xp"][:, 0], M=res["Mp"][:, 0]))
    return pairs, limit_pair


def _marginal_indices(grid: UniformGrid, n_times: int) -> tuple:
    if n_times <= 0:
        return ()
    step = max(1, grid.N // n_times)
    idx = list(range(step, grid.N + 1, step))[:n_times]
    if idx and idx[-1] != grid.N:
        idx[-1] = grid.N
    return tuple(idx)


def simulate_coupled_batch(m: ModelParams, H_list, grid: UniformGrid, seed: int,
                           n_paths: int, *, n_marginals: int = 10,
                           chunk: int = 20000, mu_floor: float | None = None):
    """Monte Carlo batch of coupled runs over a ladder of Hurst indices.

    Simulates n_paths trajectories for every H in H_list and for the
    limit process, all driven by identical per-path variate streams.
    Paths are processed in chunks; results are independent of the
    chunk size. Returns (batches, limit_batch) where batches[i] is
    the SampleBatch for H_list[i].
    """
    if len(H_list) == 0:
        raise ValueError("H_list must not be empty")
    if n_paths <= 0:
        raise ValueError(f"n_paths must be positive, got {n_paths}")
    if chunk <= 0:
        raise ValueError(f"chunk must be positive, got {chunk}")
    if m.nu == 0:
        raise ValueError("nu must be nonzero to simulate the stochastic pair")
    floor = _resolve_mu_floor(m, grid, mu_floor)
    states = [SchemeState.build(m, FractionalKernel(H), grid) for H in H_list]
    t_idx = _marginal_indices(grid, n_marginals)
    times = grid.points()[list(t_idx)]

    keys = ("X_T", "M_T", "X_at", "M_at", "sup_abs_M", "residual_sup")
    acc = {H: {k: [] for k in (*keys, "sup_dist")} for H in H_list}
    acc_lim = {k: [] for k in keys}
    clamps = dict.fromkeys(H_list, 0)

    done = 0
    while done < n_paths:
        p = min(chunk, n_paths - done)
        Z, U = _draw_variates(seed, done, p, grid.N)
        lim = _run_limit_chunk(m, grid, Z, U, t_idx=t_idx)
        for k in keys:
            acc_lim[k].append(lim[k])
        for H, state in zip(H_list, states):
            res = _run_rough_chunk(m, state, Z, U, floor, Y=lim["Y"], t_idx=t_idx)
            for k in keys:
                acc[H][k].append(res[k])
            acc[H]["sup_dist"].append(res["sup_dist"])
            clamps[H] += res["n_clamped"]
        done += p

    def _cat(parts, axis=-1):
        return np.concatenate(parts, axis=axis)

    batches = []
    for H in H_list:
        d = acc[H]
        batches.append(SampleBatch(
            X_T=_cat(d["X_T"]), M_T=_cat(d["M_T"]), H=H, N=grid.N, seed=seed,
            times=times, X_at=_cat(d["X_at"]), M_at=_cat(d["M_at"]),
            sup_abs_M=_cat(d["sup_abs_M"]), residual_sup=_cat(d["residual_sup"]),
            sup_dist_limit=_cat(d["sup_dist"]), n_clamped=clamps[H]))
    limit_batch = SampleBatch(
        X_T=_cat(acc_lim["X_T"]), M_T=_cat(acc_lim["M_T"]), H=None, N=grid.N,
        seed=seed, times=times, X_at=_cat(acc_lim["X_at"]),
        M_at=_cat(acc_lim["M_at"]), sup_abs_M=_cat(acc_lim["sup_abs_M"]),
        residual_sup=_cat(acc_lim["residual_sup"]))
    return batches, limit_batch


def residual_path(p: PathPair, m: ModelParams, H: float) -> np.ndarray:
    """Pathwise residual G(t) + M_t - (1 + lambda) X_t on the grid.

    Vanishes in the limit H -> -1/2, where (1 + lambda) Y_t = g0 t + M_t.
    """
    g = g0n_eval(m, H, p.grid.points())
    return g + p.M - (1.0 + m.lam) * p.X


def mean_recursion(m: ModelParams, H: float, grid: UniformGrid) -> np.ndarray:
    """Exact mean of the simulated X along the grid.

    Runs the scheme recursion on the conditional means, which is
    linear, so the result equals E[X_{t_k}] of the sampled paths
    without Monte Carlo error.
    """
    state = SchemeState.build(m, FractionalKernel(H), grid)
    a = 1.0 + m.lam * state.w[0]
    N = grid.N
    x = np.zeros(N + 1)
    D = np.zeros(N + 1)
    for k in range(N):
        mu_t = state.dG[k] + D[k] * state.w[0]
        if k:
            mu_t = mu_t + np.dot(state.dw[k - 1::-1], D[1:k + 1])
        dx = mu_t / a
        D[k + 1] = D[k] + (a * dx - mu_t) / state.w[0] - m.lam * dx
        x[k + 1] = x[k] + dx
    return x


def mean_volterra_solve(m: ModelParams, H: float, grid: UniformGrid) -> np.ndarray:
    """Mean function by implicit product integration of the Volterra equation.

    Solves x(t) = G(t) - lambda int_0^t x(s) K(t-s) ds with the
    integrand frozen at the right endpoint of each kernel slab. This
    coincides with the scheme's mean recursion.
    """
    state = SchemeState.build(m, FractionalKernel(H), grid)
    g = np.cumsum(np.concatenate([[0.0], state.dG]))
    N = grid.N
    x = np.zeros(N + 1)
    a = 1.0 + m.lam * state.w[0]
    for k in range(1, N + 1):
        conv = np.dot(x[1:k], state.w[k - 1:0:-1]) if k > 1 else 0.0
        x[k] = (g[k] - m.lam * conv) / a
    return x


def mean_resolvent(m: ModelParams, H: float, grid: UniformGrid) -> np.ndarray:
    """Mean function via the resolvent of the damped convolution operator.

    Evaluates x = G - (R * G) where R is the resolvent of lambda K,
    computed from its spectral representation independently of the
    scheme weights. The convolution uses piecewise-linear slabs of G
    with exact moments of R, so the only error is the linearization
    of G within slabs. Cross-validates mean_volterra_solve.
    """
    if m.lam == 0:
        return g0n_eval(m, H, grid.points())
    kern = FractionalKernel(H)
    h = kern.h
    tg = grid.points()
    c = m.lam * math.gamma(h + 1.0)
    R, P, Q = _damped_resolvent_family(h, c, tg[1:])
    P = np.concatenate([[0.0], P])
    Q = np.concatenate([[0.0], Q])
    dP = np.diff(P)
    dQ = np.diff(Q)
    wQ = tg[1:] * dP - dQ
    G = g0n_eval(m, H, tg)
    slope = np.diff(G) / grid.dt
    conv = np.zeros(grid.N + 1)
    conv[1:] = np.convolve(G[:-1], dP)[:grid.N] + np.convolve(slope, wQ)[:grid.N]
    return G - conv
