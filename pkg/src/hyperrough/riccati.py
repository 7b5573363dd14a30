"""Volterra Riccati solver and characteristic functionals.

Computes E[exp(i int f dX + i int h dM)] for the hyper-rough pair
through the associated convolution Riccati equation, together with
its closed-form counterpart under the inverse Gaussian limit law.
The solver works in time-to-maturity: psi(s) is the Riccati value at
distance s from the horizon T, and test functions are evaluated at
calendar time T - s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import NumericalError
from .ig import IGProcessParams, levy_exponent
from .kernels import FractionalKernel, ModelParams, UniformGrid

__all__ = [
    "TestFunctionPair",
    "RiccatiSolution",
    "F_eval",
    "solve_riccati",
    "psi_limit",
    "char_functional",
    "char_functional_limit",
    "joint_cf_limit",
]

# cap on Re(psi): the exact solution has nonpositive real part, so a
# positive real part beyond rounding slack means the step size cannot
# resolve the equation
RE_PSI_TOL = 1e-9


@dataclass(frozen=True)
class TestFunctionPair:
    """Bounded measurable test functions (f, h) on [0, T].

    f weighs dX, h weighs dM. Values may be real or complex; both
    callables must accept numpy arrays of times.
    """

    f: object
    h: object

    def __post_init__(self) -> None:
        if not callable(self.f) or not callable(self.h):
            raise ValueError("f and h must be callables of time")

    @classmethod
    def constants(cls, u, v) -> "TestFunctionPair":
        """Pair of constant functions f = u, h = v."""
        return cls(f=lambda t: np.full_like(np.asarray(t, float), u, dtype=complex),
                   h=lambda t: np.full_like(np.asarray(t, float), v, dtype=complex))


@dataclass(frozen=True)
class RiccatiSolution:
    """Riccati solution on a grid in time-to-maturity.

    psi[k] approximates psi(s_k); F[k] holds F(s_k, psi[k]). The real
    part of psi must stay nonpositive up to rounding slack, otherwise
    the construction refuses the solution.
    """

    grid: UniformGrid
    kernel: FractionalKernel
    psi: np.ndarray
    F: np.ndarray

    def __post_init__(self) -> None:
        n = self.grid.N + 1
        if self.psi.shape != (n,) or self.F.shape != (n,):
            raise ValueError(f"psi and F must have {n} grid values")
        worst = float(np.max(self.psi.real))
        if worst > RE_PSI_TOL:
            raise NumericalError(
                f"Re(psi) reached {worst:.3e} > {RE_PSI_TOL:.0e}; "
                "refine the grid")


def _coeffs(m: ModelParams, f_val, h_val):
    """Quadratic coefficients of F(s, psi) = c0 + c1 psi + c2 psi^2."""
    f_val = np.asarray(f_val, complex)
    h_val = np.asarray(h_val, complex)
    c0 = 1j * f_val - 0.5 * m.nu ** 2 * h_val ** 2
    c1 = 1j * m.nu ** 2 * h_val - m.lam
    c2 = 0.5 * m.nu ** 2
    return c0, c1, c2


def F_eval(m: ModelParams, f_val, h_val, psi):
    """Riccati right side F(s, psi) for test values f(s), h(s)."""
    c0, c1, c2 = _coeffs(m, f_val, h_val)
    psi = np.asarray(psi, complex)
    out = c0 + c1 * psi + c2 * psi * psi
    return complex(out) if out.ndim == 0 else out


def _pair_values(pair: TestFunctionPair, m: ModelParams, s):
    """Test function values at time-to-maturity s, calendar time T - s."""
    t = m.T - np.asarray(s, float)
    return np.asarray(pair.f(t), complex), np.asarray(pair.h(t), complex)


def solve_riccati(m: ModelParams, kernel: FractionalKernel, grid: UniformGrid,
                  pair: TestFunctionPair) -> RiccatiSolution:
    """Solve psi(s) = int_0^s K(s - r) F(r, psi(r)) dr on the grid.

    Product integration with exact kernel slab masses, the integrand
    frozen at the right endpoint of each slab. The current step is
    semi-implicit: linear terms are solved exactly, the quadratic one
    is linearized around the previous value. Unconditionally stable
    for the damped equation, where an explicit step is not once
    lambda times the first slab mass exceeds one.
    """
    N = grid.N
    tg = grid.points()
    w = tg[1:] ** kernel.h - tg[:-1] ** kernel.h
    fv, hv = _pair_values(pair, m, tg)
    c0, c1, c2 = _coeffs(m, fv, hv)
    psi = np.zeros(N + 1, complex)
    F = np.zeros(N + 1, complex)
    F[0] = c0[0]
    w1 = w[0]
    for k in range(1, N + 1):
        hist = np.dot(F[1:k], w[k - 1:0:-1]) if k > 1 else 0.0
        denom = 1.0 - w1 * (c1[k] + c2 * psi[k - 1])
        psi[k] = (hist + w1 * c0[k]) / denom
        F[k] = c0[k] + c1[k] * psi[k] + c2 * psi[k] * psi[k]
    return RiccatiSolution(grid=grid, kernel=kernel, psi=psi, F=F)


def psi_limit(m: ModelParams, f_val, h_val):
    """Fixed point of the Riccati equation in the limit H -> -1/2.

    Principal branch; the real part is nonpositive for real test
    values. Solves the quadratic obtained when the kernel mass
    collapses to an instantaneous unit impulse.
    """
    f_val = np.asarray(f_val, complex)
    h_val = np.asarray(h_val, complex)
    ol = 1.0 + m.lam
    z = f_val + ol * h_val
    root = np.sqrt(1.0 - 2.0j * (m.nu ** 2 / ol ** 2) * z)
    out = -1j * h_val + (ol / m.nu ** 2) * (1.0 - root)
    return complex(out) if out.ndim == 0 else out


def _omega_weights(m: ModelParams, h: float, a, b):
    """Exact integrals of omega(s) = V0 + lam theta (T - s)^h over [a, b]."""
    hp1 = h + 1.0
    return (m.V0 * (b - a)
            + m.lam * m.theta * ((m.T - a) ** hp1 - (m.T - b) ** hp1) / hp1)


def char_functional(m: ModelParams, kernel: FractionalKernel, grid: UniformGrid,
                    pair: TestFunctionPair, *, prefix: int = 64,
                    sub: int = 128) -> complex:
    """Joint characteristic functional E[exp(i int f dX + i int h dM)].

    Exponentiates int_0^T F(s, psi(s)) omega(s) ds with the forcing
    density omega(s) = V0 + lam theta (T - s)^h integrated exactly on
    each slab and psi interpolated at slab midpoints. The first
    `prefix` slabs, where psi has a sharp layer, are re-solved on a
    uniform sub-grid with `sub` steps per slab.
    """
    if prefix < 1 or sub < 1:
        raise ValueError(f"prefix and sub must be >= 1, got {prefix}, {sub}")
    if prefix >= grid.N:
        raise ValueError(f"prefix must be < N = {grid.N}, got {prefix}")
    h = kernel.h
    tg = grid.points()
    sol = solve_riccati(m, kernel, grid, pair)
    # main slabs: prefix..N-1
    a, b = tg[prefix:-1], tg[prefix + 1:]
    mid_s = 0.5 * (a + b)
    mid_psi = 0.5 * (sol.psi[prefix:-1] + sol.psi[prefix + 1:])
    fv, hv = _pair_values(pair, m, mid_s)
    total = np.sum(F_eval(m, fv, hv, mid_psi) * _omega_weights(m, h, a, b))
    # boundary layer [0, prefix*dt] on a fine sub-grid
    fine = UniformGrid(prefix * sub, T=prefix * grid.dt)
    fsol = solve_riccati(m, kernel, fine, pair)
    ft = fine.points()
    fa, fb = ft[:-1], ft[1:]
    fmid_s = 0.5 * (fa + fb)
    fmid_psi = 0.5 * (fsol.psi[:-1] + fsol.psi[1:])
    fv, hv = _pair_values(pair, m, fmid_s)
    total += np.sum(F_eval(m, fv, hv, fmid_psi) * _omega_weights(m, h, fa, fb))
    return complex(np.exp(total))


def char_functional_limit(m: ModelParams, pair: TestFunctionPair,
                          tol: float = 1e-12) -> complex:
    """Limit of the characteristic functional as H -> -1/2.

    Equals exp(g0 int_0^T psi_limit(f(s), h(s)) ds); the integral is
    evaluated by adaptive quadrature on real and imaginary parts.
    """

    def integrand(t):
        fv = complex(np.asarray(pair.f(t), complex))
        hv = complex(np.asarray(pair.h(t), complex))
        return m.g0 * psi_limit(m, fv, hv)

    re, re_err = quad(lambda t: integrand(t).real, 0.0, m.T,
                      epsabs=tol, epsrel=tol, limit=200)
    im, im_err = quad(lambda t: integrand(t).imag, 0.0, m.T,
                      epsabs=tol, epsrel=tol, limit=200)
    if re_err > 1e-9 or im_err > 1e-9:
        raise NumericalError(
            f"limit functional quadrature error {max(re_err, im_err):.2e}")
    return complex(np.exp(re + 1j * im))


def joint_cf_limit(m: ModelParams, u: float, v: float) -> complex:
    """Joint CF of the limit pair (Y_T, (1+lambda) Y_T - g0 T).

    E[exp(i u Y_T + i v M_T)] = exp(phi(u + (1+lambda) v) T - i v g0 T)
    with phi the Levy exponent of the inverse Gaussian process Y.
    """
    proc = IGProcessParams(m.g0 / (1.0 + m.lam), (m.g0 / m.nu) ** 2)
    phi = levy_exponent(proc, u + (1.0 + m.lam) * v)
    return complex(np.exp(phi * m.T - 1j * v * m.g0 * m.T))
