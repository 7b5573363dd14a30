"""Generate high-precision reference values frozen into the test suite.

Every constant asserted in the tests that is not a hand-checkable
identity is derived here, independently of the library code, with
mpmath at 40 digits. Rerun and diff when touching the affected tests.
"""

import mpmath as mp

mp.mp.dps = 40

LAM = mp.mpf(10)
NU = mp.mpf(1)
G0 = mp.mpf("1.1")


def show(label, value):
    if isinstance(value, mp.mpc):
        print(f"{label} = {mp.nstr(value.real, 17)} + {mp.nstr(value.imag, 17)}j")
    else:
        print(f"{label} = {mp.nstr(mp.mpf(value), 17)}")


# power-law kernel point values
H = mp.mpf("-0.3")
h = H + mp.mpf("0.5")
show("kernel_eval(H=-0.3, t=0.25)", h * mp.mpf("0.25") ** (H - mp.mpf("0.5")))
show("slab(H=-0.3, 0.25, 1)", 1 - mp.mpf("0.25") ** h)

# Mittag-Leffler anchors
show("E_{1,1}(1)", mp.e)
show("E_{0.5,0.5}(0)", 1 / mp.gamma(mp.mpf("0.5")))


def ml(a, b, z):
    total = mp.mpf(0)
    zk = mp.mpf(1)
    for k in range(4000):
        term = zk / mp.gamma(a * k + b)
        total += term
        if abs(term) < mp.mpf("1e-45") and k > 4:
            break
        zk *= z
    return total


show("E_{0.2,0.2}(0.8)", ml(mp.mpf("0.2"), mp.mpf("0.2"), mp.mpf("0.8")))

# growth resolvent of alpha*K at H=-0.3, alpha=1: value and identity defect
alpha = mp.mpf(1)
pref = alpha * h * mp.gamma(h)


def resolvent(t):
    return pref * t ** (h - 1) * ml(h, h, pref * t ** h)


t0 = mp.mpf("0.5")
show("R_1(0.5) at H=-0.3", resolvent(t0))
conv = mp.quad(lambda s: alpha * h * s ** (h - 1) * resolvent(t0 - s), [0, t0 / 2, t0])
show("identity defect |K*R - (R - K)|(0.5)", abs(conv - (resolvent(t0) - alpha * h * t0 ** (h - 1))))

# convolution of f(t)=t against K at t=1, H=-0.3 (Beta integral)
show("int_0^1 (1-s) K(s) ds, H=-0.3", 1 / (h + 1))

# Dirac gaps: f(s)=s at H=-0.49 and f=cos at H=-0.499, t=1
h49 = mp.mpf("0.01")
show("dirac gap f(s)=s, H=-0.49, t=1", h49 / (h49 + 1))
h499 = mp.mpf("0.001")
# substitute r = s^h so the singular measure integral becomes smooth
val = mp.quad(lambda r: mp.cos(1 - r ** (1 / h499)), [0, 1])
show("dirac gap f=cos, H=-0.499, t=1", abs(val - mp.cos(1)))
valc = mp.quad(lambda r: mp.cos(1 - r ** (1 / mp.mpf("0.01"))), [0, 1])
show("dirac gap f=cos, H=-0.49, t=1", abs(valc - mp.cos(1)))

# Inverse Gaussian law
show("ig_pdf(1,1,1)", 1 / mp.sqrt(2 * mp.pi))
show("ig variance mu^3/lam (0.1,1.21)", mp.mpf("0.001") / mp.mpf("1.21"))
show("levy density (0.1,1.21,x=1)",
     mp.sqrt(mp.mpf("1.21") / (2 * mp.pi)) * mp.exp(-mp.mpf("1.21") / mp.mpf("0.02")))


def ig_cf(mu, lam_ig, u):
    return mp.exp((lam_ig / mu) * (1 - mp.sqrt(1 - 2 * mu * mu * mp.mpc(0, u) / lam_ig)))


show("ig_cf(1,1,1) closed form", ig_cf(1, 1, 1))
four = mp.quad(lambda y: mp.exp(mp.mpc(0, y)) * mp.sqrt(1 / (2 * mp.pi * y ** 3))
               * mp.exp(-(y - 1) ** 2 / (2 * y)), [0, 1, 10, mp.inf])
show("ig_cf(1,1,1) Fourier quad", four)

# limit pair constants: process (mu*, lam*) = (g0/(1+lam), g0^2/nu^2)
mu_s = G0 / (1 + LAM)
lam_s = G0 ** 2 / NU ** 2
show("phi(1) for (0.1,1.21)", (lam_s / mu_s) * (1 - mp.sqrt(1 - 2 * mu_s ** 2 * mp.mpc(0, 1) / lam_s)))
show("exp(phi(1))", mp.exp((lam_s / mu_s) * (1 - mp.sqrt(1 - 2 * mu_s ** 2 * mp.mpc(0, 1) / lam_s))))


def psi_limit(f, hh):
    z = f + (1 + LAM) * hh
    return -mp.mpc(0, 1) * hh + ((1 + LAM) / NU ** 2) * (
        1 - mp.sqrt(1 - 2 * mp.mpc(0, 1) * (NU ** 2 / (1 + LAM) ** 2) * z))


show("psi_limit(f=1, h=0)", psi_limit(1, 0))
show("psi_limit(f=1, h=0.5)", psi_limit(1, mp.mpf("0.5")))
show("char_functional_limit(f=1, h=0.5)", mp.exp(G0 * psi_limit(1, mp.mpf("0.5"))))


def joint_cf(u, v):
    z = u + (1 + LAM) * v
    phi = (lam_s / mu_s) * (1 - mp.sqrt(1 - 2 * mu_s ** 2 * mp.mpc(0, 1) * z / lam_s))
    return mp.exp(phi - mp.mpc(0, 1) * v * G0)


show("joint_cf_limit(1, 0.5)", joint_cf(1, mp.mpf("0.5")))

# asymptotic Kolmogorov critical value at the 1% level
kol = lambda c: 2 * mp.nsum(lambda k: (-1) ** (k - 1) * mp.exp(-2 * k * k * c * c), [1, mp.inf])
show("KS 1% critical constant", mp.findroot(lambda c: kol(c) - mp.mpf("0.01"), mp.mpf("1.6")))
