"""Independent numerical oracles used by the tests.

None of these call into the package's quadrature, series or optimizer code.
"""

import math

import numpy as np
from scipy.special import expit

# Frozen high-precision values (mpmath, 30 digits) of
#   psi_n = (1/delta) int_0^inf w^n e^(-a w) w^(1/delta - 1) / (1 + w^(1/delta)) dw
# keyed by (lambda, alpha, p) with d_sd = 1.
PSI_REFERENCE = {
    (0.1, 4.0, 0.5): (2.2712415376083892412, 5.9452209974552152983, 30.579901677381479717),
    (0.35, 4.0, 0.5): (0.80379589719052668857, 0.97168250842415751801, 1.8779300795433408031),
    (0.02, 3.0, 0.8): (2.6111710453793404809, 10.159189860765500225, 97.027139435617006881),
    (1.0, 5.0, 0.3): (0.57114084149380904174, 0.62083539270837808563, 0.96478372676263827177),
}

# int_0^inf dx / (1 + x^(1/delta)), which equals C(delta) (mpmath).
C_REFERENCE = {
    0.5: 1.57079632679489661923132169164,
    2.0 / 3.0: 2.41839915231229045334245008062,
    0.4: 1.32130639967764964207435951842,
}

SIR_CCDF_SPOT = 0.610498025265797164951478720953  # exp(-pi^2/20)
DELAY_SPOT = 2.83513736860972161008367293424  # lambda=0.1, alpha=4, p=0.5, tau=1

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo, hi, xtol=1e-12, max_iter=500):
    """Argmax of a unimodal f on [lo, hi] by golden-section search."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= xtol * (abs(a) + abs(b)):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def psi0_trapezoid(a_values, delta, step=0.004, v_lo=-45.0):
    """psi_0 for each a in ``a_values`` by the trapezoid rule in v = ln(e^t - 1).

    The integrand exp(-a e^(delta v)) expit(v) is analytic and decays
    exponentially on both sides, so the trapezoid rule converges geometrically.
    """
    a_values = np.atleast_1d(np.asarray(a_values, dtype=float))
    v_hi = math.log(60.0 / a_values.min()) / delta
    v = np.arange(v_lo, v_hi + step, step)
    weights = np.full(v.size, step)
    weights[0] = weights[-1] = step / 2.0
    base = expit(v) * weights
    growth = np.exp(delta * v)
    return np.array([np.dot(np.exp(-a * growth), base) for a in a_values])


def utility_on_grid(lam, alpha, d_sd, tau, p_s, p_grid):
    """U(p) from the raw closed form with the trapezoid psi_0."""
    delta = 2.0 / alpha
    c = math.pi * delta / math.sin(math.pi * delta)
    a_prime = lam * math.pi * d_sd**2 * c
    p = np.asarray(p_grid, dtype=float)
    psi0 = psi0_trapezoid(a_prime * p, delta)
    ase = lam * c * p**2 * tau**delta * psi0 / abs(math.log(p_s))
    with np.errstate(over="ignore"):  # infinite delay means zero utility
        delay = np.exp(a_prime * p * tau**delta / (1.0 - p) ** (1.0 - delta)) / p
    return ase / delay
